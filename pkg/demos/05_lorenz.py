"""
Lorenz flow: words, orbits, exponents
=====================================

Integrate the standard system, read its L/R word off the Z maxima, find the
short periodic orbits and check the volume contraction rate.
"""

import numpy as np

from invset.lorenz import (
    LorenzParams,
    ellipsoid_contraction_check,
    evolve_ensemble,
    find_upos,
    integrate,
    lyapunov_max,
    ring,
    symbolic_word,
    word_to_matrix,
)

p = LorenzParams()
tr = integrate((1.0, 1.0, 20.0), p, T=30.0)
print("word over T=30:", symbolic_word(tr))
print("max |X| = %.2f, max Z = %.2f" % (np.abs(tr.states[:, 0]).max(), tr.states[:, 2].max()))

# Periodic orbits up to five symbols, with their modular-group matrices.
cat = find_upos(p, max_word_len=5)
for o in cat.orbits:
    print(f"{o.normal_form:<6} period {o.period:.6f}  matrix {word_to_matrix(o.normal_form).to_list()}")

res = ellipsoid_contraction_check(p)
print(f"volume decay rate {res.measured:.6f} (expected {res.expected:.6f})")
print(f"largest Lyapunov exponent ~ {lyapunov_max(p, T=200):.3f}")

# A small ring stays small in one place and splits across both wings in another.
for center in ((-8.0, -8.0, 27.0), (0.0, 0.0, 20.0)):
    ens = evolve_ensemble(ring(center, 1e-3, 64), p, T=1.5)
    print(center, f"spread x{ens.spread_ratio():.3g}", "wings", ens.wing_fractions())
