"""
Bell and CHSH on finite sample spaces
=====================================

Each correlation is counted over its own ``2^N`` hidden-variable values.  The
inequalities are violated by those counts, while the three directions of the
Bell test never share one admissible sample space.
"""

from fractions import Fraction

import mpmath

from invset.quantum import (
    bell_experiment,
    cauchy_divergence_demo,
    chsh_from_cosines,
    correlation_from_cosine,
    near_coplanar_configuration,
    sequential_sg,
)

# The singlet correlation is -cos(theta), exactly.
for c in (Fraction(1), Fraction(1, 2), Fraction(0), Fraction(-3, 4)):
    rec = correlation_from_cosine(c, 8)
    print(f"cos={str(c):>5}  Corr={rec.correlation}")

# Bell: a at the pole, b at 60 degrees, c at 120 degrees one azimuth step off b's meridian.
a, b, c = near_coplanar_configuration(Fraction(1, 2), Fraction(-1, 2), 8)
rep = bell_experiment(a, b, c)
print(f"|C(a,b) - C(a,c)| = {rep.lhs}  1 + C(b,c') = {rep.rhs}  violated={rep.violated}")
print("c' used for the third run:", rep.records[2].b)
print("a, b, c admissible together:", rep.shared_lambda_admissible)

# CHSH with the dyadic cosine nearest 1/sqrt(2) at 9 bits.
q = Fraction(181, 256)
chsh = chsh_from_cosines(-q, q, -q, -q, 9)
print(f"S = {chsh.S} = {float(chsh.S):.5f}")

# Three Stern-Gerlach stages.
sg = sequential_sg(Fraction(1, 2), Fraction(0), Fraction(-1, 2), 3)
print({k: str(v) for k, v in sg.frequencies.items()})

# Approaching an irrational azimuth never settles the string.
for size in (16, 256, 4096):
    demo = cauchy_divergence_demo(mpmath.sqrt(2), 10, size)
    print(size, [(str(r.beta), str(r.distance)) for r in demo.rows])
