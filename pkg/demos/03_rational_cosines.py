"""
Which rational angles have rational cosines
===========================================

A brute-force scan over ``m/n`` with ``n <= 64``, then the spherical third
cosine for points whose azimuth differs by a grid step.
"""

from fractions import Fraction

from invset.rationals import cos_pi_rational, spherical_third_cosine

hits = sorted({Fraction(m, n) for n in range(1, 65) for m in range(n + 1)
               if cos_pi_rational(Fraction(m, n)) is not None})
for r in hits:
    print(f"cos(pi * {r}) = {cos_pi_rational(r)}")

# Dyadic angles: only the right angle survives.
dyadic = [Fraction(m, 2**k) for k in range(1, 9) for m in range(1, 2**k)]
print("rational among dyadic angles:", sorted({r for r in dyadic if cos_pi_rational(r) is not None}))

# Two points at cos 1/2 from the pole, azimuths apart by beta (in units of pi/2).
for beta in (Fraction(0), Fraction(1, 2), Fraction(1), Fraction(2)):
    t = spherical_third_cosine(Fraction(1, 2), Fraction(1, 2), beta)
    print(f"beta={beta}: {t.verdict:<13} exact={t.exact}  ({t.certificate})")
