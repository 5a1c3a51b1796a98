"""Exact rational and dyadic arithmetic, and rationality of cosines of rational angles.

Rationals are :class:`fractions.Fraction` throughout.  ``DyadicRational`` is a
thin normalised view ``mantissa / 2**exponent`` used for bit-budget queries.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import isqrt

import mpmath


class AdmissibilityError(ValueError):
    pass


@dataclass(frozen=True)
class DyadicRational:
    mantissa: int
    exponent: int

    def __post_init__(self):
        if self.exponent < 0:
            raise ValueError("exponent must be non-negative")

    @classmethod
    def from_fraction(cls, x) -> "DyadicRational":
        x = Fraction(x)
        den = x.denominator
        if den & (den - 1):
            raise ValueError(f"{x} is not dyadic")
        return cls(x.numerator, den.bit_length() - 1)

    def to_fraction(self) -> Fraction:
        return Fraction(self.mantissa, 2**self.exponent)

    def normalized(self) -> "DyadicRational":
        return DyadicRational.from_fraction(self.to_fraction())

    def __str__(self):
        return str(self.to_fraction())


def is_dyadic(x) -> bool:
    den = Fraction(x).denominator
    return den & (den - 1) == 0


@dataclass(frozen=True)
class BitPolicy:
    """What "describable by N bits" means: ``x = m / 2**k`` with ``k <= N + extra_exponent``
    and ``|m| <= 2**(N + extra_mantissa)``."""

    extra_exponent: int = 0
    extra_mantissa: int = 0

    def fits(self, x, bits: int) -> bool:
        x = Fraction(x)
        if not is_dyadic(x):
            return False
        d = DyadicRational.from_fraction(x)
        return d.exponent <= bits + self.extra_exponent and abs(d.mantissa) <= 2 ** (bits + self.extra_mantissa)


DEFAULT_POLICY = BitPolicy()


def is_dyadic_N_bits(x, bits: int, policy: BitPolicy = DEFAULT_POLICY) -> bool:
    return policy.fits(x, bits)


def exact_sqrt(x) -> Fraction | None:
    """Square root of a non-negative rational when it is rational, else None."""
    x = Fraction(x)
    if x < 0:
        return None
    p, q = x.numerator, x.denominator
    rp, rq = isqrt(p), isqrt(q)
    if rp * rp == p and rq * rq == q:
        return Fraction(rp, rq)
    return None


# --- doubling orbit ----------------------------------------------------------


def doubling_sequence(x0, steps: int) -> list[Fraction]:
    """``[x0, x1, ..., x_steps]`` with ``x_{k+1} = x_k**2 - 2`` computed exactly.

    Starting from ``2 cos(phi)`` this walks ``2 cos(2**k phi)``.
    """
    if steps < 1:
        raise ValueError("steps must be >= 1")
    xs = [Fraction(x0)]
    for _ in range(steps):
        xs.append(xs[-1] * xs[-1] - 2)
    return xs


def angle_orbit(r) -> list[Fraction]:
    """Orbit of ``r`` under ``x -> 2x mod 2`` folded into ``[0, 1]``, up to the first repeat.

    For ``r = m/n`` in lowest terms the values lie in ``{0, 1/n, ..., 1}``.
    """
    r = Fraction(r) % 2
    seen = []
    while True:
        f = r if r <= 1 else 2 - r
        if f in seen:
            return seen
        seen.append(f)
        r = (2 * r) % 2


# 2 cos(pi * angle) for the integer values of 2 cos on [0, 1]
_INTEGER_COSINES = {
    2: Fraction(0),
    1: Fraction(1, 3),
    0: Fraction(1, 2),
    -1: Fraction(2, 3),
    -2: Fraction(1),
}


def _orbit_shape(values) -> tuple[int, ...]:
    first = {}
    return tuple(first.setdefault(v, len(first)) for v in values)


def rational_cosine_of_rational_angle(m: int, n: int) -> Fraction | None:
    """``cos(pi m / n)`` if it is rational, otherwise None.  Requires ``0 <= m/n <= 1/2``.

    If ``cos = a/b`` with ``b`` not ±1 the doubling orbit of ``2 cos`` has
    strictly growing denominators, yet the angle orbit is finite; so a
    rational value forces ``2 cos`` to be one of the integers -2..2, each of
    which belongs to exactly one angle in ``[0, pi]``.
    """
    if n == 0:
        raise ValueError("n must be non-zero")
    r = Fraction(m, n)
    if not 0 <= r <= Fraction(1, 2):
        raise ValueError(f"angle ratio m/n = {r} outside [0, 1/2]")
    orbit = angle_orbit(r)
    for c, angle in _INTEGER_COSINES.items():
        if angle != r:
            continue
        values = doubling_sequence(c, len(orbit))[: len(orbit)]
        if _orbit_shape(values) != _orbit_shape(orbit):
            raise AssertionError("angle and value orbits disagree")
        return Fraction(c, 2)
    return None


def cos_pi_rational(x) -> Fraction | None:
    """``cos(pi x)`` for any rational ``x`` when rational, else None."""
    x = Fraction(x) % 2
    if x > 1:
        x = 2 - x
    if x <= Fraction(1, 2):
        return rational_cosine_of_rational_angle(x.numerator, x.denominator)
    c = rational_cosine_of_rational_angle((1 - x).numerator, (1 - x).denominator)
    return None if c is None else -c


# --- spherical cosine rule ---------------------------------------------------


def dyadic_tolerance(bits: int) -> Fraction:
    return Fraction(1, 2 ** (bits + 8))


def nearest_dyadic(value, bits: int) -> Fraction:
    scale = 2**bits
    return Fraction(int(mpmath.nint(mpmath.mpf(value) * scale)), scale)


def numeric_screen(value, bits: int) -> str:
    """Numeric verdict for a real value: ``inadmissible`` or ``undecided-numeric``, never admissible."""
    gap = abs(mpmath.mpf(value) - _mpq(nearest_dyadic(value, bits)))
    return "inadmissible" if gap > _mpq(dyadic_tolerance(bits)) else "undecided-numeric"


@dataclass(frozen=True)
class ThirdCosine:
    value: mpmath.mpf
    exact: Fraction | None
    verdict: str
    certificate: str

    @property
    def dyadic_admissible(self) -> bool:
        return self.verdict == "admissible"


def _mpq(x) -> mpmath.mpf:
    x = Fraction(x)
    return mpmath.mpf(x.numerator) / x.denominator


def spherical_third_cosine(cos_ab, cos_ac, beta, bits: int = 16, precision: int = 256) -> ThirdCosine:
    """Cosine of the side ``bc`` of a spherical triangle from sides ``ab``, ``ac`` and the
    angle ``phi = pi * beta / 2`` at ``a``.

    Exact inputs are decided exactly.  Float inputs fall back to numeric
    screening against the nearest ``bits``-bit dyadic.
    """
    exact_inputs = all(isinstance(v, (int, Fraction)) for v in (cos_ab, cos_ac, beta))
    with mpmath.workprec(precision):
        if exact_inputs:
            c1, c2, beta = Fraction(cos_ab), Fraction(cos_ac), Fraction(beta)
            if abs(c1) > 1 or abs(c2) > 1:
                raise AdmissibilityError(f"cosines must lie in [-1, 1], got {c1}, {c2}")
            m1, m2, mb = _mpq(c1), _mpq(c2), _mpq(beta)
        else:
            m1, m2, mb = mpmath.mpf(cos_ab), mpmath.mpf(cos_ac), mpmath.mpf(beta)
            if abs(m1) > 1 or abs(m2) > 1:
                raise AdmissibilityError(f"cosines must lie in [-1, 1], got {cos_ab}, {cos_ac}")
        value = m1 * m2 + mpmath.sqrt((1 - m1 * m1) * (1 - m2 * m2)) * mpmath.cos(mpmath.pi * mb / 2)
        value = +value
        if not exact_inputs:
            return ThirdCosine(value, None, numeric_screen(value, bits), "numeric screen only")

    exact, cert = _exact_third_cosine(c1, c2, beta)
    if exact is None:
        return ThirdCosine(value, None, "inadmissible", cert)
    if is_dyadic_N_bits(exact, bits):
        return ThirdCosine(value, exact, "admissible", cert)
    return ThirdCosine(value, exact, "inadmissible", cert + f"; {exact} not describable by {bits} bits")


def _exact_third_cosine(c1: Fraction, c2: Fraction, beta: Fraction) -> tuple[Fraction | None, str]:
    # value = c1 c2 + s cos(phi), s = sqrt(q) >= 0, phi/pi = beta/2
    q = (1 - c1 * c1) * (1 - c2 * c2)
    if q == 0:
        return c1 * c2, "a side is degenerate (sine zero); value c_ab*c_ac"
    cphi = cos_pi_rational(beta / 2)
    if cphi is not None:
        if cphi == 0:
            return c1 * c2, "cos(phi) = 0; value c_ab*c_ac"
        s = exact_sqrt(q)
        if s is None:
            return None, f"cos(phi) = {cphi} but sine product sqrt({q}) is irrational"
        return c1 * c2 + s * cphi, f"cos(phi) = {cphi}, sine product {s}"
    # cos(phi) irrational: s cos(phi) rational needs cos^2(phi) = (1 + cos 2phi)/2 rational
    c2phi = cos_pi_rational(beta)
    if c2phi is None:
        return None, "cos(phi) and cos(2 phi) both irrational (rational-angle cosine theorem)"
    k = (1 + c2phi) / 2
    term = exact_sqrt(q * k)
    if term is None:
        return None, f"cos(phi) irrational and q*cos^2(phi) = {q * k} is not a rational square"
    sign = 1 if cos_pi_rational_sign(beta / 2) > 0 else -1
    return c1 * c2 + sign * term, f"cos(phi) irrational but sine product cancels it; term {sign * term}"


def cos_pi_rational_sign(x) -> int:
    x = Fraction(x) % 2
    if x in (Fraction(1, 2), Fraction(3, 2)):
        return 0
    return 1 if x < Fraction(1, 2) or x > Fraction(3, 2) else -1


@dataclass(frozen=True)
class TripleReport:
    pairwise: tuple[bool, bool, bool]
    simultaneous: bool
    cosines: tuple[ThirdCosine, ThirdCosine, ThirdCosine]


def relative_cosine(p, q, bits: int = 16) -> ThirdCosine:
    """Cosine of the angle between two sphere points given as (cos_theta, beta)."""
    return spherical_third_cosine(Fraction(p.cos_theta), Fraction(q.cos_theta), Fraction(q.beta) - Fraction(p.beta), bits)


def triple_admissibility(a, b, c, bits: int = 16) -> TripleReport:
    """Which of the pairs (a,b), (a,c), (b,c) have an N-bit dyadic relative cosine."""
    for p in (a, b, c):
        if not (is_dyadic_N_bits(p.cos_theta, bits) and is_dyadic_N_bits(p.beta, bits)):
            raise AdmissibilityError(f"point {p} is not describable by {bits} bits")
    cos = (relative_cosine(a, b, bits), relative_cosine(a, c, bits), relative_cosine(b, c, bits))
    flags = tuple(x.dyadic_admissible for x in cos)
    return TripleReport(flags, all(flags), cos)
