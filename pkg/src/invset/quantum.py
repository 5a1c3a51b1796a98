"""Bloch-sphere correspondence and Bell-type experiments over bit-string sample spaces.

A direction is a :class:`BlochPoint` with dyadic ``cos(theta)`` and azimuth
``phi = pi * beta / 2``.  An entangled-pair sub-experiment at relative
angle ``theta`` is the string ``E_beta**alpha (dd...d)`` with
``alpha = 1 - cos(theta)``: a ``d`` cell is a disagreeing pair, ``¬d`` an
agreeing one.  Every correlation is counted exactly over its own string.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import mpmath

from .algebra import (
    OperatorLabel,
    SymbolString,
    alpha_step,
    basis_element,
    beta_grid,
    beta_step,
    fractional_power,
    frequency,
    hamming_distance,
)
from .rationals import (
    AdmissibilityError,
    ThirdCosine,
    is_dyadic_N_bits,
    relative_cosine,
    triple_admissibility,
)


@dataclass(frozen=True)
class BlochPoint:
    cos_theta: Fraction
    beta: Fraction
    bits: int

    def __post_init__(self):
        object.__setattr__(self, "cos_theta", Fraction(self.cos_theta))
        object.__setattr__(self, "beta", Fraction(self.beta) % 4)
        if self.bits < 2:
            raise AdmissibilityError("bit budget must be >= 2")
        if abs(self.cos_theta) > 1:
            raise AdmissibilityError(f"cos_theta={self.cos_theta} outside [-1, 1]")
        if not is_dyadic_N_bits(self.cos_theta, self.bits):
            raise AdmissibilityError(f"cos_theta={self.cos_theta} is not describable by {self.bits} bits")
        if self.beta % beta_step(self.size):
            raise AdmissibilityError(f"beta={self.beta} is off the size-{self.size} azimuth grid")

    @property
    def size(self) -> int:
        return 2**self.bits

    @classmethod
    def pole(cls, bits: int) -> "BlochPoint":
        return cls(Fraction(1), Fraction(0), bits)

    def antipode(self) -> "BlochPoint":
        return BlochPoint(-self.cos_theta, self.beta + 2, self.bits)

    def to_json(self) -> dict:
        return {"cos_theta": self.cos_theta, "beta": self.beta, "bits": self.bits}


def alpha_from_angle(cos_theta, bits: int | None = None) -> Fraction:
    """``alpha`` on the branch [0, 2] with ``cos^2(theta/2) = |1 - alpha/2|``, i.e. ``1 - cos``."""
    c = Fraction(cos_theta)
    if abs(c) > 1:
        raise AdmissibilityError(f"cos_theta={c} outside [-1, 1]")
    alpha = 1 - c
    if bits is not None and alpha % alpha_step(2**bits):
        raise AdmissibilityError(
            f"alpha={alpha} from cos_theta={c} is not representable with {bits} bits (step {alpha_step(2**bits)})"
        )
    return alpha


def angle_from_alpha(alpha) -> Fraction:
    return 1 - Fraction(alpha)


@dataclass(frozen=True)
class CorrelationRecord:
    a: BlochPoint | None
    b: BlochPoint | None
    cos_theta: Fraction
    sample_size: int
    correlation: Fraction
    lambda_space_id: str
    disagreement: SymbolString = field(repr=False)

    def to_json(self) -> dict:
        return {
            "a": self.a,
            "b": self.b,
            "cos_theta": self.cos_theta,
            "sample_size": self.sample_size,
            "correlation": self.correlation,
            "lambda_space_id": self.lambda_space_id,
            "disagreement_frequency": frequency(self.disagreement),
        }


def outcomes(s: SymbolString) -> tuple[list[int], list[int]]:
    """Spin outcomes ``A(lambda), B(lambda)`` read off a disagreement string.

    ``A`` alternates +1, -1 over the sample space; ``B = -A`` on ``d`` cells
    and ``B = A`` on ``¬d`` cells.
    """
    A = [1 if k % 2 == 0 else -1 for k in range(len(s))]
    B = [-x if c == 0 else x for x, c in zip(A, s.cells)]
    return A, B


def correlation_from_cosine(cos_theta, bits: int, lambda_space_id: str = "Lambda", beta=0,
                            a: BlochPoint | None = None, b: BlochPoint | None = None) -> CorrelationRecord:
    """One sub-experiment at relative cosine ``cos_theta`` over ``2**bits`` hidden-variable values."""
    c = Fraction(cos_theta)
    if not is_dyadic_N_bits(c, bits):
        raise AdmissibilityError(f"relative cosine {c} is not describable by {bits} bits")
    alpha = alpha_from_angle(c, bits)
    size = 2**bits
    beta = Fraction(beta) % 4
    if beta % beta_step(size):
        raise AdmissibilityError(f"relative azimuth beta={beta} is off the size-{size} grid")
    s = fractional_power(OperatorLabel(beta, alpha, size))(SymbolString.plain(size, "d"))
    A, B = outcomes(s)
    corr = Fraction(sum(x * y for x, y in zip(A, B)), size)
    return CorrelationRecord(a, b, c, size, corr, lambda_space_id, s)


def _require_pair(a: BlochPoint, b: BlochPoint) -> ThirdCosine:
    if a.bits != b.bits:
        raise AdmissibilityError("points carry different bit budgets")
    rel = relative_cosine(a, b, a.bits)
    if not rel.dyadic_admissible:
        raise AdmissibilityError(
            f"pair {a.to_json()} / {b.to_json()} is inadmissible: relative cosine "
            f"{rel.exact if rel.exact is not None else mpmath.nstr(rel.value, 20)} ({rel.certificate})"
        )
    return rel


def singlet_correlation(a: BlochPoint, b: BlochPoint, lambda_space_id: str = "Lambda") -> CorrelationRecord:
    rel = _require_pair(a, b)
    return correlation_from_cosine(rel.exact, a.bits, lambda_space_id, b.beta - a.beta, a, b)


@dataclass(frozen=True)
class BellReport:
    records: tuple[CorrelationRecord, CorrelationRecord, CorrelationRecord]
    lhs: Fraction
    rhs: Fraction
    violated: bool
    shared_lambda_admissible: bool

    def to_json(self) -> dict:
        return {
            "records": list(self.records),
            "lhs": self.lhs,
            "rhs": self.rhs,
            "violated": self.violated,
            "shared_lambda_admissible": self.shared_lambda_admissible,
        }


def central_angle(p: BlochPoint, q: BlochPoint) -> mpmath.mpf:
    rel = relative_cosine(p, q, p.bits)
    return mpmath.acos(max(min(rel.value, 1), -1))


def resolution(bits: int) -> mpmath.mpf:
    return 2 * mpmath.pi / 2**bits


def select_c_prime(b: BlochPoint, c: BlochPoint) -> BlochPoint:
    """Nearest point to ``c`` whose relative cosine with ``b`` is admissible.

    Ties go to the smaller ``beta``, then the larger ``cos_theta``.
    """
    n = b.bits
    step = alpha_step(2**n)
    cosines = [1 - k * step for k in range(int(2 / step) + 1)]
    best = None
    for dbeta in (0, 1, 2, 3):
        for ct in cosines:
            q = BlochPoint(ct, (b.beta + dbeta) % 4 if abs(ct) != 1 else 0, n)
            rel = relative_cosine(b, q, n)
            if not rel.dyadic_admissible or rel.exact % step:
                continue
            key = (central_angle(c, q), q.beta, -q.cos_theta)
            if best is None or key < best[0]:
                best = (key, q)
    return best[1]


def near_coplanar_configuration(cos_ab, cos_ac, bits: int, beta_c=None):
    """``a`` at the pole, ``b`` on the zero meridian and ``c`` one azimuth grid step off it."""
    beta_c = beta_step(2**bits) if beta_c is None else beta_c
    return (BlochPoint.pole(bits), BlochPoint(cos_ab, 0, bits), BlochPoint(cos_ac, beta_c, bits))


def bell_experiment(a: BlochPoint, b: BlochPoint, c: BlochPoint, c_prime: BlochPoint | None = None,
                    check_resolution: bool = True) -> BellReport:
    """Three sub-experiments on disjoint sample spaces: (a, b), (a, c) and (b, c')."""
    if c_prime is None:
        c_prime = select_c_prime(b, c)
    if check_resolution and c_prime != c:
        sep = central_angle(c, c_prime)
        if sep > resolution(c.bits):
            raise AdmissibilityError(
                f"c' is {mpmath.nstr(sep, 8)} rad from c, beyond the resolution 2*pi/2**{c.bits}"
            )
    r1 = singlet_correlation(a, b, "Lambda_1")
    r2 = singlet_correlation(a, c, "Lambda_2")
    r3 = singlet_correlation(b, c_prime, "Lambda_3")
    lhs = abs(r1.correlation - r2.correlation)
    rhs = 1 + r3.correlation
    shared = triple_admissibility(a, b, c, a.bits).simultaneous
    return BellReport((r1, r2, r3), lhs, rhs, lhs > rhs, shared)


def bell_from_cosines(cos_ab, cos_ac, cos_bc, bits: int) -> BellReport:
    """Bell test from the three relative cosines, one disjoint sample space each.

    ``shared_lambda_admissible`` asks whether a triangle with those sides can
    be placed with ``a`` at the pole and all three points on the grid.
    """
    c1, c2, c3 = Fraction(cos_ab), Fraction(cos_ac), Fraction(cos_bc)
    r1 = correlation_from_cosine(c1, bits, "Lambda_1")
    r2 = correlation_from_cosine(c2, bits, "Lambda_2")
    r3 = correlation_from_cosine(c3, bits, "Lambda_3")
    lhs = abs(r1.correlation - r2.correlation)
    rhs = 1 + r3.correlation
    return BellReport((r1, r2, r3), lhs, rhs, lhs > rhs, _realizable_on_grid(c1, c2, c3, bits))


def _realizable_on_grid(c1: Fraction, c2: Fraction, c3: Fraction, bits: int) -> bool:
    q = (1 - c1 * c1) * (1 - c2 * c2)
    if q == 0:
        if c3 != c1 * c2:
            raise AdmissibilityError(f"cosines {c1}, {c2}, {c3} do not form a spherical triangle")
        return True
    # cos(phi)**2 at the pole is rational; phi is a grid azimuth only when cos(phi) is 0 or ±1
    k2 = (c3 - c1 * c2) ** 2 / q
    if k2 > 1:
        raise AdmissibilityError(f"cosines {c1}, {c2}, {c3} do not form a spherical triangle")
    return k2 in (0, 1)


@dataclass(frozen=True)
class CHSHReport:
    records: tuple[CorrelationRecord, ...]
    S: Fraction
    violated: bool

    def to_json(self) -> dict:
        return {"records": list(self.records), "S": self.S, "violated": self.violated}


def _chsh(records) -> CHSHReport:
    ab, abp, apb, apbp = (r.correlation for r in records)
    S = ab - abp + apb + apbp
    return CHSHReport(tuple(records), S, abs(S) > 2)


def chsh_from_cosines(cos_ab, cos_abp, cos_apb, cos_apbp, bits: int) -> CHSHReport:
    """CHSH sum from four relative cosines, each on its own sample space."""
    cs = (cos_ab, cos_abp, cos_apb, cos_apbp)
    ids = ("Lambda_ab", "Lambda_ab'", "Lambda_a'b", "Lambda_a'b'")
    return _chsh([correlation_from_cosine(c, bits, i) for c, i in zip(cs, ids)])


def chsh_experiment(a: BlochPoint, ap: BlochPoint, b: BlochPoint, bp: BlochPoint) -> CHSHReport:
    return _chsh([
        singlet_correlation(a, b, "Lambda_ab"),
        singlet_correlation(a, bp, "Lambda_ab'"),
        singlet_correlation(ap, b, "Lambda_a'b"),
        singlet_correlation(ap, bp, "Lambda_a'b'"),
    ])


def grid_points(bits: int) -> list[BlochPoint]:
    """All points with ``alpha``-grid colatitude cosines and grid azimuths; each pole once."""
    size = 2**bits
    step = alpha_step(size)
    pts = [BlochPoint.pole(bits), BlochPoint(-1, 0, bits)]
    for k in range(1, int(2 / step)):
        for beta in beta_grid(size):
            pts.append(BlochPoint(1 - k * step, beta, bits))
    return pts


def chsh_scan(bits: int) -> Fraction:
    """Largest ``|S|`` over every admissible four-point CHSH configuration on the grid."""
    import numpy as np

    pts = grid_points(bits)
    n = len(pts)
    C = np.full((n, n), np.nan)
    exact = {}
    memo = {}
    step = alpha_step(2**bits)
    for i, p in enumerate(pts):
        for j, q in enumerate(pts):
            key = (p.cos_theta, q.cos_theta, (q.beta - p.beta) % 4)
            if key not in memo:
                rel = relative_cosine(p, q, bits)
                memo[key] = rel.exact if rel.dyadic_admissible and rel.exact % step == 0 else None
            if memo[key] is not None:
                exact[i, j] = -memo[key]
                C[i, j] = float(-memo[key])
    # U[a, a', b] collects the b terms, V[a, a', b'] the b' terms
    U = C[:, None, :] + C[None, :, :]
    V = C[None, :, :] - C[:, None, :]
    best, arg = -1.0, None
    for sgn in (1, -1):
        u = np.where(np.isnan(U), -np.inf, sgn * U)
        v = np.where(np.isnan(V), -np.inf, sgn * V)
        bu, bv = u.argmax(axis=2), v.argmax(axis=2)
        tot = np.take_along_axis(u, bu[..., None], 2)[..., 0] + np.take_along_axis(v, bv[..., None], 2)[..., 0]
        a, ap = np.unravel_index(np.argmax(tot), tot.shape)
        if tot[a, ap] > best:
            best, arg = tot[a, ap], (a, ap, bu[a, ap], bv[a, ap])
    a, ap, b, bp = arg
    return abs(exact[a, b] - exact[a, bp] + exact[ap, b] + exact[ap, bp])


@dataclass(frozen=True)
class SternGerlachResult:
    frequencies: dict
    counts: dict
    total: int
    stage_strings: tuple[SymbolString, SymbolString, SymbolString]

    def to_json(self) -> dict:
        return {"frequencies": self.frequencies, "counts": self.counts, "total": self.total,
                "stage_strings": [str(s) for s in self.stage_strings]}


def sequential_sg(cos1, cos2, cos3, bits: int) -> SternGerlachResult:
    """Detector frequencies for three Stern-Gerlach stages resolved at nested depths.

    Each stage's string labels ``2**bits`` sub-intervals of every interval
    that the previous stage sent onward (its negated cells).
    """
    size = 2**bits
    strings = []
    for sym, c in zip("abc", (cos1, cos2, cos3)):
        if not is_dyadic_N_bits(Fraction(c), bits):
            raise AdmissibilityError(f"stage cosine {c} is not describable by {bits} bits")
        alpha = alpha_from_angle(c, bits)
        strings.append(fractional_power(OperatorLabel(0, alpha, size))(SymbolString.plain(size, sym)))
    plain = [s.cells.count(0) for s in strings]
    neg = [size - p for p in plain]
    counts = {
        "A": plain[0] * size * size,
        "B": neg[0] * plain[1] * size,
        "C": neg[0] * neg[1] * plain[2],
        "D": neg[0] * neg[1] * neg[2],
    }
    total = size**3
    if sum(counts.values()) != total:
        raise AssertionError("nested counts do not partition the sample space")
    freqs = {k: Fraction(v, total) for k, v in counts.items()}
    return SternGerlachResult(freqs, counts, total, tuple(strings))


# --- non-continuity in beta -----------------------------------------------------


def dyadic_truncations(target, max_frac_bits: int, dps: int = 60) -> list[Fraction]:
    """Distinct truncations of ``target`` to 0, 1, ..., ``max_frac_bits`` fractional bits."""
    out = []
    with mpmath.workdps(dps):
        t = mpmath.mpf(target) if not isinstance(target, Fraction) else target
        for k in range(max_frac_bits + 1):
            if isinstance(t, Fraction):
                v = Fraction(int(t * 2**k // 1), 2**k)
            else:
                v = Fraction(int(mpmath.floor(t * 2**k)), 2**k)
            if not out or v != out[-1]:
                out.append(v)
    return out


@dataclass(frozen=True)
class DivergenceRow:
    beta: Fraction
    next_beta: Fraction
    distance: Fraction


@dataclass(frozen=True)
class DivergenceDemo:
    size: int
    rows: tuple[DivergenceRow, ...]
    reached_target: bool  # a dyadic target was hit exactly, later rows repeat it
    grid_limited: bool  # fewer than the requested rows fit on the azimuth grid

    def to_json(self) -> dict:
        return {"size": self.size, "rows": list(self.rows), "reached_target": self.reached_target,
                "grid_limited": self.grid_limited}


def cauchy_divergence_demo(target, depth: int, size: int = 16) -> DivergenceDemo:
    """Hamming distances between ``E_{beta_k}(aa...a)`` for successive dyadic ``beta_k -> target``.

    ``beta_k`` runs over the distinct truncations of ``target`` representable
    on the size's azimuth grid.  A dyadic target that is reached repeats
    from then on; otherwise the rows end where the grid does.
    """
    if not 0 <= target < 4:
        raise ValueError("target must lie in [0, 4)")
    frac_bits = max(0, size.bit_length() - 3)
    grid = set(beta_grid(size))
    betas = [b for b in dyadic_truncations(target, frac_bits) if b in grid]
    reached = isinstance(target, (int, Fraction)) and betas[-1] == target
    if reached:
        betas += [betas[-1]] * max(0, depth + 1 - len(betas))
    betas = betas[: depth + 1]
    plain = SymbolString.plain(size)
    rows = []
    for b0, b1 in zip(betas, betas[1:]):
        d = hamming_distance(basis_element(b0, size)(plain), basis_element(b1, size)(plain))
        rows.append(DivergenceRow(b0, b1, d))
    return DivergenceDemo(size, tuple(rows), reached, len(rows) < depth)
