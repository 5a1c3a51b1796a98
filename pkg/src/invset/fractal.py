"""Exact Cantor-set approximations: the middle-thirds set and the family C^(N).

Every C^(N) level replaces a parent interval by ``2**N (2**N + 1)`` copies
scaled by ``1 / (2**(2N) (2**N + 1))``.  Two placements of those copies are
built: ``t_i`` (``2**N + 1`` evenly spread groupings of ``2**N`` intervals)
and ``t_f`` (two groupings at the ends of the parent).  Each copy sits in
the middle half of a cell of twice its width, so groupings are exactly
tiled by cells and intervals never touch.
"""

from __future__ import annotations

import csv
import enum
import io
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

import mpmath

from .algebra import SymbolString, blockwise_i, root_power

MAX_INTERVALS = 10**7


class FractalError(ValueError):
    pass


class IntervalCapError(FractalError):
    pass


class ConsistencyError(RuntimeError):
    pass


@dataclass(frozen=True)
class RatInterval:
    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        if not self.lo < self.hi:
            raise FractalError(f"empty interval [{self.lo}, {self.hi}]")

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    def __contains__(self, x) -> bool:
        return self.lo <= x <= self.hi


@dataclass(frozen=True)
class CantorApprox:
    family: str  # "middle-thirds" or "C(N)"
    N: int | None
    k: int
    variant: str  # "t_i", "t_f" or "unlabelled"
    intervals: tuple[RatInterval, ...]
    labels: tuple[int, ...] | None = None  # 0 plain, 1 negated

    def __len__(self):
        return len(self.intervals)

    def measure(self) -> Fraction:
        return sum((iv.width for iv in self.intervals), Fraction(0))

    def contains(self, x) -> bool:
        return any(x in iv for iv in self.intervals)


@dataclass(frozen=True)
class GroupingStats:
    grouping_count: int
    grouping_width: Fraction
    gap: Fraction

    def to_json(self) -> dict:
        return {
            "grouping_count": self.grouping_count,
            "grouping_width": str(self.grouping_width),
            "gap": str(self.gap),
        }


# --- middle thirds -----------------------------------------------------------


def middle_thirds(k: int) -> CantorApprox:
    if k < 0:
        raise FractalError("k must be >= 0")
    ivs = [RatInterval(Fraction(0), Fraction(1))]
    for _ in range(k):
        nxt = []
        for iv in ivs:
            third = iv.width / 3
            nxt.append(RatInterval(iv.lo, iv.lo + third))
            nxt.append(RatInterval(iv.hi - third, iv.hi))
        ivs = nxt
    return CantorApprox("middle-thirds", None, k, "unlabelled", tuple(ivs))


class Membership(enum.Enum):
    IN = "in"
    OUT = "out"
    UNDETERMINED = "undetermined-at-depth"


def ternary_member(x, depth: int) -> Membership:
    """Membership of ``x`` in the middle-thirds set from its base-3 digits.

    ``OUT`` when a digit 1 is forced within ``depth`` digits; ``IN`` when the
    digit orbit closes up (rationals are eventually periodic) without one;
    otherwise ``UNDETERMINED``.
    """
    x = Fraction(x)
    if not 0 <= x <= 1:
        raise FractalError(f"x must lie in [0, 1], got {x}")
    seen = set()
    for _ in range(depth):
        if x in seen:
            return Membership.IN
        seen.add(x)
        if x <= Fraction(1, 3):
            x = 3 * x
        elif x >= Fraction(2, 3):
            x = 3 * x - 2
        else:
            return Membership.OUT
    return Membership.IN if x in seen else Membership.UNDETERMINED


def ternary_value(digits: str) -> Fraction:
    """Value of a terminating base-3 fraction given as its digit string after the point."""
    return sum((Fraction(int(d), 3 ** (i + 1)) for i, d in enumerate(digits)), Fraction(0))


# --- C^(N) ---------------------------------------------------------------------


def copy_count(N: int) -> int:
    return 2**N * (2**N + 1)


def copy_scale(N: int) -> Fraction:
    return Fraction(1, 2 ** (2 * N) * (2**N + 1))


def grouping_stats(N: int, variant: str) -> GroupingStats:
    if N < 1:
        raise FractalError("N must be >= 1")
    if variant == "t_i":
        width = Fraction(1, 2 ** (N - 1) * (2**N + 1))
        return GroupingStats(2**N + 1, width, Fraction(1, 2**N) - width)
    if variant == "t_f":
        return GroupingStats(2, Fraction(1, 2**N), 1 - Fraction(1, 2 ** (N - 1)))
    raise FractalError(f"unknown variant {variant!r}")


def grouping_starts(N: int, variant: str) -> list[Fraction]:
    """Left ends of the groupings inside a unit parent, ascending."""
    st = grouping_stats(N, variant)
    g = st.grouping_width
    if variant == "t_f":
        return [Fraction(0), 1 - g]
    # centres at j / 2**N, pushed inwards at the two ends
    return [min(max(Fraction(j, 2**N) - g / 2, Fraction(0)), 1 - g) for j in range(2**N + 1)]


def unit_pattern(N: int, variant: str) -> list[tuple[Fraction, int]]:
    """``(offset, grouping)`` of each copy inside a unit parent, ascending."""
    w = copy_scale(N)
    per_group = 2**N if variant == "t_i" else 2 ** (N - 1) * (2**N + 1)
    out = []
    for gi, start in enumerate(grouping_starts(N, variant)):
        for c in range(per_group):
            out.append((start + 2 * c * w + w / 2, gi))
    return out


def grouping_labels(N: int) -> list[SymbolString]:
    """Label string of each ``t_i`` grouping: ``i**alpha (aa...a)`` with ``alpha = g * 2**(1-N)``."""
    op = blockwise_i(2**N)
    plain = SymbolString.plain(2**N)
    return [root_power(op, Fraction(g, 2 ** (N - 1)))(plain) for g in range(2**N + 1)]


def _child_labels(N: int, variant: str) -> list[int]:
    if variant == "t_i":
        return [c for s in grouping_labels(N) for c in s.cells]
    if variant == "t_f":
        half = 2 ** (N - 1) * (2**N + 1)
        return [0] * half + [1] * half
    raise FractalError(f"unknown variant {variant!r}")


def iter_cn_intervals(N: int, k: int, variant: str, parent: RatInterval | None = None,
                      labelled: bool = False) -> Iterator[tuple[RatInterval, int | None]]:
    """Stream the depth-``k`` intervals of C^(N) in ascending order."""
    if N < 1 or k < 0:
        raise FractalError("need N >= 1 and k >= 0")
    parent = parent or RatInterval(Fraction(0), Fraction(1))
    pattern = unit_pattern(N, variant)
    labels = _child_labels(N, variant) if labelled else [None] * len(pattern)
    w = copy_scale(N)

    def walk(iv: RatInterval, depth: int, label):
        if depth == k:
            yield iv, label
            return
        span = iv.width
        for (off, _), lab in zip(pattern, labels):
            lo = iv.lo + off * span
            yield from walk(RatInterval(lo, lo + w * span), depth + 1, lab)

    yield from walk(parent, 0, None)


def cn_approx(N: int, k: int, variant: str, labelled: bool = False, cap: int = MAX_INTERVALS) -> CantorApprox:
    if N < 1 or k < 1:
        raise FractalError("need N >= 1 and k >= 1")
    if variant not in ("t_i", "t_f"):
        raise FractalError(f"unknown variant {variant!r}")
    count = copy_count(N) ** k
    if count > cap:
        raise IntervalCapError(f"{count} intervals exceeds the cap {cap}; use iter_cn_intervals")
    pairs = list(iter_cn_intervals(N, k, variant, labelled=labelled))
    ivs = tuple(p[0] for p in pairs)
    labels = tuple(p[1] for p in pairs) if labelled else None
    return CantorApprox("C(N)", N, k, variant if labelled else "unlabelled", ivs, labels)


def label_groupings(N: int, k: int = 1) -> CantorApprox:
    return cn_approx(N, k, "t_i", labelled=True)


def group_of(N: int, variant: str) -> list[int]:
    return [g for _, g in unit_pattern(N, variant)]


def similarity_dimension(N: int, dps: int = 50) -> mpmath.mpf:
    if N < 1:
        raise FractalError("N must be >= 1")
    with mpmath.workdps(dps):
        return +(mpmath.log(copy_count(N)) / mpmath.log(2 ** (2 * N) * (2**N + 1)))


def map_D(N: int, k: int = 1) -> tuple[int, ...]:
    """Index map from labelled ``t_i`` intervals to ``t_f`` intervals at depth ``k``.

    Within each parent, plain intervals go in order to the ``a`` grouping and
    negated ones to the ``¬a`` grouping.
    """
    ti = label_groupings(N, k)
    tf = cn_approx(N, k, "t_f", labelled=True)
    m = copy_count(N)
    half = m // 2
    mapping = [0] * len(ti)
    for p in range(len(ti) // m):
        base = p * m
        nplain = nneg = 0
        for j in range(m):
            if ti.labels[base + j] == 0:
                mapping[base + j] = base + nplain
                nplain += 1
            else:
                mapping[base + j] = base + half + nneg
                nneg += 1
        if nplain != half or nneg != half:
            raise ConsistencyError(f"label counts {nplain}/{nneg} do not match t_f groupings of {half}")
    for src, dst in enumerate(mapping):
        if ti.labels[src] != tf.labels[dst]:
            raise ConsistencyError("map D does not preserve labels")
    return tuple(mapping)


# --- export --------------------------------------------------------------------


def intervals_csv(approx: CantorApprox) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["lo", "hi", "label"])
    labels = approx.labels or [None] * len(approx)
    for iv, lab in zip(approx.intervals, labels):
        w.writerow([str(iv.lo), str(iv.hi), "" if lab is None else ("¬a" if lab else "a")])
    return buf.getvalue()


def stats_json(N: int) -> str:
    return json.dumps({v: grouping_stats(N, v).to_json() for v in ("t_i", "t_f")}, sort_keys=True)
