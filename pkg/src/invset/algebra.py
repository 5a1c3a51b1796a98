"""Permutation/negation operators acting on symbolic bit strings.

A string of length ``2**n`` over ``{a, ¬a}`` is stored as a tuple of 0/1
cells (1 means negated).  Operators are signed permutations: output cell
``j`` reads input cell ``targets[j]`` and flips it when ``signs[j]`` is 1.
All objects are immutable and hashable, so root chains can be memoised.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import lcm

import numpy as np


class AlgebraError(ValueError):
    pass


class InvalidSizeError(AlgebraError):
    pass


class NoRootError(AlgebraError):
    pass


class DepthError(AlgebraError):
    pass


def _is_pow2(n: int) -> bool:
    return n >= 1 and n & (n - 1) == 0


@dataclass(frozen=True)
class SymbolString:
    cells: tuple[int, ...]
    symbol: str = "a"

    def __post_init__(self):
        if not _is_pow2(len(self.cells)) or len(self.cells) < 2:
            raise InvalidSizeError(f"string length must be 2**n with n >= 1, got {len(self.cells)}")
        if any(c not in (0, 1) for c in self.cells):
            raise AlgebraError("cells must be 0 (plain) or 1 (negated)")

    @classmethod
    def plain(cls, size: int, symbol: str = "a") -> "SymbolString":
        return cls((0,) * size, symbol)

    def __len__(self):
        return len(self.cells)

    def __neg__(self) -> "SymbolString":
        return SymbolString(tuple(1 - c for c in self.cells), self.symbol)

    def __str__(self):
        neg = "¬"
        return " ".join(f"{neg if c else ''}{self.symbol}" for c in self.cells)

    def to_json(self) -> dict:
        return {"symbol": self.symbol, "cells": list(self.cells)}

    @classmethod
    def from_json(cls, d: dict) -> "SymbolString":
        return cls(tuple(d["cells"]), d.get("symbol", "a"))


@dataclass(frozen=True)
class SignedPermutation:
    targets: tuple[int, ...]
    signs: tuple[int, ...]

    def __post_init__(self):
        n = len(self.targets)
        if len(self.signs) != n:
            raise AlgebraError("targets and signs differ in length")
        if sorted(self.targets) != list(range(n)):
            raise AlgebraError("targets is not a bijection")

    @property
    def size(self) -> int:
        return len(self.targets)

    def __call__(self, s: SymbolString) -> SymbolString:
        if len(s) != self.size:
            raise AlgebraError(f"operator of size {self.size} applied to string of length {len(s)}")
        c = s.cells
        return SymbolString(tuple(c[t] ^ g for t, g in zip(self.targets, self.signs)), s.symbol)

    def __matmul__(self, other: "SignedPermutation") -> "SignedPermutation":
        return compose(self, other)

    def __neg__(self) -> "SignedPermutation":
        return SignedPermutation(self.targets, tuple(1 - g for g in self.signs))

    def __pow__(self, k: int) -> "SignedPermutation":
        if k < 0:
            return inverse(self) ** (-k)
        result = identity(self.size)
        base = self
        while k:
            if k & 1:
                result = compose(result, base)
            base = compose(base, base)
            k >>= 1
        return result

    def to_json(self) -> dict:
        return {"size": self.size, "targets": list(self.targets), "signs": list(self.signs)}

    @classmethod
    def from_json(cls, d: dict) -> "SignedPermutation":
        op = cls(tuple(d["targets"]), tuple(d["signs"]))
        if op.size != d["size"]:
            raise AlgebraError("size field disagrees with targets")
        return op


def identity(size: int) -> SignedPermutation:
    return SignedPermutation(tuple(range(size)), (0,) * size)


def negation(size: int) -> SignedPermutation:
    return SignedPermutation(tuple(range(size)), (1,) * size)


def inverse(f: SignedPermutation) -> SignedPermutation:
    n = f.size
    targets = [0] * n
    signs = [0] * n
    for j, (t, g) in enumerate(zip(f.targets, f.signs)):
        targets[t] = j
        signs[t] = g
    return SignedPermutation(tuple(targets), tuple(signs))


def compose(f: SignedPermutation, g: SignedPermutation) -> SignedPermutation:
    """Return ``f ∘ g``, i.e. the operator ``s -> f(g(s))``."""
    if f.size != g.size:
        raise AlgebraError(f"cannot compose operators of sizes {f.size} and {g.size}")
    gt, gs = g.targets, g.signs
    return SignedPermutation(
        tuple(gt[t] for t in f.targets),
        tuple(s ^ gs[t] for t, s in zip(f.targets, f.signs)),
    )


def blockwise_i(size: int) -> SignedPermutation:
    """The pairwise rotation ``(x, y) -> (y, ¬x)`` on consecutive cells."""
    if size < 2 or size % 2:
        raise InvalidSizeError(f"blockwise i needs an even size >= 2, got {size}")
    targets = []
    for k in range(0, size, 2):
        targets += [k + 1, k]
    return SignedPermutation(tuple(targets), (0, 1) * (size // 2))


def block_diag(a: SignedPermutation, b: SignedPermutation) -> SignedPermutation:
    n = a.size
    if b.size != n:
        raise AlgebraError("blocks must have equal size")
    return SignedPermutation(a.targets + tuple(n + t for t in b.targets), a.signs + b.signs)


def block_antidiag(a: SignedPermutation, b: SignedPermutation) -> SignedPermutation:
    """Block matrix ``[[0, a], [b, 0]]``."""
    n = a.size
    if b.size != n:
        raise AlgebraError("blocks must have equal size")
    return SignedPermutation(tuple(n + t for t in a.targets) + b.targets, a.signs + b.signs)


# --- square roots -----------------------------------------------------------
#
# A signed permutation is a permutation of the 2n literals (cell, sign) that
# commutes with negation.  Literal l = 2*cell + sign; the pull map sends the
# literal of output cell j to the literal it reads.  Squaring the operator
# squares the pull map, so roots can be found on literal cycles.


def _pull(f: SignedPermutation, lit: int) -> int:
    j, s = divmod(lit, 2)
    return 2 * f.targets[j] + (s ^ f.signs[j])


def signed_cycles(f: SignedPermutation) -> list[tuple[tuple[int, ...], int]]:
    """Cycles of the underlying permutation as (cells, sign parity), ordered by min cell."""
    seen = [False] * f.size
    out = []
    for c in range(f.size):
        if seen[c]:
            continue
        cells = []
        parity = 0
        j = c
        while not seen[j]:
            seen[j] = True
            cells.append(j)
            parity ^= f.signs[j]
            j = f.targets[j]
        out.append((tuple(cells), parity))
    return out


def _canonical_walk(f: SignedPermutation, cells: tuple[int, ...]) -> list[int]:
    # Walk of len(cells) literals from a positive start literal.  Prefer the
    # start with the most positive literals, then the smallest cell.
    m = len(cells)
    best = None
    for c in sorted(cells):
        walk = [2 * c]
        for _ in range(m - 1):
            walk.append(_pull(f, walk[-1]))
        score = sum(1 for lit in walk if lit % 2 == 0)
        if best is None or score > best[0]:
            best = (score, walk)
    return best[1]


def canonical_sqrt(f: SignedPermutation) -> SignedPermutation:
    """Deterministic signed-permutation square root of ``f``.

    Positive cycles of odd length are rooted in place.  All other cycles are
    paired with the next cycle of the same length and sign parity (ascending
    minimal cell) and interleaved into one cycle of twice the length.
    Raises NoRootError when some class has an unpaired cycle.
    """
    groups: dict[tuple[int, int], list[list[int]]] = {}
    rmap: dict[int, int] = {}
    for cells, parity in signed_cycles(f):
        m = len(cells)
        walk = _canonical_walk(f, cells)
        if parity == 0 and m % 2 == 1:
            h = (m + 1) // 2
            for k in range(m):
                rmap[walk[k]] = walk[(k + h) % m]
                rmap[walk[k] ^ 1] = walk[(k + h) % m] ^ 1
            continue
        groups.setdefault((m, parity), []).append(walk)

    for (m, parity), walks in groups.items():
        if len(walks) % 2:
            kind = "negative" if parity else "positive"
            raise NoRootError(f"unpaired {kind} cycle of length {m}; no signed-permutation root exists")
        for x, y in zip(walks[::2], walks[1::2]):
            if parity:
                # full literal cycle has length 2m and its second half is the negation
                x = x + [lit ^ 1 for lit in x]
                y = y + [lit ^ 1 for lit in y]
            n = len(x)
            for k in range(n):
                rmap[x[k]] = y[k]
                rmap[y[k]] = x[(k + 1) % n]
                if not parity:
                    rmap[x[k] ^ 1] = y[k] ^ 1
                    rmap[y[k] ^ 1] = x[(k + 1) % n] ^ 1

    targets = []
    signs = []
    for j in range(f.size):
        t, s = divmod(rmap[2 * j], 2)
        targets.append(t)
        signs.append(s)
    r = SignedPermutation(tuple(targets), tuple(signs))
    if compose(r, r) != f:
        raise AssertionError("square root construction failed")
    return r


@lru_cache(maxsize=None)
def root_chain(f: SignedPermutation, depth: int) -> SignedPermutation:
    """``f`` rooted ``depth`` times, i.e. ``f ** (1 / 2**depth)``."""
    if depth == 0:
        return f
    try:
        return canonical_sqrt(root_chain(f, depth - 1))
    except NoRootError as exc:
        raise DepthError(f"operator of size {f.size} admits no root of depth {depth}") from exc


def max_root_depth(f: SignedPermutation) -> int:
    d = 0
    while True:
        try:
            root_chain(f, d + 1)
        except DepthError:
            return d
        d += 1


def root_power(f: SignedPermutation, alpha) -> SignedPermutation:
    """``f ** alpha`` for a dyadic ``0 <= alpha <= 4`` via the canonical root chain."""
    alpha = Fraction(alpha)
    if not 0 <= alpha <= 4:
        raise AlgebraError(f"alpha must lie in [0, 4], got {alpha}")
    den = alpha.denominator
    if not _is_pow2(den):
        raise AlgebraError(f"alpha must be dyadic, got {alpha}")
    depth = den.bit_length() - 1
    return root_chain(f, depth) ** alpha.numerator


# --- quaternion chain --------------------------------------------------------


@lru_cache(maxsize=None)
def _basis(size: int) -> tuple[tuple[str, SignedPermutation], ...]:
    if size == 2:
        return (("", blockwise_i(2)),)
    if not _is_pow2(size) or size < 2:
        raise InvalidSizeError(f"quaternion basis needs a power-of-two size, got {size}")
    lower = _basis(size // 2)
    anti = [("0" + s, block_antidiag(e, e)) for s, e in lower]
    diag = [("1" + s, block_diag(e, -e)) for s, e in lower]
    return tuple(anti + diag)


def quaternion_basis(size: int) -> list[SignedPermutation]:
    """Independent square-root-of-minus-one operators on strings of ``size`` cells.

    Built from ``i`` at size 2 by ``E_0s = [[0, E_s], [E_s, 0]]`` and
    ``E_1s = [[E_s, 0], [0, -E_s]]``.  List order is ascending subscript,
    which is ascending ``beta``.
    """
    if size < 4:
        raise InvalidSizeError(f"quaternion basis needs size >= 4, got {size}")
    return [e for _, e in _basis(size)]


def basis_subscripts(size: int) -> list[str]:
    return [s for s, _ in _basis(size)]


def subscript_to_beta(subscript: str) -> Fraction:
    """Read a subscript bit string with a radix point after its first digit."""
    if not subscript or any(ch not in "01" for ch in subscript):
        raise AlgebraError(f"bad subscript {subscript!r}")
    return Fraction(int(subscript, 2), 2 ** (len(subscript) - 1))


def beta_step(size: int) -> Fraction:
    n = size.bit_length() - 1
    return Fraction(1, 2 ** (n - 2))


def beta_grid(size: int) -> list[Fraction]:
    step = beta_step(size)
    return [k * step for k in range(int(4 / step))]


def alpha_step(size: int) -> Fraction:
    n = size.bit_length() - 1
    return Fraction(2, 2**n)


def alpha_grid(size: int) -> list[Fraction]:
    step = alpha_step(size)
    return [k * step for k in range(int(4 / step) + 1)]


def basis_element(beta, size: int) -> SignedPermutation:
    """``E_beta`` at ``size``; ``beta`` in [2, 4) selects the negated operator."""
    beta = Fraction(beta)
    if not 0 <= beta < 4:
        raise AlgebraError(f"beta must lie in [0, 4), got {beta}")
    negate = beta >= 2
    b = beta - 2 if negate else beta
    n = size.bit_length() - 1
    if not _is_pow2(size) or n < 2:
        raise InvalidSizeError(f"quaternion basis needs a power-of-two size >= 4, got {size}")
    scaled = b * 2 ** (n - 2)
    if scaled.denominator != 1:
        raise AlgebraError(f"beta={beta} is not on the size-{size} grid (step {beta_step(size)})")
    e = _element(format(int(scaled), f"0{n - 1}b"))
    return -e if negate else e


@lru_cache(maxsize=256)
def _element(subscript: str) -> SignedPermutation:
    # one basis element, built along its own subscript only
    if not subscript:
        return blockwise_i(2)
    lower = _element(subscript[1:])
    return block_antidiag(lower, lower) if subscript[0] == "0" else block_diag(lower, -lower)


def quaternion_triple() -> tuple[SignedPermutation, SignedPermutation, SignedPermutation]:
    """``(E0, E1, E2)`` on four cells, with ``E2 = E0 ∘ E1``."""
    e0, e1 = quaternion_basis(4)
    return e0, e1, compose(e0, e1)


@dataclass(frozen=True)
class OperatorLabel:
    beta: Fraction
    alpha: Fraction
    size: int

    def __post_init__(self):
        object.__setattr__(self, "beta", Fraction(self.beta))
        object.__setattr__(self, "alpha", Fraction(self.alpha))
        if not _is_pow2(self.size) or self.size < 4:
            raise InvalidSizeError(f"size must be a power of two >= 4, got {self.size}")
        if not 0 <= self.beta < 4:
            raise AlgebraError(f"beta must lie in [0, 4), got {self.beta}")
        if not 0 <= self.alpha <= 4:
            raise AlgebraError(f"alpha must lie in [0, 4], got {self.alpha}")


def fractional_power(label: OperatorLabel) -> SignedPermutation:
    """``E_beta ** alpha`` for the labelled operator."""
    base = basis_element(label.beta, label.size)
    if label.alpha % alpha_step(label.size):
        raise DepthError(
            f"alpha={label.alpha} is finer than the size-{label.size} step {alpha_step(label.size)}"
        )
    return root_power(base, label.alpha)


# --- derived views -----------------------------------------------------------


def frequency(s: SymbolString) -> Fraction:
    """Fraction of plain (un-negated) cells."""
    return Fraction(len(s) - sum(s.cells), len(s))


def hamming_distance(s: SymbolString, t: SymbolString) -> Fraction:
    if len(s) != len(t):
        raise AlgebraError("strings differ in length")
    return Fraction(sum(a != b for a, b in zip(s.cells, t.cells)), len(s))


def to_matrix(f: SignedPermutation) -> np.ndarray:
    """Matrix ``M`` with ``M @ v`` reproducing ``f`` on ±1 cell vectors."""
    m = np.zeros((f.size, f.size), dtype=int)
    for j, (t, g) in enumerate(zip(f.targets, f.signs)):
        m[j, t] = -1 if g else 1
    return m


def to_complex_matrix(f: SignedPermutation) -> np.ndarray:
    """Collapse 2x2 blocks ``[[x, y], [-y, x]]`` to ``x + y*1j``.

    The block ``[[0, 1], [-1, 0]]`` is the matrix of ``i`` on two cells, so
    this is the view where that block is written as the imaginary unit.
    """
    m = to_matrix(f)
    n = f.size // 2
    out = np.zeros((n, n), dtype=complex)
    for r in range(n):
        for c in range(n):
            blk = m[2 * r : 2 * r + 2, 2 * c : 2 * c + 2]
            x, y = blk[0, 0], blk[0, 1]
            if blk[1, 0] != -y or blk[1, 1] != x:
                raise AlgebraError("operator does not commute with the blockwise i; no complex view")
            out[r, c] = x + 1j * y
    return out


def is_unitary(m: np.ndarray) -> bool:
    return bool(np.allclose(m @ m.conj().T, np.eye(m.shape[0])))


def operator_order(f: SignedPermutation) -> int:
    """Smallest ``k >= 1`` with ``f ** k`` the identity."""
    return lcm(*(len(c) * (2 if p else 1) for c, p in signed_cycles(f)))


def chain_relations(size: int) -> list[tuple[str, bool]]:
    """Named checks for the basis at ``size``.

    Each element squares to global negation and has order 4, and for every
    tail ``s`` the product ``E_0s ∘ E_1s`` is the block ``[[0, 1], [-1, 0]]``.
    """
    basis = dict(_basis(size)) if size >= 4 else {}
    if not basis:
        raise InvalidSizeError(f"relations need size >= 4, got {size}")
    J = block_antidiag(identity(size // 2), negation(size // 2))
    out = []
    for s, e in basis.items():
        out.append((f"E_{s}^2 = -1", e @ e == negation(size)))
        out.append((f"order(E_{s}) = 4", operator_order(e) == 4))
    for s in basis:
        if s[0] == "0":
            t = s[1:]
            out.append((f"E_0{t} o E_1{t} = [[0,1],[-1,0]]", basis["0" + t] @ basis["1" + t] == J))
    if size == 4:
        e0, e1, e2 = quaternion_triple()
        out.append(("E_0 o E_1 = E_2", e0 @ e1 == e2))
        out.append(("E_2^2 = -1", e2 @ e2 == negation(4)))
    return out
