"""
Operators on bit strings
========================

Signed permutations act on strings of symbols ``a`` / ``¬a``.  This walk
builds the blockwise ``i``, takes roots of it, and checks that the frequency
of plain symbols after a fractional power follows ``|1 - alpha/2|``.
"""

from fractions import Fraction

from invset.algebra import (
    OperatorLabel,
    SymbolString,
    blockwise_i,
    canonical_sqrt,
    chain_relations,
    fractional_power,
    frequency,
    max_root_depth,
    quaternion_triple,
    to_matrix,
)

# Four cells, all plain.
plain = SymbolString.plain(4)
i4 = blockwise_i(4)
print("i        :", i4(plain))
print("i o i    :", (i4 @ i4)(plain))

# The canonical square root of i, and its matrix.
r = canonical_sqrt(i4)
print("sqrt(i)  :", r(plain))
print(to_matrix(r))
print("root depth available on 4 cells:", max_root_depth(i4))

# The three size-4 basis elements multiply like quaternion units.
e0, e1, e2 = quaternion_triple()
print("E0 E1 == E2:", e0 @ e1 == e2)
for name, ok in chain_relations(8):
    print(f"  {name:<28} {ok}")

# Powers of E_beta with alpha on the grid; the plain fraction is |1 - alpha/2|.
size = 16
for alpha in (Fraction(0), Fraction(1, 4), Fraction(1), Fraction(3, 2), Fraction(2)):
    s = fractional_power(OperatorLabel(Fraction(1, 2), alpha, size))(SymbolString.plain(size))
    print(f"alpha={str(alpha):>4}  {s}  freq={frequency(s)}")
