from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from invset.algebra import (
    AlgebraError,
    DepthError,
    InvalidSizeError,
    NoRootError,
    OperatorLabel,
    SignedPermutation,
    SymbolString,
    alpha_grid,
    basis_element,
    basis_subscripts,
    beta_grid,
    block_diag,
    blockwise_i,
    canonical_sqrt,
    chain_relations,
    compose,
    fractional_power,
    frequency,
    hamming_distance,
    identity,
    inverse,
    max_root_depth,
    negation,
    operator_order,
    quaternion_basis,
    quaternion_triple,
    root_chain,
    root_power,
    subscript_to_beta,
    to_complex_matrix,
    to_matrix,
)

from oracles import SQRT_I_4, apply_power, dense_basis, dense_blockwise_i, dense_e2, plain_fraction


@st.composite
def signed_perms(draw, max_log=5):
    n = 2 ** draw(st.integers(1, max_log))
    targets = draw(st.permutations(range(n)))
    signs = draw(st.lists(st.integers(0, 1), min_size=n, max_size=n))
    return SignedPermutation(tuple(targets), tuple(signs))


def test_blockwise_i_matches_hand_matrix():
    for n in (2, 4, 8):
        assert np.array_equal(to_matrix(blockwise_i(n)), dense_blockwise_i(n))


@pytest.mark.parametrize("size", [4, 8, 16, 32])
def test_basis_matches_block_recursion(size):
    ours = [to_matrix(e) for e in quaternion_basis(size)]
    ref = dense_basis(size)
    assert len(ours) == len(ref) == size // 2
    for a, b in zip(ours, ref):
        assert np.array_equal(a, b)


def test_triple_matches_dense_product():
    e0, e1, e2 = quaternion_triple()
    assert np.array_equal(to_matrix(e2), dense_e2())
    assert np.array_equal(to_matrix(e0) @ to_matrix(e1), dense_e2())


@given(signed_perms(), signed_perms())
def test_compose_is_matrix_product(f, g):
    if f.size != g.size:
        with pytest.raises(AlgebraError):
            compose(f, g)
        return
    assert np.array_equal(to_matrix(f @ g), to_matrix(f) @ to_matrix(g))


@given(signed_perms())
def test_inverse_and_negation(f):
    n = f.size
    assert f @ inverse(f) == identity(n) == inverse(f) @ f
    assert -f == negation(n) @ f == f @ negation(n)
    assert f ** operator_order(f) == identity(n)


@given(signed_perms(max_log=4))
@settings(max_examples=200)
def test_canonical_sqrt_is_a_root_or_refuses(f):
    try:
        r = canonical_sqrt(f)
    except NoRootError:
        return
    assert r @ r == f
    assert np.array_equal(to_matrix(r) @ to_matrix(r), to_matrix(f))


def test_single_odd_negative_cycle_has_no_root():
    # a lone negated cell squares from nothing: x -> ¬x has no signed root on one cell
    f = SignedPermutation((0, 1), (1, 0))
    with pytest.raises(NoRootError):
        canonical_sqrt(f)


def test_sqrt_of_i_is_the_hand_written_map():
    r = canonical_sqrt(blockwise_i(4))
    assert np.array_equal(to_matrix(r), SQRT_I_4)
    assert str(r(SymbolString.plain(4))) == "a a a ¬a"


def test_sqrt_of_minus_one_is_i():
    for n in (2, 4, 8):
        assert canonical_sqrt(negation(n)) == blockwise_i(n)


@pytest.mark.parametrize("size", [4, 8, 16, 64])
def test_root_depth(size):
    n = size.bit_length() - 1
    for e in [blockwise_i(size)] + quaternion_basis(size)[:3]:
        assert max_root_depth(e) == n - 1
    with pytest.raises(DepthError):
        root_chain(blockwise_i(size), n)


def test_root_chain_squares_back():
    e = quaternion_basis(16)[5]
    for d in range(1, 4):
        r = root_chain(e, d)
        assert r ** (2**d) == e
        assert np.array_equal(np.linalg.matrix_power(to_matrix(r), 2**d), to_matrix(e))


def test_powers_of_i_on_four_cells():
    plain = SymbolString.plain(4)
    texts = [str(root_power(blockwise_i(4), Fraction(k, 2))(plain)) for k in range(5)]
    assert texts[0] == "a a a a"
    assert texts[1] == "a a a ¬a"
    assert texts[4] == "¬a ¬a ¬a ¬a"
    assert sum(c == "a" for c in texts[3].split()) == 1


@pytest.mark.parametrize("size", [4, 8, 16])
def test_frequency_law_against_dense_powers(size):
    # independent route: power the dense root matrix and count +1 entries
    d = size.bit_length() - 2
    for beta in beta_grid(size):
        root = to_matrix(root_chain(basis_element(beta, size), d))
        for alpha in alpha_grid(size):
            num = alpha * 2**d
            assert num.denominator == 1
            vec = apply_power(root, int(num))
            assert plain_fraction(vec) == abs(1 - alpha / 2)


def test_subscripts_and_betas():
    subs = basis_subscripts(16)
    assert subs[0] == "000" and subs[-1] == "111"
    betas = [subscript_to_beta(s) for s in subs]
    assert betas == sorted(betas) == [Fraction(k, 4) for k in range(8)]
    assert basis_element(Fraction(5, 4) + 2, 16) == -quaternion_basis(16)[5]
    with pytest.raises(AlgebraError):
        basis_element(Fraction(1, 8), 16)


def test_fractional_power_edges():
    for beta in beta_grid(8):
        assert fractional_power(OperatorLabel(beta, 0, 8)) == identity(8)
        assert fractional_power(OperatorLabel(beta, 2, 8)) == negation(8)
        assert fractional_power(OperatorLabel(beta, 4, 8)) == identity(8)
    with pytest.raises(DepthError):
        fractional_power(OperatorLabel(0, Fraction(1, 8), 8))


def test_relations_hold():
    for size in (4, 8, 16, 32):
        assert all(ok for _, ok in chain_relations(size))


def test_complex_view_gives_pauli_algebra():
    e0, e1, e2 = (to_complex_matrix(e) for e in quaternion_triple())
    sx, sz, sy = (-1j * e for e in (e0, e1, e2))
    assert np.allclose(sx, [[0, 1], [1, 0]])
    assert np.allclose(sz, [[1, 0], [0, -1]])
    assert np.allclose(sy, [[0, -1j], [1j, 0]])
    assert np.allclose(sx @ sy, 1j * sz)
    assert np.allclose(sx @ sz + sz @ sx, 0)
    for s in (sx, sy, sz):
        assert np.allclose(s @ s.conj().T, np.eye(2))


def test_hamming_distance_and_frequency():
    a = SymbolString.plain(4)
    assert frequency(a) == 1 and frequency(-a) == 0
    assert hamming_distance(a, -a) == 1
    assert hamming_distance(a, SymbolString((0, 1, 0, 1))) == Fraction(1, 2)


def test_json_round_trip():
    f = quaternion_basis(8)[3]
    assert SignedPermutation.from_json(f.to_json()) == f
    s = f(SymbolString.plain(8, "d"))
    assert SymbolString.from_json(s.to_json()) == s


def test_validation():
    with pytest.raises(InvalidSizeError):
        SymbolString((0, 0, 0))
    with pytest.raises(AlgebraError):
        SignedPermutation((0, 0), (0, 0))
    with pytest.raises(InvalidSizeError):
        quaternion_basis(2)
    with pytest.raises(AlgebraError):
        blockwise_i(4) @ blockwise_i(8)
    with pytest.raises(AlgebraError):
        OperatorLabel(4, 0, 8)


def test_block_diag_of_roots():
    r = canonical_sqrt(blockwise_i(4))
    assert block_diag(r, r) @ block_diag(r, r) == blockwise_i(8)
