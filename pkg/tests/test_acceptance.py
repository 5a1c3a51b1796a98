"""One test per acceptance criterion; the summary prints a [PASS]/[FAIL] line for each."""

import math
from fractions import Fraction

import mpmath
import numpy as np

from invset.algebra import (
    alpha_grid,
    basis_element,
    beta_grid,
    blockwise_i,
    canonical_sqrt,
    chain_relations,
    fractional_power,
    frequency,
    operator_order,
    OperatorLabel,
    quaternion_basis,
    quaternion_triple,
    SymbolString,
    to_matrix,
)
from invset.fractal import cn_approx, grouping_stats, similarity_dimension
from invset.lorenz import (
    LorenzParams,
    ellipsoid_contraction_check,
    find_upos,
    verify_orbit,
    word_to_matrix,
)
from invset.quantum import (
    bell_experiment,
    cauchy_divergence_demo,
    chsh_from_cosines,
    correlation_from_cosine,
    near_coplanar_configuration,
)
from invset.rationals import cos_pi_rational, rational_cosine_of_rational_angle, triple_admissibility

from goldens import cases, render
from oracles import SQRT_I_4, cluster_groupings, cos_rational_by_degree


def test_criterion_01_quaternion_relations(criterion):
    with criterion(1, "E0 E1 = E2, chain relations at sizes 4/8/16, every basis element has order 4"):
        e0, e1, e2 = quaternion_triple()
        assert e0 @ e1 == e2
        for size in (4, 8, 16):
            rel = chain_relations(size)
            assert rel and all(ok for _, ok in rel), [n for n, ok in rel if not ok]
            assert all(operator_order(e) == 4 for e in quaternion_basis(size))
        assert operator_order(e2) == 4


def test_criterion_02_frequency_law(criterion):
    with criterion(2, "frequency(E_beta^alpha(aa..a)) = |1 - alpha/2| for all grid (alpha, beta), sizes 4/8/16"):
        count = 0
        for size in (4, 8, 16):
            plain = SymbolString.plain(size)
            for beta in beta_grid(size):
                for alpha in alpha_grid(size):
                    s = fractional_power(OperatorLabel(beta, alpha, size))(plain)
                    assert frequency(s) == abs(1 - alpha / 2), (size, beta, alpha)
                    count += 1
        assert count == 4 * 9 + 8 * 17 + 16 * 33


def test_criterion_03_root_of_i(criterion):
    with criterion(3, "canonical sqrt of blockwise i on 4 cells is (a1 a2 a3 a4) -> (a3 a4 a2 ¬a1)"):
        r = canonical_sqrt(blockwise_i(4))
        assert np.array_equal(to_matrix(r), SQRT_I_4)
        assert (r.targets, r.signs) == ((2, 3, 1, 0), (0, 0, 0, 1))


def test_criterion_04_cantor_groupings(criterion):
    with criterion(4, "N=2: 5 groupings of width 1/10, t_f 2 x 10; N=4: 17 groupings of width 1/136 ~ 7e-3"):
        st = grouping_stats(2, "t_i")
        assert (st.grouping_count, st.grouping_width) == (5, Fraction(1, 10))
        tf = cn_approx(2, 1, "t_f")
        w = float(tf.intervals[0].width)
        groups = cluster_groupings([(iv.lo, iv.hi) for iv in tf.intervals], w)
        assert len(groups) == grouping_stats(2, "t_f").grouping_count == 2
        sizes = [sum(1 for iv in tf.intervals if lo < float(iv.lo + iv.hi) / 2 < hi) for lo, hi in groups]
        assert sizes == [10, 10]
        st = grouping_stats(4, "t_i")
        assert (st.grouping_count, st.grouping_width) == (17, Fraction(1, 136))
        assert round(float(st.grouping_width), 3) == 0.007


def test_criterion_05_dimension(criterion):
    with criterion(5, "dim(2) = log 20 / log 80 to 12 digits, |dim(64) - 2/3| < 1e-3"):
        assert abs(similarity_dimension(2) - mpmath.log(20) / mpmath.log(80)) < 1e-12
        assert abs(similarity_dimension(64) - mpmath.mpf(2) / 3) < 1e-3


def test_criterion_06_rational_cosines(criterion):
    with criterion(6, "n <= 64 scan hits only 0, 1/3, 1/2 (x pi); dyadic angles in (0, 1) other than 1/2 are irrational"):
        hits = set()
        for n in range(1, 65):
            for m in range(0, n // 2 + 1):
                got = rational_cosine_of_rational_angle(m, n)
                assert (got is not None) == cos_rational_by_degree(Fraction(m, n))
                if got is not None:
                    hits.add(Fraction(m, n))
        assert hits == {0, Fraction(1, 3), Fraction(1, 2)}
        for k in range(1, 13):
            for m in range(1, 2**k):
                r = Fraction(m, 2**k)
                if r != Fraction(1, 2):
                    assert cos_pi_rational(r) is None, r
        assert cos_pi_rational(Fraction(1, 2)) == 0


def test_criterion_07_bell_and_chsh(criterion):
    with criterion(7, "60/120 degree triple: lhs 1 > rhs 1/2 on 3 disjoint spaces, triple inadmissible; CHSH S = 181/64"):
        a, b, c = near_coplanar_configuration(Fraction(1, 2), Fraction(-1, 2), 8)
        rep = bell_experiment(a, b, c)
        assert (rep.lhs, rep.rhs) == (1, Fraction(1, 2))
        assert rep.violated and rep.lhs - rep.rhs == Fraction(1, 2)
        assert len({r.lambda_space_id for r in rep.records}) == 3
        assert triple_admissibility(a, b, c, 8).simultaneous is False
        assert rep.shared_lambda_admissible is False
        q = Fraction(181, 256)
        chsh = chsh_from_cosines(-q, q, -q, -q, 9)
        assert chsh.S == Fraction(181, 64) and chsh.S > 2
        assert abs(float(chsh.S) - 2.828) < 1e-3


def test_criterion_08_singlet(criterion):
    with criterion(8, "Corr = -cos(theta) exactly for all 257 grid cosines at size 256"):
        n = 0
        for k in range(257):
            c = 1 - Fraction(k, 128)
            rec = correlation_from_cosine(c, 8)
            assert rec.sample_size == 256 and rec.correlation == -c
            n += 1
        assert n == 257


def test_criterion_09_contraction(criterion):
    with criterion(9, "tangent volume decay rate within 1% of -41/3"):
        res = ellipsoid_contraction_check(LorenzParams())
        assert res.expected == -41 / 3
        assert res.relative_error < 0.01, res.measured


def test_criterion_10_upo_catalogue(criterion):
    with criterion(10, "orbits LR and LRLRL found, closure < 1e-6; LRRRLLRRRLLLLR -> [[164,133],[127,103]]"):
        p = LorenzParams()
        cat = find_upos(p, max_word_len=5)
        for w in ("LR", "LLRLR"):  # LRLRL up to rotation
            orb = next(o for o in cat.orbits if o.normal_form == w)
            closure, _ = verify_orbit(orb, p)
            assert closure < 1e-6
        assert word_to_matrix("LRRRLLRRRLLLLR").to_list() == [[164, 133], [127, 103]]


def test_criterion_11_no_convergence(criterion):
    with criterion(11, "beta_k -> sqrt 2 at size 16: every consecutive Hamming distance > 0"):
        demo = cauchy_divergence_demo(mpmath.sqrt(2), 8, 16)
        assert demo.rows
        assert all(r.distance > 0 for r in demo.rows)


def test_criterion_12_determinism(criterion):
    with criterion(12, "every golden output byte-identical across two runs"):
        first = {cfg.stem: render(cfg) for cfg in cases()}
        second = {cfg.stem: render(cfg) for cfg in cases()}
        assert first and first == second
