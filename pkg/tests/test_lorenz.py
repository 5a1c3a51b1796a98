import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from invset.lorenz import (
    DivergenceError,
    EmptyWordError,
    GEN_L,
    GEN_R,
    LorenzError,
    LorenzParams,
    ModularMatrix,
    cyclic_normal_form,
    divergence,
    ellipsoid_contraction_check,
    evolve_ensemble,
    find_orbit_for_word,
    find_upos,
    integrate,
    is_primitive,
    lyapunov_max,
    ring,
    section_crossings,
    symbolic_word,
    upo_catalogue_json,
    verify_orbit,
    word_to_matrix,
)

from oracles import lorenz_reference, word_matrix_numpy

STD = LorenzParams()


@pytest.fixture(scope="module")
def catalogue():
    return find_upos(STD, max_word_len=5)


def test_rk4_against_high_order_reference():
    x0 = (1.0, 1.0, 20.0)
    got = integrate(x0, STD, 1e-3, 1.0).final
    ref = lorenz_reference(x0, 1.0)
    assert np.linalg.norm(got - ref) < 1e-6
    # fourth order: halving dt cuts the error roughly sixteenfold
    e2 = np.linalg.norm(integrate(x0, STD, 2e-3, 1.0).final - ref)
    e1 = np.linalg.norm(got - ref)
    assert 10 < e2 / e1 < 20


def test_partial_last_step_lands_on_T():
    tr = integrate((1, 1, 20), STD, 1e-3, 0.0105)
    assert tr.t[-1] == 0.0105 and len(tr) == 12


def test_fixed_points_stay_put():
    assert np.all(integrate((0, 0, 0), STD, T=1.0).final == 0)
    for e in STD.equilibria()[1:]:
        assert np.linalg.norm(integrate(e, STD, T=1.0).final - e) < 1e-6


def test_attractor_bounds():
    tr = integrate((1, 1, 20), STD, T=100)
    x, y, z = tr.states[5000:].T
    assert 15 < np.abs(x).max() < 25
    assert 40 < z.max() < 50 and z.min() > 0


def test_blow_up_is_reported():
    with pytest.raises(DivergenceError):
        integrate((1e200, 1e200, 1e200), STD, 1.0, 1.0)
    with pytest.raises(LorenzError):
        integrate((1, 1), STD)
    with pytest.raises(LorenzError):
        LorenzParams(sigma=-1)


def test_divergence_values():
    assert divergence(STD) == pytest.approx(-41 / 3)
    assert divergence(LorenzParams(sigma=20)) == pytest.approx(-71 / 3)


def test_contraction_rate():
    res = ellipsoid_contraction_check(STD)
    assert res.relative_error < 1e-2
    for seed in (1, 2):
        assert ellipsoid_contraction_check(STD, seed=seed).relative_error < 1e-2
    shifted = ellipsoid_contraction_check(LorenzParams(sigma=20)).measured
    assert shifted - res.measured == pytest.approx(-10, rel=1e-2)


def test_word_near_left_equilibrium():
    c_minus = STD.equilibria()[2]
    tr = integrate(c_minus + np.array([0.5, 0.5, 0.0]), STD, T=3.0)
    assert symbolic_word(tr).startswith("LLL")
    with pytest.raises(EmptyWordError):
        symbolic_word(integrate((0, 0, 0), STD, T=1.0))


def test_section_symbols_follow_sign_of_x():
    cr = section_crossings((1, 1, 20), STD, 30)
    assert all((c.state[0] < 0) == (c.symbol == "L") for c in cr)
    assert all(abs(c.state[0] * c.state[1] - STD.b * c.state[2]) < 1e-6 for c in cr)


@pytest.mark.parametrize("w,nf", [("RL", "LR"), ("RLRLL", "LLRLR"), ("LLLL", "LLLL"), ("LRLRL", "LLRLR")])
def test_cyclic_normal_form(w, nf):
    assert cyclic_normal_form(w) == nf


def test_primitive():
    assert is_primitive("LLR") and not is_primitive("LRLR")
    with pytest.raises(LorenzError):
        cyclic_normal_form("LXR")


def test_word_matrix_example():
    assert word_to_matrix("LRRRLLRRRLLLLR").to_list() == [[164, 133], [127, 103]]


words = st.text(alphabet="LR", min_size=1, max_size=30)


@given(words, words)
def test_word_matrices_form_a_homomorphism(u, v):
    mu, mv = word_to_matrix(u), word_to_matrix(v)
    assert (mu @ mv) == word_to_matrix(u + v)
    m = word_to_matrix(u)
    assert m.a * m.d - m.b * m.c == 1
    assert m.to_list() == word_matrix_numpy(u).tolist()


def test_generators():
    assert GEN_L.to_list() == [[1, 1], [0, 1]] and GEN_R.to_list() == [[1, 0], [1, 1]]
    with pytest.raises(ValueError):
        ModularMatrix(1, 1, 1, 1)


def test_catalogue_has_the_figure_orbits(catalogue):
    assert {"LR", "LLRLR"} <= catalogue.words()
    lr = next(o for o in catalogue.orbits if o.normal_form == "LR")
    assert lr.period == pytest.approx(1.558652, abs=1e-5)
    for o in catalogue.orbits:
        closure, word = verify_orbit(o, STD)
        assert closure < 1e-6
        assert cyclic_normal_form(word) == o.normal_form


def test_catalogue_is_complete_to_length_five(catalogue):
    necklaces = {"LR", "LLR", "LRR", "LLLR", "LLRR", "LRRR",
                 "LLLLR", "LLLRR", "LLRLR", "LLRRR", "LRLRR", "LRRRR"}
    assert catalogue.words() == necklaces
    assert not catalogue.exhausted


def test_symmetric_partners_share_periods(catalogue):
    per = {o.normal_form: o.period for o in catalogue.orbits}
    flip = str.maketrans("LR", "RL")
    for w, p in per.items():
        assert per[cyclic_normal_form(w.translate(flip))] == pytest.approx(p, abs=1e-6)


def test_catalogue_json_is_stable(catalogue):
    assert upo_catalogue_json(catalogue) == upo_catalogue_json(catalogue)
    assert '"normal_form": "LR"' in upo_catalogue_json(catalogue)


def test_budget_flag():
    cat = find_upos(STD, max_word_len=4, search_budget=2)
    assert cat.exhausted and cat.candidates_tried == 2


@pytest.mark.slow
def test_long_word():
    w = "RLLRLLLRRRLLRLRRRRLL"
    orb = find_orbit_for_word(w, STD)
    assert orb is not None and orb.normal_form == cyclic_normal_form(w)
    closure, _ = verify_orbit(orb, STD)
    assert closure < 1e-6


def test_lyapunov():
    lam = lyapunov_max(STD, T=400)
    assert abs(lam - 0.9) < 0.05
    lam2 = lyapunov_max(STD, T=400, dt=5e-4)
    assert abs(lam2 - lam) / lam < 0.02
    assert lyapunov_max(LorenzParams(r=0.5), T=50) <= 0


def test_ensemble_conserves_members():
    res = evolve_ensemble(ring((1, 1, 20), 0.1, 16), STD, T=0.5)
    assert len(res) == 16 and not res.diverged.any()
    assert res.snapshots.shape == (6, 16, 3)


def test_ensemble_predictable_and_unpredictable_regions():
    calm = evolve_ensemble(ring((-8, -8, 27), 1e-3, 64), STD, T=1.5)
    wild = evolve_ensemble(ring((0, 0, 20), 1e-3, 64), STD, T=1.5)
    assert calm.spread_ratio() < 10
    assert wild.spread_ratio() > 1e3
    assert min(wild.wing_fractions()) > 0.3
