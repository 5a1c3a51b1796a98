import math
from fractions import Fraction

import pytest

from invset.fractal import (
    FractalError,
    IntervalCapError,
    Membership,
    cn_approx,
    copy_count,
    copy_scale,
    grouping_labels,
    grouping_stats,
    intervals_csv,
    iter_cn_intervals,
    map_D,
    middle_thirds,
    similarity_dimension,
    stats_json,
    ternary_member,
    ternary_value,
)

from oracles import cluster_groupings


def test_middle_thirds_counts():
    for k in range(6):
        ap = middle_thirds(k)
        assert len(ap) == 2**k
        assert ap.measure() == Fraction(2, 3) ** k


@pytest.mark.parametrize("x,depth,want", [
    (Fraction(1, 4), 64, Membership.IN),  # 0.0202...
    (Fraction(1, 2), 64, Membership.OUT),
    (Fraction(0), 1, Membership.IN),
    (Fraction(2, 3), 8, Membership.IN),
    (ternary_value("0202"), 8, Membership.IN),
])
def test_ternary_membership(x, depth, want):
    assert ternary_member(x, depth) == want


def test_membership_agrees_with_intervals():
    ap = middle_thirds(5)
    for n in range(0, 244):
        x = Fraction(n, 243)
        m = ternary_member(x, 200)
        if m == Membership.IN:
            assert ap.contains(x)
        if not ap.contains(x):
            assert m == Membership.OUT


def test_undetermined_at_small_depth():
    assert ternary_member(Fraction(1, 10), 1) == Membership.UNDETERMINED


@pytest.mark.parametrize("N", [1, 2, 3, 4])
@pytest.mark.parametrize("variant", ["t_i", "t_f"])
def test_cn_level_one(N, variant):
    ap = cn_approx(N, 1, variant)
    assert len(ap) == copy_count(N)
    assert ap.measure() == Fraction(1, 2**N)
    for a, b in zip(ap.intervals, ap.intervals[1:]):
        assert a.hi < b.lo
    assert all(iv.width == copy_scale(N) for iv in ap.intervals)


@pytest.mark.parametrize("N", [2, 3, 4])
@pytest.mark.parametrize("variant", ["t_i", "t_f"])
def test_grouping_stats_match_geometry(N, variant):
    ap = cn_approx(N, 1, variant)
    w = float(copy_scale(N))
    groups = cluster_groupings([(iv.lo, iv.hi) for iv in ap.intervals], w)
    st = grouping_stats(N, variant)
    assert len(groups) == st.grouping_count
    for lo, hi in groups:
        # each grouping is tiled by cells of width 2w with the copy in the middle half
        assert math.isclose(hi - lo + w, float(st.grouping_width), rel_tol=1e-12)


def test_table_values():
    st = grouping_stats(2, "t_i")
    assert (st.grouping_count, st.grouping_width) == (5, Fraction(1, 10))
    st = grouping_stats(4, "t_i")
    assert (st.grouping_count, st.grouping_width) == (17, Fraction(1, 136))
    assert abs(float(st.grouping_width) - 7e-3) < 5e-4
    tf = grouping_stats(2, "t_f")
    assert tf.grouping_count == 2 and copy_count(2) // tf.grouping_count == 10
    assert grouping_stats(4, "t_f").grouping_width == Fraction(1, 16)


def test_depth_two_measure():
    ap = cn_approx(2, 2, "t_i")
    assert len(ap) == 400 and ap.measure() == Fraction(1, 16)


def test_streaming_matches_materialised():
    ap = cn_approx(1, 3, "t_f")
    streamed = [iv for iv, _ in iter_cn_intervals(1, 3, "t_f")]
    assert tuple(streamed) == ap.intervals


def test_cap():
    with pytest.raises(IntervalCapError):
        cn_approx(4, 3, "t_i", cap=10**5)
    with pytest.raises(FractalError):
        cn_approx(2, 1, "t_x")


def test_labels_for_two_bits():
    got = [str(s).replace(" ", "") for s in grouping_labels(2)]
    assert got == ["aaaa", "aaa¬a", "a¬aa¬a", "a¬a¬a¬a", "¬a¬a¬a¬a"]


@pytest.mark.parametrize("N", [1, 2, 3])
def test_labels_balanced(N):
    ap = cn_approx(N, 1, "t_i", labelled=True)
    assert sum(ap.labels) * 2 == len(ap)


@pytest.mark.parametrize("N,k", [(1, 1), (2, 1), (2, 2), (3, 1)])
def test_map_d_is_label_preserving_bijection(N, k):
    m = map_D(N, k)
    assert sorted(m) == list(range(len(m)))
    ti = cn_approx(N, k, "t_i", labelled=True)
    tf = cn_approx(N, k, "t_f", labelled=True)
    assert all(ti.labels[s] == tf.labels[d] for s, d in enumerate(m))


def test_dimension():
    assert abs(float(similarity_dimension(2)) - math.log(20) / math.log(80)) < 1e-12
    assert abs(similarity_dimension(64) - Fraction(2, 3)) < 1e-3
    vals = [similarity_dimension(N) for N in range(1, 12)]
    assert all(v > 2 / 3 for v in vals)
    assert vals == sorted(vals, reverse=True)


def test_exports():
    ap = cn_approx(1, 1, "t_i", labelled=True)
    lines = intervals_csv(ap).splitlines()
    assert lines[0] == "lo,hi,label" and len(lines) == 7
    assert lines[1].endswith(",a")
    assert '"grouping_width": "1/10"' in stats_json(2)
