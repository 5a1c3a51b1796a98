"""
Cantor-set approximations
=========================

The ``C^(N)`` family keeps ``2^N`` copies per level.  The two variants share a
dimension but cluster their copies differently; the grouping statistics and
labels below show how.
"""

from invset.fractal import (
    cn_approx,
    grouping_labels,
    grouping_stats,
    map_D,
    middle_thirds,
    similarity_dimension,
)

# Middle thirds first, as a sanity check on the measure.
for k in range(4):
    ap = middle_thirds(k)
    print(f"middle thirds k={k}: {len(ap)} intervals, measure {ap.measure()}")

# Grouping counts and widths for both variants.
for N in (1, 2, 3, 4):
    ti, tf = grouping_stats(N, "t_i"), grouping_stats(N, "t_f")
    print(f"N={N}: t_i {ti.grouping_count} x {ti.grouping_width}   t_f {tf.grouping_count} x {tf.grouping_width}")

# Labels attached to the N=2 groupings, left to right.
for g, s in enumerate(grouping_labels(2)):
    print(g, s)

# The bijection D carries each t_i interval to a t_f interval with the same label.
ti = cn_approx(2, 1, "t_i", labelled=True)
tf = cn_approx(2, 1, "t_f", labelled=True)
d = map_D(2, 1)
print("D preserves labels:", all(ti.labels[i] == tf.labels[j] for i, j in enumerate(d)))

# The similarity dimension decreases toward 2/3.
for N in (1, 2, 4, 8, 16, 64):
    print(f"dim(N={N}) = {float(similarity_dimension(N)):.6f}")
