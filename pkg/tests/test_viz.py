import io

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import sparse_dense_pairs
from cscmat.build import from_dense, from_triplets, speye
from cscmat.errors import ShapeError, StructureError
from cscmat.order import etree
from cscmat.ops import pattern_union_transpose
from cscmat.viz import (etreeplot_data, gplot_data, read_plot_data, spy_data, tree_depths,
                        treeplot_data, write_plot_data)


def hexagon():
    rows = np.array([2, 6, 1, 3, 2, 4, 3, 5, 4, 6, 1, 5]) - 1
    cols = np.array([1, 1, 2, 2, 3, 3, 4, 4, 5, 5, 6, 6]) - 1
    t = 2 * np.pi * np.arange(6) / 6
    return from_triplets(rows, cols, np.ones(12), 6, 6), np.column_stack((np.cos(t), np.sin(t)))


def test_hexagon_segments():
    a, xy = hexagon()
    pd = gplot_data(a, xy)
    assert pd.kind == "segments" and pd.count == 12
    lengths = np.hypot(pd.records[:, 0] - pd.records[:, 2], pd.records[:, 1] - pd.records[:, 3])
    # neighbours on a unit hexagon are one apart
    assert np.allclose(lengths, 1.0)


def test_gplot_shape_errors():
    a, xy = hexagon()
    with pytest.raises(ShapeError):
        gplot_data(a, xy[:5])
    with pytest.raises(ShapeError):
        gplot_data(from_dense(np.ones((2, 3))), np.zeros((2, 2)))


@given(sparse_dense_pairs(10, 10))
def test_spy_points_are_the_nonzeros(pair):
    a, ad = pair
    pd = spy_data(a)
    got = {(int(r), int(c)) for c, r in pd.records}
    want = {(int(i), int(j)) for i, j in zip(*np.nonzero(ad))}
    assert got == want and (pd.nrows, pd.ncols) == ad.shape


def test_spy_skips_explicit_zeros():
    a = speye(3)
    a.insert(0, 2, 0.0)
    assert spy_data(a).count == 3


def test_tree_layout_of_a_chain():
    pd = treeplot_data([1, 2, -1])
    assert pd.records[:, 1].tolist() == [2, 1, 0]
    assert np.all(pd.records[:, 0] == 0)


def test_tree_parents_sit_over_their_children():
    parent = np.array([2, 2, 4, 4, -1, -1])
    rec = treeplot_data(parent).records
    assert rec[2, 0] == (rec[0, 0] + rec[1, 0]) / 2
    assert rec[4, 0] == (rec[2, 0] + rec[3, 0]) / 2
    assert len(set(rec[[0, 1, 3, 5], 0])) == 4
    assert tree_depths(parent).tolist() == [2, 2, 1, 1, 0, 0]


def test_cycles_are_rejected():
    with pytest.raises(StructureError):
        treeplot_data([1, 0])
    with pytest.raises(StructureError):
        tree_depths([5])


@given(st.integers(1, 30), st.integers(0, 2**31))
def test_random_forest_depths(n, seed):
    r = np.random.default_rng(seed)
    parent = np.array([r.integers(v + 1, n + 1) if v < n - 1 else n for v in range(n)])
    parent[parent == n] = -1
    rec = treeplot_data(parent).records
    for v in range(n):
        if parent[v] >= 0:
            assert rec[v, 1] == rec[parent[v], 1] + 1
        else:
            assert rec[v, 1] == 0


def test_etreeplot_matches_etree():
    a, _ = hexagon()
    rec = etreeplot_data(a).records
    assert rec[:, 2].astype(int).tolist() == etree(pattern_union_transpose(a)).parent.tolist()


def test_plot_data_round_trip():
    a, xy = hexagon()
    for pd in (gplot_data(a, xy), spy_data(a), treeplot_data([1, 2, -1])):
        buf = io.StringIO()
        write_plot_data(pd, buf)
        back = read_plot_data(io.StringIO(buf.getvalue()))
        assert back.kind == pd.kind and back.group == pd.group
        assert np.array_equal(back.records, pd.records)


def test_grouped_round_trip_and_bad_count():
    from cscmat.viz import PlotData

    pd = PlotData("segments", np.arange(24.0).reshape(8, 3), 4, 4, group=4)
    buf = io.StringIO()
    write_plot_data(pd, buf)
    assert "\n\n" in buf.getvalue()
    back = read_plot_data(io.StringIO(buf.getvalue()))
    assert back.group == 4 and np.array_equal(back.records, pd.records)
    with pytest.raises(ValueError):
        read_plot_data(io.StringIO("points 2 2 3\n0 0\n"))
