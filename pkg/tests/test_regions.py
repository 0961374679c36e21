import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from crabdetect import _kernels
from crabdetect.errors import DegenerateContourError
from crabdetect.regions import (
    Region,
    chain_code,
    discard_edge_regions,
    label_image,
    label_regions,
    read_regions_jsonl,
    trace_boundary,
    write_regions_jsonl,
)

NEIGHBOURS = [(dr, dc) for dr in (-1, 0, 1) for dc in (-1, 0, 1) if (dr, dc) != (0, 0)]
grids = arrays(np.uint8, st.tuples(st.integers(1, 14), st.integers(1, 14)),
               elements=st.integers(0, 1))
backend_settings = settings(max_examples=60, deadline=None,
                            suppress_health_check=[HealthCheck.function_scoped_fixture])


def union_find_partition(mask):
    """Independent oracle: set of frozensets of 8-connected pixel coordinates."""
    parent = {}

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    pixels = list(zip(*np.nonzero(mask)))
    for p in pixels:
        parent[p] = p
    for r, c in pixels:
        for dr, dc in NEIGHBOURS:
            q = (r + dr, c + dc)
            if q in parent:
                ra, rb = find((r, c)), find(q)
                if ra != rb:
                    parent[ra] = rb
    groups = {}
    for p in pixels:
        groups.setdefault(find(p), set()).add((int(p[0]), int(p[1])))
    return {frozenset(g) for g in groups.values()}


def partition(regions):
    return {frozenset(map(tuple, reg.pixels.tolist())) for reg in regions}


def test_matches_union_find_on_random_grids(backend):
    r = np.random.default_rng(7)
    for _ in range(1000):
        mask = (r.random((20, 20)) < r.uniform(0.2, 0.7)).astype(np.uint8)
        assert partition(label_regions(mask, min_region_area=1)) == union_find_partition(mask)


def test_empty_map():
    assert label_regions(np.zeros((8, 8))) == []


def test_two_blobs_across_gutter(backend):
    img = np.zeros((8, 8))
    img[1, 1:4] = 1.0
    img[5:8, 6] = 2.0
    regions = label_regions(img)
    assert len(regions) == 2
    assert [reg.id for reg in regions] == [1, 2]
    assert {reg.area for reg in regions} == {3}


def test_diagonal_touch_is_connected():
    img = np.eye(4)
    assert len(label_regions(img, min_region_area=1)) == 1


def test_area_filter_and_renumbering():
    img = np.zeros((6, 6))
    img[0, 0] = 1
    img[3:5, 3:5] = 1
    regions = label_regions(img)
    assert len(regions) == 1 and regions[0].id == 1 and regions[0].area == 4


def test_only_eight_connectivity():
    with pytest.raises(ValueError):
        label_regions(np.ones((2, 2)), connectivity=4)


@backend_settings
@given(grids)
def test_partition_properties(backend, mask):
    regions = label_regions(mask, min_region_area=1)
    lab = label_image(regions, mask.shape)
    assert np.array_equal(lab > 0, mask > 0)
    assert sum(reg.area for reg in regions) == int(mask.sum())
    # no 8-neighbour link between distinct regions
    for dr, dc in NEIGHBOURS:
        shifted = np.zeros_like(lab)
        src = lab[max(dr, 0):lab.shape[0] + min(dr, 0), max(dc, 0):lab.shape[1] + min(dc, 0)]
        shifted[max(-dr, 0):lab.shape[0] + min(-dr, 0), max(-dc, 0):lab.shape[1] + min(-dc, 0)] = src
        both = (lab > 0) & (shifted > 0)
        assert np.all(lab[both] == shifted[both])


def test_labeling_is_deterministic(rng):
    mask = rng.random((30, 30)) < 0.4
    a, b = label_regions(mask), label_regions(mask.copy())
    assert [r.pixels.tolist() for r in a] == [r.pixels.tolist() for r in b]


def region_from(mask):
    (reg,) = label_regions(mask, min_region_area=1)
    return reg


def test_trace_two_by_two(backend):
    mask = np.zeros((3, 3))
    mask[:2, :2] = 1
    con = trace_boundary(region_from(mask))
    assert con.boundary.tolist() == [[0, 0], [0, 1], [1, 1], [1, 0]]
    assert con.closing_distance == 1.0


def test_trace_one_by_three(backend):
    con = trace_boundary(region_from(np.ones((1, 3))))
    assert con.boundary.tolist() == [[0, 0], [0, 1], [0, 2], [0, 1]]
    assert con.closing_distance == 1.0


def test_trace_single_pixel(backend):
    assert trace_boundary(region_from(np.ones((1, 1)))).boundary.tolist() == [[0, 0]]


def test_trace_ring_skips_hole(backend):
    mask = np.ones((3, 3))
    mask[1, 1] = 0
    con = trace_boundary(region_from(mask))
    assert con.boundary.tolist() == [[0, 0], [0, 1], [0, 2], [1, 2], [2, 2], [2, 1], [2, 0],
                                     [1, 0]]


def test_trace_offset_region(backend):
    mask = np.zeros((6, 7))
    mask[3:5, 4:6] = 1
    con = trace_boundary(region_from(mask))
    assert con.boundary.tolist() == [[3, 4], [3, 5], [4, 5], [4, 4]]


@backend_settings
@given(grids)
def test_trace_walk_properties(backend, mask):
    for reg in label_regions(mask, min_region_area=2):
        pts = trace_boundary(reg).boundary
        inside = {tuple(p) for p in reg.pixels.tolist()}
        steps = np.abs(np.diff(pts, axis=0))
        assert np.all(steps.max(axis=1) == 1)
        assert np.abs(pts[-1] - pts[0]).max() == 1
        assert tuple(pts[0]) == tuple(reg.pixels[0])
        for r, c in pts.tolist():
            assert (r, c) in inside
            assert any((r + dr, c + dc) not in inside for dr, dc in NEIGHBOURS)


@settings(max_examples=60, deadline=None)
@given(grids)
def test_backends_agree(mask):
    if "cython" not in _kernels.BACKENDS:
        pytest.skip("compiled kernels not built")
    py, cy = _kernels.BACKENDS["python"], _kernels.BACKENDS["cython"]
    lp, np_ = py.label_components(mask)
    lc, nc = cy.label_components(mask)
    assert np_ == nc
    np.testing.assert_array_equal(lp, lc)
    for reg in label_regions(mask, min_region_area=1):
        m, (dr, dc) = reg.mask(pad=1)
        r0, c0 = int(reg.pixels[0, 0] - dr), int(reg.pixels[0, 1] - dc)
        np.testing.assert_array_equal(py.trace_boundary(m, r0, c0), cy.trace_boundary(m, r0, c0))


def reg_at(rows, cols):
    return Region(1, np.column_stack([rows, cols]).astype(np.int64))


def test_edge_discard_rule():
    shape = (20, 20)
    left = reg_at([5, 5, 6], [0, 1, 1])
    inner = reg_at([5, 5, 6], [8, 9, 9])
    near = reg_at([5, 5, 6], [17, 18, 18])
    kept, dropped = discard_edge_regions([left, inner, near], shape, guard=2)
    assert kept == [inner]
    assert dropped == [left, near]


def test_edge_discard_guard_zero_keeps_all():
    left = reg_at([5, 5], [0, 1])
    assert discard_edge_regions([left], (10, 10), guard=0) == ([left], [])


def test_edge_discard_rows_and_span_exemption():
    shape = (20, 20)
    top = reg_at([0, 0, 1], [9, 10, 10])
    wide = reg_at(np.full(20, 10), np.arange(20))
    kept, dropped = discard_edge_regions([top, wide], shape, guard=2, guard_rows=2)
    assert kept == [] and len(dropped) == 2
    kept, dropped = discard_edge_regions([top, wide], shape, guard=2, guard_rows=2,
                                         span_exempt=0.5)
    assert kept == [wide] and dropped == [top]


def test_chain_code_directions():
    alpha, ell = chain_code(np.array([[0, 0], [0, 1], [0, 2], [0, 3]]))
    np.testing.assert_array_equal(alpha, 0.0)
    assert len(alpha) == len(ell) - 1
    alpha, _ = chain_code(np.array([[0, 0], [1, 1]]))
    assert alpha[0] == pytest.approx(-np.pi / 4)
    alpha, _ = chain_code(np.array([[0, 1], [0, 0], [-1, 0], [-1, 1], [0, 1]]))
    np.testing.assert_allclose(alpha, [np.pi, np.pi / 2, 0.0, -np.pi / 2])


def test_chain_code_zero_step_and_short_input():
    alpha, _ = chain_code(np.array([[2, 2], [2, 2], [2, 3]]))
    assert np.isnan(alpha[0]) and alpha[1] == 0.0
    with pytest.raises(DegenerateContourError):
        chain_code(np.array([[0, 0]]))


@given(st.lists(st.sampled_from(NEIGHBOURS), min_size=1, max_size=30))
def test_chain_code_is_a_pi_over_4_multiple(steps):
    pts = np.cumsum(np.array([(0, 0)] + steps), axis=0)
    alpha, ell = chain_code(pts)
    k = alpha / (np.pi / 4)
    np.testing.assert_allclose(k, np.round(k), atol=1e-12)
    assert np.all((alpha > -np.pi) & (alpha <= np.pi))
    np.testing.assert_array_equal(ell, pts)


def test_regions_jsonl_round_trip(tmp_path):
    mask = np.zeros((5, 5))
    mask[1:3, 1:4] = 1
    reg = region_from(mask)
    con = trace_boundary(reg)
    write_regions_jsonl([reg], [con], tmp_path / "r.jsonl")
    (rec,) = read_regions_jsonl(tmp_path / "r.jsonl")
    assert rec["area"] == 6 and rec["bounding_box"] == [1, 2, 1, 3]
    assert rec["boundary"] == con.boundary.tolist()
