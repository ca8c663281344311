"""Vector path geometry against independent oracles and hand values."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cfmultiverse.paths import (
    NormalizedPath,
    Path,
    PathError,
    direction_difference,
    find_branching_point,
    normalize_path,
    opportunity_matrix,
    path_from_json,
    path_length,
    path_to_json,
    point_to_path_distance,
    uniform_weights,
    validate_weights,
    vector_opportunity_potential,
)

from oracles import arc_position, dense_projection_argmin, resample_by_walk


def random_path(rng, dims=None, steps=None):
    m = dims or rng.integers(2, 6)
    s = steps or rng.integers(1, 8)
    return Path(origin=rng.normal(size=m), steps=rng.normal(size=(s, m)))


# --- construction ---------------------------------------------------------


def test_path_requires_consistent_dims():
    with pytest.raises(PathError):
        Path(origin=np.zeros(2), steps=np.zeros((2, 3)))
    with pytest.raises(PathError):
        Path(origin=np.zeros(2), steps=np.zeros((0, 2)))


def test_endpoint_and_length():
    p = Path(origin=np.array([1.0, 1.0]), steps=np.array([[1.0, 0.0], [0.0, 1.0]]))
    assert np.allclose(p.endpoint, [2.0, 2.0])
    assert path_length(p) == pytest.approx(2.0)


def test_path_json_round_trip():
    p = Path(origin=np.array([0.5, -1.0]), steps=np.array([[0.25, 0.75]]))
    q = path_from_json(path_to_json(p))
    assert np.array_equal(p.origin, q.origin)
    assert np.array_equal(p.steps, q.steps)


# --- normalization --------------------------------------------------------


def test_normalize_elbow_hand_values():
    # L-shaped path of length 2, resampled at 4 points: quarter stops
    p = Path(origin=np.zeros(2), steps=np.array([[1.0, 0.0], [0.0, 1.0]]))
    q = normalize_path(p, 4)
    expected = np.array([[0.5, 0.0], [1.0, 0.0], [1.0, 0.5], [1.0, 1.0]])
    assert np.allclose(q.points, expected)


def test_normalize_matches_literal_walk():
    rng = np.random.default_rng(7)
    for _ in range(200):
        p = random_path(rng)
        o = int(rng.integers(1, 12))
        q = normalize_path(p, o)
        ref = resample_by_walk(p.origin, p.steps, o)
        assert np.allclose(q.points, ref, atol=1e-9)


def test_normalize_endpoint_is_exact():
    rng = np.random.default_rng(8)
    for _ in range(50):
        p = random_path(rng)
        q = normalize_path(p, int(rng.integers(1, 9)))
        assert np.array_equal(q.points[-1], p.steps.sum(axis=0))


def test_normalize_measured_arc_spacing():
    rng = np.random.default_rng(9)
    for _ in range(50):
        p = random_path(rng)
        o = int(rng.integers(2, 9))
        q = normalize_path(p, o)
        total = path_length(p)
        positions = []
        cursor = 0.0
        for pt in q.points:
            cursor = arc_position(p.origin, p.steps, p.origin + pt, start=cursor)
            positions.append(cursor)
        assert np.allclose(np.diff([0.0] + positions), total / o, atol=1e-7)


def test_normalize_skips_zero_steps():
    p = Path(
        origin=np.zeros(2),
        steps=np.array([[1.0, 0.0], [0.0, 0.0], [1.0, 0.0]]),
    )
    q = normalize_path(p, 2)
    assert np.allclose(q.points, [[1.0, 0.0], [2.0, 0.0]])


def test_normalize_zero_length_path_errors():
    p = Path(origin=np.zeros(2), steps=np.zeros((3, 2)))
    with pytest.raises(PathError):
        normalize_path(p, 4)


def test_normalize_rejects_bad_o():
    p = Path(origin=np.zeros(2), steps=np.ones((1, 2)))
    with pytest.raises(PathError):
        normalize_path(p, 0)


# --- point-to-path distance and branching ---------------------------------


def test_point_distance_is_exhaustive_min():
    rng = np.random.default_rng(10)
    for _ in range(100):
        q = NormalizedPath(origin=rng.normal(size=3), points=rng.normal(size=(6, 3)))
        point = rng.normal(size=3)
        expected = min(
            np.linalg.norm(q.origin + row - point) for row in q.points
        )
        assert point_to_path_distance(point, q) == pytest.approx(expected)


def build_straight(o, direction, origin=None):
    direction = np.asarray(direction, dtype=float)
    pts = np.outer(np.arange(1, o + 1) / o, direction)
    return NormalizedPath(origin=np.zeros(2) if origin is None else origin, points=pts)


def test_branching_point_diverges_later_with_looser_eps():
    # b drifts linearly away from a; wider tubes tolerate more of it
    o = 10
    a = build_straight(o, [1.0, 0.0])
    drift = np.column_stack([np.arange(1, o + 1) / o, np.arange(1, o + 1) * 0.06])
    b = NormalizedPath(origin=np.zeros(2), points=drift)
    seen = []
    for eps in [0.05, 0.15, 0.3, 0.7]:
        seen.append(find_branching_point(b, a, eps))
    assert seen[0] is not None and seen[1] is not None
    assert seen[0] < seen[1]
    assert seen[-1] is None  # max drift is 0.6, tube of 0.7 never leaks


def test_branching_point_identical_paths_never_diverge():
    a = build_straight(5, [1.0, 1.0])
    assert find_branching_point(a, a, 1e-9) is None


def test_branching_point_uses_absolute_positions():
    a = build_straight(4, [1.0, 0.0])
    b = build_straight(4, [1.0, 0.0], origin=np.array([0.0, 2.0]))
    assert find_branching_point(a, b, 0.5) == 1


def test_branching_point_requires_shared_o():
    a = build_straight(4, [1.0, 0.0])
    b = build_straight(5, [1.0, 0.0])
    with pytest.raises(PathError):
        find_branching_point(a, b, 0.1)


@given(st.integers(1, 30))
def test_uniform_weights_unit_norm(o):
    w = uniform_weights(o)
    assert np.linalg.norm(w) == pytest.approx(1.0)
    validate_weights(w, o)


def test_validate_weights_rejects_increasing():
    with pytest.raises(PathError):
        validate_weights(np.array([0.1, 0.9]) / np.linalg.norm([0.1, 0.9]), 2)


# --- direction difference --------------------------------------------------


def test_direction_difference_hand_value():
    # unit east vs unit north, o = 2, uniform weights: (sqrt(.5) + sqrt(2)) / sqrt(2)
    a = build_straight(2, [1.0, 0.0])
    b = build_straight(2, [0.0, 1.0])
    expected = (np.sqrt(0.5) + np.sqrt(2.0)) / np.sqrt(2.0)
    assert direction_difference(a, b) == pytest.approx(expected)
    assert expected == pytest.approx(1.5)


def test_direction_difference_symmetry_and_zero():
    rng = np.random.default_rng(11)
    origin = rng.normal(size=3)
    a = NormalizedPath(origin=origin, points=rng.normal(size=(5, 3)))
    b = NormalizedPath(origin=origin, points=rng.normal(size=(5, 3)))
    assert direction_difference(a, b) == pytest.approx(direction_difference(b, a))
    assert direction_difference(a, a) == 0.0


def test_direction_difference_early_weights_dominate():
    a = build_straight(2, [1.0, 0.0])
    early = NormalizedPath(origin=np.zeros(2), points=np.array([[0.5, 0.4], [1.0, 0.0]]))
    late = NormalizedPath(origin=np.zeros(2), points=np.array([[0.5, 0.0], [1.0, 0.4]]))
    w = np.array([0.9, np.sqrt(1 - 0.81)])
    assert direction_difference(a, early, w) > direction_difference(a, late, w)


def test_direction_difference_requires_shared_origin():
    a = build_straight(3, [1.0, 0.0])
    b = build_straight(3, [1.0, 0.0], origin=np.ones(2))
    with pytest.raises(PathError):
        direction_difference(a, b)


# --- vector opportunity -----------------------------------------------------


def test_opportunity_hand_values():
    f = np.zeros(2)
    assert vector_opportunity_potential(f, [1, 0], [0.5, 0]) == pytest.approx(0.5)
    assert vector_opportunity_potential(f, [1, 0], [2, 0]) == 1.0
    assert vector_opportunity_potential(f, [1, 0], [0, 1]) == 0.0
    assert vector_opportunity_potential(f, [1, 0], [-1, 0]) == 0.0


def test_opportunity_identical_is_one():
    rng = np.random.default_rng(12)
    for _ in range(20):
        f = rng.normal(size=4)
        e = rng.normal(size=4)
        if np.allclose(e, f):
            continue
        assert vector_opportunity_potential(f, e, e) == 1.0


def test_opportunity_degenerate_reference_errors():
    f = np.ones(3)
    with pytest.raises(PathError):
        vector_opportunity_potential(f, f.copy(), np.zeros(3))


def test_opportunity_matches_dense_projection():
    rng = np.random.default_rng(13)
    for _ in range(50):
        m = int(rng.integers(2, 6))
        f, ref, cmp_point = rng.normal(size=(3, m))
        got = vector_opportunity_potential(f, ref, cmp_point)
        want = dense_projection_argmin(f, ref, cmp_point, 100_001)
        assert got == pytest.approx(want, abs=1e-4)


@settings(max_examples=200)
@given(
    st.lists(st.floats(-10, 10), min_size=2, max_size=5),
    st.lists(st.floats(-10, 10), min_size=2, max_size=5),
    st.floats(0.01, 100.0),
)
def test_opportunity_scale_invariant_and_bounded(ref, cmp_point, scale):
    n = min(len(ref), len(cmp_point))
    ref, cmp_point = np.asarray(ref[:n]), np.asarray(cmp_point[:n])
    f = np.zeros(n)
    if np.dot(ref, ref) == 0.0:
        return
    l = vector_opportunity_potential(f, ref, cmp_point)
    assert 0.0 <= l <= 1.0
    scaled = vector_opportunity_potential(f * scale, ref * scale, cmp_point * scale)
    assert scaled == pytest.approx(l, abs=1e-9)


def test_opportunity_matrix_orientation_and_means():
    f = np.zeros(2)
    endpoints = [np.array([1.0, 0.0]), np.array([2.0, 0.0]), np.array([0.0, 1.0])]
    matrix, means = opportunity_matrix(f, endpoints)
    assert np.allclose(np.diag(matrix), 1.0)
    # reference e1: e2 overshoots (clamped to 1), e3 orthogonal
    assert matrix[0, 1] == 1.0 and matrix[0, 2] == 0.0
    # reference e2: e1 covers half the journey
    assert matrix[1, 0] == pytest.approx(0.5)
    assert np.allclose(means, [(1 + 1 + 0) / 3, (0.5 + 1 + 0) / 3, (0 + 0 + 1) / 3])


def test_opportunity_matrix_needs_two():
    with pytest.raises(PathError):
        opportunity_matrix(np.zeros(2), [np.ones(2)])
