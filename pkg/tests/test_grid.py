import numpy as np
import pytest
from hypothesis import given, strategies as st

from quadvar.grid import (
    MIDPOINT,
    RECTANGULAR,
    RULES,
    SIMPSON,
    TRAPEZOIDAL,
    GridSpec,
    build_grid,
    integer_root,
    partition_count,
    weights,
)


def test_midpoint_1d_two_cells():
    np.testing.assert_array_equal(build_grid("midpoint", 1, 2).ravel(), [0.25, 0.75])


def test_rectangular_2d_left_endpoints():
    expected = [[0, 0], [0, 0.5], [0.5, 0], [0.5, 0.5]]
    np.testing.assert_array_equal(build_grid("rectangular", 2, 2), expected)


def test_midpoint_single_cell_center():
    np.testing.assert_array_equal(build_grid(MIDPOINT, 2, 1), [[0.5, 0.5]])


def test_closed_rules_use_endpoints():
    np.testing.assert_array_equal(build_grid("trapezoidal", 1, 3).ravel(), [0, 0.5, 1])
    np.testing.assert_array_equal(build_grid("simpson", 1, 5).ravel(), [0, 0.25, 0.5, 0.75, 1])


@pytest.mark.parametrize("rule,m", [("trapezoidal", 1), ("simpson", 2), ("simpson", 4), ("midpoint", 0)])
def test_too_few_points_is_rejected(rule, m):
    with pytest.raises(ValueError, match=f"{rule}|points_per_axis"):
        build_grid(rule, 1, m)


def test_rectangular_weights_are_ones():
    q, n = weights(RECTANGULAR, 3, 4)
    assert n == 64
    np.testing.assert_array_equal(q, np.ones(64))


def test_trapezoid_weights_1d():
    # (1/N') sum q f must equal h (f1/2 + f2 + f3/2) with h = 1/2
    q, n = weights(TRAPEZOIDAL, 1, 3)
    np.testing.assert_allclose(q, [0.5, 1.0, 0.5])
    assert n == 2


def test_simpson_weights_1d():
    q, n = weights(SIMPSON, 1, 3)
    np.testing.assert_allclose(q, [1 / 6, 4 / 6, 1 / 6], rtol=0, atol=1e-15)
    assert n == 1


@pytest.mark.parametrize("rule,N,D,expected", [
    ("trapezoidal", 2 ** 20, 20, 1),
    ("rectangular", 4096, 3, 4096),
    ("simpson", 3 ** 20, 20, 1),
    ("midpoint", 81, 4, 81),
    ("trapezoidal", 125, 3, 64),
    ("simpson", 125, 3, 27),
])
def test_partition_count(rule, N, D, expected):
    assert partition_count(rule, N, D) == expected


def test_partition_count_needs_perfect_power():
    with pytest.raises(ValueError, match="perfect"):
        partition_count("rectangular", 10, 2)


def test_integer_root_large_powers():
    assert integer_root(3 ** 20, 20) == 3
    assert integer_root(7 ** 9, 9) == 7
    with pytest.raises(ValueError):
        integer_root(7 ** 9 + 1, 9)


def test_gridspec_total_points():
    assert GridSpec(4, 3).total_points == 81


def _valid_m(rule, m):
    if rule == "simpson":
        return 2 * m + 3
    return m + RULES[rule].min_points_per_axis


@given(st.sampled_from(sorted(RULES)), st.integers(1, 4), st.integers(0, 4))
def test_weight_sum_and_sign(rule, D, k):
    m = _valid_m(rule, k)
    q, n = weights(rule, D, m)
    assert len(q) == m ** D == len(build_grid(rule, D, m))
    assert abs(q.sum() - n) <= 1e-12 * max(1, n)
    assert np.all(q >= 0)


@given(st.sampled_from(sorted(RULES)), st.integers(1, 3), st.integers(0, 5))
def test_points_in_unit_cube(rule, D, k):
    m = _valid_m(rule, k)
    pts = build_grid(rule, D, m)
    if rule == "rectangular":
        assert pts.min() >= 0 and pts.max() < 1
    elif rule == "midpoint":
        assert pts.min() > 0 and pts.max() < 1
    else:
        assert pts.min() == 0 and pts.max() == 1


@given(st.integers(1, 3), st.integers(1, 6))
def test_grid_is_lexicographic_and_repeatable(D, m):
    pts = build_grid("midpoint", D, m)
    order = np.lexsort(pts.T[::-1])
    np.testing.assert_array_equal(order, np.arange(len(pts)))
    assert build_grid("midpoint", D, m).tobytes() == pts.tobytes()


@given(st.integers(1, 4), st.integers(1, 5))
def test_partition_count_ordering(D, k):
    m = 2 * k + 1  # odd, >= 3: valid for every rule
    N = m ** D
    assert partition_count("rectangular", N, D) >= partition_count("trapezoidal", N, D) \
        >= partition_count("simpson", N, D)


@pytest.mark.parametrize("rule", sorted(RULES))
def test_weights_integrate_exactly_up_to_rule_degree(rule):
    # composite rule exactness: left/midpoint/trap on affine, simpson on cubics
    degree = {"rectangular": 0, "midpoint": 1, "trapezoidal": 1, "simpson": 3}[rule]
    m = 5
    x = build_grid(rule, 1, m).ravel()
    q, n = weights(rule, 1, m)
    for p in range(degree + 1):
        assert abs((q * x ** p).sum() / n - 1 / (p + 1)) < 1e-14
