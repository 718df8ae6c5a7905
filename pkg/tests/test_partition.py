import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from depreg.errors import InputError
from depreg.partition import (
    PartitionModel,
    cell_bounds,
    contrast_curve,
    empirical_contrast,
    fit_piecewise,
)


def brute_cells(n, m):
    # enumerate i with (j-1)/m < i/n <= j/m using exact integer comparisons
    cells = []
    for j in range(1, m + 1):
        members = [i for i in range(1, n + 1) if (j - 1) * n < i * m <= j * n]
        cells.append((members[0], members[-1]))
    return cells


@pytest.mark.parametrize("n,m,expected", [
    (4, 2, [(1, 2), (3, 4)]),
    (5, 2, [(1, 2), (3, 5)]),
    (7, 7, [(i, i) for i in range(1, 8)]),
])
def test_cell_bounds_examples(n, m, expected):
    assert cell_bounds(n, m) == expected


@given(st.integers(1, 300).flatmap(lambda n: st.tuples(st.just(n), st.integers(1, n))))
def test_cell_bounds_partition_properties(nm):
    n, m = nm
    cells = cell_bounds(n, m)
    assert cells == brute_cells(n, m)
    assert cells[0][0] == 1 and cells[-1][1] == n
    for (a, b), (c, _) in zip(cells, cells[1:]):
        assert c == b + 1
    lengths = [b - a + 1 for a, b in cells]
    assert min(lengths) >= n // m and max(lengths) <= n // m + 1


@pytest.mark.parametrize("m", [0, 8, -1])
def test_cell_bounds_invalid(m):
    with pytest.raises(InputError):
        cell_bounds(7, m)


def test_model_rejects_short_cells():
    with pytest.raises(InputError):
        PartitionModel(10, 4, 2)  # cells of length 2 < r+1
    assert PartitionModel(12, 4, 2).dim == 12


def test_constant_fit_is_mean():
    y = np.array([1.0, 2.0, 3.0, 4.0])
    fit = fit_piecewise(y, PartitionModel(4, 1, 0))
    np.testing.assert_allclose(fit.fitted, 2.5)
    assert empirical_contrast(y, fit) == pytest.approx(1.25)


def test_piecewise_constant_is_reproduced():
    model = PartitionModel(10, 3, 0)
    y = np.repeat([1.0, -2.0, 7.0], model.lengths)
    fit = fit_piecewise(y, model)
    np.testing.assert_allclose(fit.fitted, y, atol=1e-14)
    assert empirical_contrast(y, fit) == pytest.approx(0.0, abs=1e-28)


def test_linear_cells_by_hand():
    # cell 1: exact line through (1,0),(2,1),(3,2) -> intercept -1, slope 1
    y = np.array([0.0, 1.0, 2.0, 5.0, 5.0, 5.0])
    fit = fit_piecewise(y, PartitionModel(6, 2, 1))
    np.testing.assert_allclose(fit.coefficients, [[-1.0, 1.0], [5.0, 0.0]], atol=1e-12)
    np.testing.assert_allclose(fit.fitted, y, atol=1e-12)
    np.testing.assert_allclose(fit.cell_values(1), [0.0, 1.0, 2.0], atol=1e-12)


def test_contrast_curve_small_example():
    y = [1.0, 2.0, 3.0, 4.0]
    # m=3 cells {1}, {2}, {3,4}: only the last cell leaves residuals (+-0.5)
    np.testing.assert_allclose(contrast_curve(y, 0, 4), [1.25, 0.25, 0.125, 0.0], atol=1e-15)


def test_contrast_curve_constant_is_zero():
    np.testing.assert_allclose(contrast_curve(np.full(50, 3.3), 1, 25), 0.0, atol=1e-24)


@settings(max_examples=40, deadline=None)
@given(
    st.integers(20, 120),
    st.integers(0, 3),
    st.integers(0, 2**32 - 1),
)
def test_fit_invariants(n, r, seed):
    rng = np.random.default_rng(seed)
    y = rng.standard_normal(n) * 3 + 1
    m = int(rng.integers(1, n // (r + 1) + 1))
    model = PartitionModel(n, m, r)
    fit = fit_piecewise(y, model)
    # agrees with a dense least-squares solve on the explicit design
    X = model.design()
    beta = np.linalg.lstsq(X, y, rcond=None)[0]
    np.testing.assert_allclose(fit.fitted, X @ beta, atol=1e-8)
    # idempotence
    np.testing.assert_allclose(fit_piecewise(fit.fitted, model).fitted, fit.fitted, atol=1e-9)
    # Pythagoras
    lhs = np.mean(y**2)
    rhs = np.mean(fit.fitted**2) + empirical_contrast(y, fit)
    assert lhs == pytest.approx(rhs, rel=1e-10)
    # cell polynomials evaluate to the fitted values
    for j in (1, m):
        a, b = model.edges[j - 1], model.edges[j]
        np.testing.assert_allclose(fit.cell_values(j), fit.fitted[a:b], atol=1e-7)


@pytest.mark.parametrize("n,m,r", [(12, 3, 1), (20, 4, 2), (30, 7, 3), (9, 9, 0)])
def test_dimension_equals_design_rank(n, m, r):
    model = PartitionModel(n, m, r)
    X = model.design()
    assert np.linalg.matrix_rank(X.T @ X) == model.dim == (r + 1) * m


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(0, 2))
def test_contrast_nesting(seed, r):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(40, 400))
    m_max = n // (r + 1)
    c = contrast_curve(rng.standard_normal(n), r, m_max)
    for m in range(1, m_max // 2 + 1):
        assert c[2 * m - 1] <= c[m - 1] + 1e-12


def test_contrast_curve_matches_refits():
    rng = np.random.default_rng(7)
    y = rng.standard_normal(97)
    c = contrast_curve(y, 1, 30)
    for m in (1, 5, 13, 30):
        fit = fit_piecewise(y, PartitionModel(97, m, 1))
        assert c[m - 1] == pytest.approx(empirical_contrast(y, fit), rel=1e-10)


def test_length_mismatch():
    with pytest.raises(InputError):
        fit_piecewise(np.zeros(5), PartitionModel(6, 2, 0))
