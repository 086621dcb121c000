import numpy as np
import pytest

from app.core.exceptions import NormInconsistencyException, OracleSizeException, ValidationException
from app.models.weight import WeightSpec
from app.services.toeplitz_service import ToeplitzService
from tests.conftest import pure_h

ALPHAS = [-0.4, -0.25, 0.1, 0.25, 0.4]


def _weights(alpha):
    return [WeightSpec.pure(alpha), WeightSpec.from_one_sided(alpha, [1.0, 0.2 + 0.1j, 0.05j])]


@pytest.mark.parametrize("n", [8, 16, 32, 64])
@pytest.mark.parametrize("alpha", ALPHAS)
def test_levinson_matches_dense_solve(n, alpha):
    for w in _weights(alpha):
        levinson = ToeplitzService.levinson_first_column(w, n).first_col
        dense = ToeplitzService.dense_inverse_column(w, n)
        assert np.max(np.abs(levinson - dense)) <= 1e-9 * np.max(np.abs(dense))


@pytest.mark.parametrize("alpha", [-0.25, 0.25])
def test_last_column_via_symmetry(alpha):
    w = WeightSpec.from_one_sided(alpha, [1.0, 0.2 + 0.1j, 0.05j])
    p = ToeplitzService.levinson_first_column(w, 24)
    dense = ToeplitzService.dense_inverse_column(w, 24, which="last")
    assert ToeplitzService.last_column_via_symmetry(p) == pytest.approx(dense, abs=1e-11)


@pytest.mark.parametrize("alpha", [-0.3, 0.1, 0.25])
def test_pure_verblunsky_and_norms(alpha):
    n = 40
    p = ToeplitzService.levinson_first_column(WeightSpec.pure(alpha), n)
    m = np.arange(n)
    assert p.verblunsky == pytest.approx(-alpha / (m + 1.0 + alpha), abs=1e-13)
    assert p.norms == pytest.approx([pure_h(alpha, k) for k in range(n + 1)], rel=1e-12)
    assert p.h == pytest.approx(1.0 / p.norm11)


def test_pure_far_entry(pure_weight):
    n = 50
    p = ToeplitzService.levinson_first_column(pure_weight, n)
    assert p.first_col[n] == pytest.approx(p.first_col[0] * 0.25 / (n + 0.25), rel=1e-12)


def test_residual(smooth_weight):
    system = ToeplitzService.toeplitz_system(smooth_weight, 128)
    p = ToeplitzService.levinson(system)
    assert ToeplitzService.residual(system, p) < 1e-10


def test_toeplitz_matrix_layout(smooth_weight):
    system = ToeplitzService.toeplitz_system(smooth_weight, 3)
    matrix = system.matrix()
    # T_ij = f̂(i - j)
    assert matrix[2, 0] == pytest.approx(system.coefficient(2))
    assert matrix[0, 2] == pytest.approx(system.coefficient(-2))
    x = np.arange(4.0)
    assert system.matvec(x) == pytest.approx(matrix @ x)


@pytest.mark.parametrize("m", [0, 5, 20, 80])
def test_norm_h_two_ways(complex_weight, m):
    from_column, from_quadrature = ToeplitzService.norm_h_values(complex_weight, m)
    assert from_column == pytest.approx(from_quadrature, rel=1e-8)
    assert ToeplitzService.norm_h(complex_weight, m) == pytest.approx(from_column)


def test_norm_h_inconsistency(monkeypatch, pure_weight):
    monkeypatch.setattr(ToeplitzService, "norm_h_values", staticmethod(lambda w, m, p=None: (1.0, 1.1)))
    with pytest.raises(NormInconsistencyException) as exc:
        ToeplitzService.norm_h(pure_weight, 3)
    assert exc.value.extra_data["from_quadrature"] == 1.1


def test_dense_oracle_size_guard(pure_weight):
    with pytest.raises(OracleSizeException):
        ToeplitzService.dense_inverse_column(pure_weight, 5000)


def test_invalid_arguments(pure_weight):
    with pytest.raises(ValidationException):
        ToeplitzService.dense_inverse_column(pure_weight, 4, which="middle")
    with pytest.raises(ValidationException):
        ToeplitzService.toeplitz_system(pure_weight, -1)
    with pytest.raises(ValidationException):
        ToeplitzService.norm_h_values(pure_weight, -1)


def test_order_zero(pure_weight):
    p = ToeplitzService.levinson_first_column(pure_weight, 0)
    assert p.verblunsky.size == 0
    assert p.first_col[0] == pytest.approx(1.0 / 1.0787053, rel=1e-6)
