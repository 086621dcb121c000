import numpy as np
import pytest
from scipy import special

from app.core.exceptions import KernelDomainException
from app.core.quadrature import algebraic_integral
from app.models.kernel import Gauge, KernelBranch, LimitKernel
from app.models.weight import WeightSpec
from app.services.kernel_service import KernelService
from app.services.verification_service import VerificationService


def _beta(a, b):
    return special.gamma(a) * special.gamma(b) / special.gamma(a + b)


def _quadpack_psi(alpha, u):
    re = algebraic_integral(lambda x: np.cos(u * x), 0.0, 1.0, alpha - 1.0, alpha)
    im = algebraic_integral(lambda x: np.sin(u * x), 0.0, 1.0, alpha - 1.0, alpha)
    return complex(re, im)


def _quadpack_psi_tilde(alpha, u):
    """∫_0^1 x^{α-1}((1-x)^α e^{-iux} - 1) dx + 1/α partido en 1/2"""
    def head(x, part):
        value = (np.exp(alpha * np.log1p(-x) - 1j * u * x) - 1.0) / x if x > 0 else -alpha - 1j * u
        return part(value)

    def tail(x, part):
        return part(x ** (alpha - 1.0) * np.exp(-1j * u * x))

    value = 0j
    for part, unit in ((np.real, 1.0), (np.imag, 1j)):
        value += unit * algebraic_integral(lambda x: head(x, part), 0.0, 0.5, alpha, 0.0)
        value += unit * algebraic_integral(lambda x: tail(x, part), 0.5, 1.0, 0.0, alpha)
    return value - (1.0 - 0.5 ** alpha) / alpha + 1.0 / alpha


class TestSpecialFunctions:

    def test_values_at_zero(self):
        assert KernelService.psi(0.25, 0.0) == pytest.approx(_beta(0.25, 1.25), rel=1e-10)
        assert KernelService.psi(0.25, 0.0) == pytest.approx(3.708149, abs=1e-5)
        assert KernelService.tau(0.25, 0.0) == pytest.approx(0.618022, abs=1e-5)
        assert KernelService.psi_tilde(-0.25, 0.0) == pytest.approx(_beta(-0.25, 0.75), rel=1e-10)

    @pytest.mark.parametrize("alpha", [0.1, 0.25, 0.45])
    @pytest.mark.parametrize("u", [-7.0, 0.5, 3.0, 20.0])
    def test_psi_against_quadpack(self, alpha, u):
        assert KernelService.psi(alpha, u) == pytest.approx(_quadpack_psi(alpha, u), rel=1e-9, abs=1e-12)

    @pytest.mark.parametrize("alpha", [-0.45, -0.25, -0.1])
    @pytest.mark.parametrize("u", [-4.0, 0.5, 6.0])
    def test_psi_tilde_against_quadpack(self, alpha, u):
        assert KernelService.psi_tilde(alpha, u) == pytest.approx(_quadpack_psi_tilde(alpha, u), rel=1e-8)

    def test_conjugate_symmetry(self):
        u = np.array([0.3, 2.0, 9.0])
        assert KernelService.psi(0.25, -u) == pytest.approx(np.conj(KernelService.psi(0.25, u)))
        assert KernelService.tau(-0.25, -u) == pytest.approx(np.conj(KernelService.tau(-0.25, u)))
        assert KernelService.psi_tilde(-0.25, -u) == pytest.approx(np.conj(KernelService.psi_tilde(-0.25, u)))

    def test_domains(self):
        with pytest.raises(KernelDomainException):
            KernelService.psi(-0.1, 1.0)
        with pytest.raises(KernelDomainException):
            KernelService.psi_tilde(0.1, 1.0)
        with pytest.raises(KernelDomainException):
            KernelService.tau(0.5, 1.0)


class TestLimitKernelModel:

    def test_branch_selection(self):
        assert LimitKernel.for_alpha(0.2).branch == KernelBranch.POSITIVE_ALPHA
        assert LimitKernel.for_alpha(-0.2).branch == KernelBranch.NEGATIVE_ALPHA

    @pytest.mark.parametrize("alpha", [0.0, 0.5, -0.6])
    def test_invalid_alpha(self, alpha):
        with pytest.raises(KernelDomainException):
            LimitKernel.for_alpha(alpha)

    def test_branch_mismatch(self):
        with pytest.raises(KernelDomainException):
            LimitKernel(alpha=0.2, branch=KernelBranch.NEGATIVE_ALPHA)


class TestKernel:

    @pytest.fixture(params=[0.25, -0.25])
    def kernel(self, request):
        return LimitKernel.for_alpha(request.param)

    def test_hermitian(self, kernel):
        grid = np.array([-3.0, -1.1, -0.2, 0.3, 0.9, 2.4])
        matrix = KernelService.kernel_matrix(kernel, grid, grid)
        assert matrix == pytest.approx(matrix.conj().T, abs=1e-12)
        assert np.abs(np.diag(matrix).imag).max() == 0.0

    @pytest.mark.parametrize("u", [-2.0, 0.4, 1.5, 5.0])
    def test_diagonal_matches_off_diagonal_limit(self, kernel, u):
        assert KernelService.diagonal_limit(kernel, u).real == pytest.approx(
            KernelService.diagonal(kernel, u), rel=1e-6
        )

    def test_diagonal_variants_report(self, kernel):
        variants = KernelService.diagonal_variants(kernel, 1.3)
        assert set(variants) == {"limit", "analytic", "modulus_minus_cross", "cross_only"}
        assert variants["analytic"] == pytest.approx(variants["limit"], rel=1e-6)
        assert variants["modulus_minus_cross"] == pytest.approx(variants["limit"], rel=1e-6)

    def test_diagonal_limit_near_origin(self, kernel):
        u = -4e-4
        limit = KernelService.diagonal_limit(kernel, u).real
        assert limit == pytest.approx(KernelService.diagonal(kernel, u), rel=5e-2)

    def test_origin_is_excluded(self, kernel):
        with pytest.raises(KernelDomainException):
            KernelService.diagonal(kernel, 0.0)
        with pytest.raises(KernelDomainException):
            KernelService.kernel_eval(kernel, 0.0, 1.0)

    def test_large_u_tends_to_one(self, kernel):
        assert KernelService.diagonal(kernel, 200.0) == pytest.approx(1.0, abs=0.05)

    def test_theorem_gauge_is_a_phase_conjugation(self):
        proof = LimitKernel.for_alpha(0.25)
        theorem = LimitKernel.for_alpha(0.25, gauge=Gauge.THEOREM)
        value = KernelService.kernel_eval(theorem, 0.7, 2.1)
        assert value == pytest.approx(np.exp(1j * 0.7) * KernelService.kernel_eval(proof, 0.7, 2.1) * np.exp(-2.1j))
        assert KernelService.diagonal(proof, 0.7) == pytest.approx(KernelService.kernel_eval(theorem, 0.7, 0.7).real)

    def test_c_factor(self):
        plain = LimitKernel.for_alpha(0.25, c1_at_1_sq=1.69)
        scaled = LimitKernel.for_alpha(0.25, c1_at_1_sq=1.69, apply_c_factor=True)
        assert KernelService.diagonal(scaled, 1.0) == pytest.approx(KernelService.diagonal(plain, 1.0) / 1.69)


def test_small_u_intensity():
    k = LimitKernel.for_alpha(0.25)
    u = 1e-4
    psi0, tau0 = _beta(0.25, 1.25), _beta(1.25, 1.25)
    expected = (psi0 ** 2 - 2 * psi0 * tau0) / special.gamma(0.25) ** 2
    assert KernelService.diagonal(k, u) / u ** 0.5 == pytest.approx(expected, rel=1e-3)
    assert expected == pytest.approx(0.698, abs=1e-3)


@pytest.mark.parametrize("alpha", [0.25, -0.25])
@pytest.mark.parametrize("u, v", [(1.0, 2.0), (0.5, 3.0), (1.5, 1.5)])
def test_rescaled_christoffel_darboux_limit(alpha, u, v):
    w = WeightSpec.pure(alpha)
    k = LimitKernel.for_alpha(alpha)
    exact = VerificationService.rescaled_exact_kernel(w, 2048, u, v)
    assert abs(exact / KernelService.kernel_eval(k, u, v) - 1.0) <= 0.05
