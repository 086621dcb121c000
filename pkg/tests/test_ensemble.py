import numpy as np
import pytest
from scipy import integrate, stats

from app.config import settings
from app.core.exceptions import GridTooCoarseException, InvalidIntervalException, ValidationException
from app.models.ensemble import EnsembleSample, SamplerMethod
from app.models.weight import WeightSpec
from app.services.ensemble_service import EnsembleService, integrated_autocorrelation_time, wrap_angle
from app.services.fredholm_service import FredholmService
from app.services.opuc_service import OpucService
from app.services.weight_service import WeightService


def one_point_cdf(w: WeightSpec):
    """CDF de θ para N = 1 (densidad f/∫f en (-π, π])"""
    grid = np.linspace(-np.pi, np.pi, 20001)
    density = WeightService.weight_eval(w, grid)
    cumulative = integrate.cumulative_trapezoid(density, grid, initial=0.0)
    return lambda theta: np.interp(theta, grid, cumulative / cumulative[-1])


def test_wrap_angle():
    values = wrap_angle(np.array([np.pi, -np.pi, 3 * np.pi, 0.5, -4.0]))
    assert values == pytest.approx([np.pi, np.pi, np.pi, 0.5, 2 * np.pi - 4.0])


class TestAutocorrelation:

    def test_independent_draws(self):
        rng = np.random.default_rng(1)
        assert integrated_autocorrelation_time(rng.standard_normal((8, 4000))) == pytest.approx(1.0, abs=0.3)

    def test_ar1_process(self):
        rng = np.random.default_rng(2)
        phi = 0.8
        x = np.zeros((8, 20000))
        noise = rng.standard_normal(x.shape)
        for t in range(1, x.shape[1]):
            x[:, t] = phi * x[:, t - 1] + noise[:, t]
        assert integrated_autocorrelation_time(x) == pytest.approx((1 + phi) / (1 - phi), rel=0.2)

    def test_short_series(self):
        assert integrated_autocorrelation_time(np.array([1.0])) == 1.0


class TestDppSampler:

    def test_single_point_distribution(self, pure_weight):
        stream = EnsembleService.sample_dpp_stream(pure_weight, 1, 2000, seed=11)
        assert stream.thetas.shape == (2000, 1)
        assert stats.kstest(stream.thetas[:, 0], one_point_cdf(pure_weight)).pvalue > 1e-3

    def test_two_point_mean_count(self, pure_weight):
        interval = (0.2, 1.0)
        stream = EnsembleService.sample_dpp_stream(pure_weight, 2, 4000, seed=5)
        estimate = EnsembleService.counting_statistics(stream, interval, 0.0)
        mean = float(np.sum(np.arange(estimate.counts.size) * estimate.probabilities))
        kernel = OpucService.exact_kernel(pure_weight, 2)
        expected, _ = integrate.quad(
            lambda t: OpucService.cd_kernel_msum(kernel, t, t).real / (2 * np.pi), *interval
        )
        spread = np.sqrt(np.sum(np.arange(estimate.counts.size) ** 2 * estimate.probabilities) - mean ** 2)
        assert abs(mean - expected) <= 4 * spread / np.sqrt(4000) + 2e-3

    def test_reproducible(self, smooth_weight):
        first = EnsembleService.sample_dpp_stream(smooth_weight, 8, 300, seed=42)
        second = EnsembleService.sample_dpp_stream(smooth_weight, 8, 300, seed=42)
        other = EnsembleService.sample_dpp_stream(smooth_weight, 8, 300, seed=43)
        assert np.array_equal(first.thetas, second.thetas)
        assert not np.array_equal(first.thetas, other.thetas)

    def test_single_draw(self, smooth_weight):
        sample = EnsembleService.sample_dpp(smooth_weight, 12, seed=3)
        assert isinstance(sample, EnsembleSample)
        assert sample.thetas.shape == (12,)
        assert np.all(np.diff(sample.thetas) >= 0.0)
        assert np.all((sample.thetas > -np.pi) & (sample.thetas <= np.pi))

    def test_stream_iterates_samples(self, pure_weight):
        stream = EnsembleService.sample_dpp_stream(pure_weight, 4, 10, seed=1)
        assert len(stream) == 10
        assert all(s.n == 4 for s in stream)
        assert stream.diagnostics.method == SamplerMethod.DPP
        assert stream.diagnostics.gram_deviation < 5e-2

    def test_repulsion_rejects_poisson(self, pure_weight):
        stream = EnsembleService.sample_dpp_stream(pure_weight, 32, 300, seed=9)
        assert EnsembleService.spacing_poisson_pvalue(stream) < 1e-6

    def test_grid_too_coarse(self, pure_weight):
        with pytest.raises(GridTooCoarseException) as exc:
            EnsembleService.sample_dpp_stream(pure_weight, 128, 1, grid_size=512)
        assert exc.value.exit_code == 3
        assert exc.value.extra_data["measure"] == "cell_phase"
        assert exc.value.extra_data["deviation"] > settings.dpp_max_cell_phase

    def test_finer_grid_resolves_largest_rank(self, pure_weight):
        sample = EnsembleService.sample_dpp(pure_weight, 128, grid_size=4096, seed=2)
        assert sample.thetas.shape == (128,)

    def test_gram_tolerance_from_settings(self, pure_weight, monkeypatch):
        monkeypatch.setattr(settings, "dpp_gram_tol", 1e-12)
        with pytest.raises(GridTooCoarseException) as exc:
            EnsembleService.sample_dpp_stream(pure_weight, 8, 1, grid_size=512)
        assert exc.value.extra_data["measure"] == "gram_deviation"

    def test_odd_grid_with_negative_alpha(self):
        w = WeightSpec.pure(-0.25)
        stream = EnsembleService.sample_dpp_stream(w, 8, 2, grid_size=513, seed=1)
        assert stream.diagnostics.grid_size == 514
        assert np.all(np.isfinite(stream.thetas))
        assert stream.diagnostics.gram_deviation < settings.dpp_gram_tol

    @pytest.mark.parametrize("kwargs", [{"n": 0}, {"n": 129}, {"n_samples": 0}, {"grid_size": 256}])
    def test_invalid_arguments(self, pure_weight, kwargs):
        arguments = {"n": 4, "n_samples": 10, **kwargs}
        with pytest.raises(ValidationException):
            EnsembleService.sample_dpp_stream(pure_weight, **arguments)


class TestMcmcSampler:

    def test_single_point_distribution(self, pure_weight):
        stream = EnsembleService.sample_mcmc(pure_weight, 1, 1600, seed=7)
        assert stream.thetas.shape == (1600, 1)
        assert stats.kstest(stream.thetas[:, 0], one_point_cdf(pure_weight)).pvalue > 1e-3

    def test_reproducible(self, complex_weight):
        first = EnsembleService.sample_mcmc(complex_weight, 4, 64, seed=42, burn_in=50)
        second = EnsembleService.sample_mcmc(complex_weight, 4, 64, seed=42, burn_in=50)
        assert np.array_equal(first.thetas, second.thetas)

    def test_diagnostics(self, pure_weight):
        stream = EnsembleService.sample_mcmc(pure_weight, 6, 128, seed=1, burn_in=100)
        diagnostics = stream.diagnostics
        assert diagnostics.method == SamplerMethod.MCMC
        assert 0.0 < diagnostics.acceptance_rate < 1.0
        assert 1 <= diagnostics.thinning <= 50
        assert 0.0 < diagnostics.effective_sample_size <= 128
        assert np.all(np.diff(stream.thetas, axis=1) >= 0.0)

    def test_two_points_in_arc(self):
        """P(θ₁, θ₂ ∈ A) frente a la cuadratura de |e^{iθ₁} - e^{iθ₂}|²/Z sobre A²"""
        lo, hi = -1.5, 1.5
        stream = EnsembleService.sample_mcmc(WeightSpec.pure(0.0), 2, 4000, seed=3)
        inside = np.all((stream.thetas > lo) & (stream.thetas < hi), axis=1)
        density = lambda a, b: 2.0 - 2.0 * np.cos(a - b)
        mass, _ = integrate.dblquad(density, lo, hi, lo, hi)
        expected = mass / (8.0 * np.pi ** 2)
        sigma = np.sqrt(expected * (1.0 - expected) / stream.diagnostics.effective_sample_size)
        assert abs(np.mean(inside) - expected) <= 3.0 * sigma

    def test_invalid_size(self, pure_weight):
        with pytest.raises(ValidationException):
            EnsembleService.sample_mcmc(pure_weight, 0, 10)


class TestCountingStatistics:

    def test_empty_and_full_intervals(self):
        thetas = np.sort(np.random.default_rng(0).uniform(-np.pi, np.pi, size=(50, 6)), axis=1)
        empty = EnsembleService.counting_statistics(thetas, (1.0, 1.0), 0.0)
        full = EnsembleService.counting_statistics(thetas, (-np.pi, np.pi), 0.0)
        assert empty.probability(0) == 1.0
        assert full.probability(6) == 1.0
        assert full.std_error(6) == 0.0
        assert full.probability(40) == 0.0

    def test_rescaled_interval(self):
        thetas = np.array([[-0.5, 0.01, 0.02, 2.0]])
        estimate = EnsembleService.counting_statistics(thetas, (0.0, 0.5), 2.0)
        # [0, 0.5/16]
        assert estimate.counts[2] == 1

    def test_invalid_intervals(self):
        thetas = np.zeros((2, 3))
        with pytest.raises(InvalidIntervalException):
            EnsembleService.counting_statistics(thetas, (1.0, 0.0), 0.0)
        with pytest.raises(InvalidIntervalException):
            EnsembleService.counting_statistics(thetas, (0.0, 4.0), 0.0)


@pytest.mark.slow
class TestEndToEnd:

    def test_gap_probabilities_against_fredholm(self, pure_weight, positive_kernel):
        interval, n = (0.5, 3.0), 64
        op = FredholmService.discretize(positive_kernel, interval)
        fredholm = [p.value for p in FredholmService.counting_distribution(op, 1)]
        dpp = EnsembleService.counting_statistics(
            EnsembleService.sample_dpp_stream(pure_weight, n, 20000, seed=17), interval, 1.0
        )
        mcmc_stream = EnsembleService.sample_mcmc(pure_weight, n, 4000, seed=18)
        mcmc = EnsembleService.counting_statistics(mcmc_stream, interval, 1.0)
        inflation = np.sqrt(4000 / mcmc_stream.diagnostics.effective_sample_size)
        for m in (0, 1):
            assert abs(dpp.probability(m) - fredholm[m]) <= max(3 * dpp.std_error(m), 0.02)
            combined = np.hypot(dpp.std_error(m), inflation * mcmc.std_error(m))
            assert abs(mcmc.probability(m) - dpp.probability(m)) <= 3 * combined + 0.01

    def test_intensity_matches_kernel_diagonal(self, pure_weight, positive_kernel):
        stream = EnsembleService.sample_dpp_stream(pure_weight, 64, 3000, seed=23)
        histogram = EnsembleService.intensity_histogram(stream, np.linspace(0.5, 4.5, 9), positive_kernel)
        assert histogram.centers.size == 8
        deviation = np.abs(histogram.density - histogram.predicted)
        assert np.all(deviation <= 3 * histogram.std_errors + 0.05 * histogram.predicted)

    def test_decay_slope(self, pure_weight):
        report = EnsembleService.shrinking_decay(
            pure_weight, [16, 32, 64], (0.5, 3.0), 2, 40000, seed=31, method=SamplerMethod.DPP, grid_size=2048
        )
        assert report.slope == pytest.approx(-1.5, abs=0.5)
        assert report.predicted_slope == pytest.approx(-1.5)


def test_intensity_histogram_without_kernel():
    thetas = np.tile(np.array([0.01, 0.02, 1.0, 2.0]), (10, 1))
    histogram = EnsembleService.intensity_histogram(thetas, [0.0, 0.1, 0.2])
    # Nθ = 0.04 y 0.08 caen en la primera celda
    assert histogram.density == pytest.approx([20.0, 0.0])
    assert np.all(np.isnan(histogram.predicted))
    assert histogram.std_errors == pytest.approx([0.0, 0.0])

