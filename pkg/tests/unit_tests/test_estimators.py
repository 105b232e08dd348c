import numpy as np
import pytest

from estimators import (
    ConfidenceInterval,
    estimate_at,
    functional_ci,
    knn_regression,
    local_linear_ci,
    local_linear_fit,
    normal_quantile,
)
from geometry import Norm, NormKind
from measure import SampleSet, constant, identity, integrate, knn_measure
from util.errors import InvalidArgumentError


@pytest.fixture
def alternating_sample():
    """Responses +5, -5, +5, ... at covariates 0, 1, 2, ..."""
    n = 400
    return SampleSet.from_arrays(np.arange(n, dtype=float).reshape(-1, 1), 5.0 * (-1.0) ** np.arange(n))


@pytest.fixture
def linear_sample():
    generator = np.random.default_rng(23)
    x = generator.random((60, 1))
    return SampleSet.from_arrays(x, 2.0 + 3.0 * x[:, 0])


class TestKnnRegression:

    def test_constant_responses(self, random_sample):
        sample = SampleSet(random_sample.covariates, np.full(random_sample.size, 4.25))
        assert knn_regression(sample, [0.5, 0.5], 9) == pytest.approx(4.25, rel=1e-15)

    def test_line_sample(self, line_sample):
        assert knn_regression(line_sample, [0.0], 2) == 15.0

    def test_matches_the_measure(self, random_sample):
        measure = knn_measure(random_sample, [0.1, 0.9], 11)
        expected = sum(random_sample.responses[i] for i in measure.in_ball) / 11
        assert knn_regression(random_sample, [0.1, 0.9], 11) == pytest.approx(expected, rel=1e-12)


class TestLocalLinearFit:

    def test_exact_on_linear_data(self, linear_sample):
        fit = local_linear_fit(linear_sample, [0.4], 10, sigma2=1.0)
        assert fit.alpha == pytest.approx(2.0 + 3.0 * 0.4, rel=1e-10)
        assert fit.beta[0] == pytest.approx(3.0, rel=1e-10)
        assert not fit.rank_deficient

    def test_single_neighbor_at_a_sample_point(self, linear_sample):
        x = linear_sample.covariates.points[5]
        fit = local_linear_fit(linear_sample, x, 1, sigma2=1.0)
        assert fit.alpha == pytest.approx(linear_sample.responses[5], rel=1e-12)
        assert abs(fit.beta[0]) < 1e-15
        assert fit.rank == 1
        assert fit.rank_deficient

    def test_minimizes_the_local_objective(self, random_sample):
        x = np.array([0.5, 0.5])
        fit = local_linear_fit(random_sample, x, 20, sigma2=1.0)
        measure = knn_measure(random_sample, x, 20)
        offsets = measure.in_ball_covariates - x
        y = measure.in_ball_responses

        def objective(alpha, beta):
            return np.sum((y - alpha - offsets @ beta) ** 2) / 20

        best = objective(fit.alpha, fit.beta)
        generator = np.random.default_rng(0)
        alphas = fit.alpha + generator.normal(scale=0.5, size=10000)
        betas = fit.beta + generator.normal(scale=2.0, size=(10000, 2))
        assert all(best <= objective(a, b) + 1e-12 for a, b in zip(alphas, betas))

    def test_affine_equivariance(self, random_sample):
        x = [0.3, 0.6]
        base = local_linear_fit(random_sample, x, 25, sigma2=1.0)
        shifted = local_linear_fit(SampleSet(random_sample.covariates, -2.0 * random_sample.responses + 7.0),
                                   x, 25, sigma2=1.0)
        assert shifted.alpha == pytest.approx(-2.0 * base.alpha + 7.0, rel=1e-10)
        assert np.allclose(shifted.beta, -2.0 * base.beta, rtol=1e-10, atol=1e-12)

    def test_single_neighbor_off_the_sample(self, line_sample):
        fit = local_linear_fit(line_sample, [0.4], 1, sigma2=1.0)
        assert fit.alpha == pytest.approx(10.0, rel=1e-15)
        assert fit.beta.tolist() == [0.0]
        assert fit.rank_deficient

    def test_affine_equivariance_when_rank_deficient(self):
        generator = np.random.default_rng(31)
        sample = SampleSet.from_arrays(generator.random((50, 3)), generator.normal(size=50))
        x = [0.5, 0.5, 0.5]
        base = local_linear_fit(sample, x, 2, sigma2=1.0)
        assert base.rank_deficient
        shifted = local_linear_fit(SampleSet(sample.covariates, sample.responses + 100.0), x, 2, sigma2=1.0)
        assert shifted.alpha == pytest.approx(base.alpha + 100.0, rel=1e-10)
        assert np.allclose(shifted.beta, base.beta, rtol=1e-10, atol=1e-12)
        scaled = local_linear_fit(SampleSet(sample.covariates, -2.0 * sample.responses + 7.0), x, 2, sigma2=1.0)
        assert scaled.alpha == pytest.approx(-2.0 * base.alpha + 7.0, rel=1e-10)
        assert np.allclose(scaled.beta, -2.0 * base.beta, rtol=1e-10, atol=1e-12)

    def test_rank_deficient_fit_interpolates(self):
        generator = np.random.default_rng(31)
        sample = SampleSet.from_arrays(generator.random((50, 3)), generator.normal(size=50))
        x = np.array([0.5, 0.5, 0.5])
        fit = local_linear_fit(sample, x, 2, sigma2=1.0)
        measure = knn_measure(sample, x, 2)
        fitted = fit.alpha + (measure.in_ball_covariates - x) @ fit.beta
        assert np.allclose(fitted, measure.in_ball_responses, atol=1e-10)

    def test_intercept_only_reproduces_regression(self, random_sample):
        fit = local_linear_fit(random_sample, [0.2, 0.2], 13, sigma2=1.0, intercept_only=True)
        assert fit.alpha == knn_regression(random_sample, [0.2, 0.2], 13)
        assert fit.beta.tolist() == [0.0, 0.0]
        assert not fit.rank_deficient

    def test_gram_first_row(self, random_sample):
        x = np.array([0.7, 0.4])
        fit = local_linear_fit(random_sample, x, 16, sigma2=1.0)
        measure = knn_measure(random_sample, x, 16)
        assert fit.gram[0, 0] == pytest.approx(measure.in_ball_count / 16)
        assert np.allclose(fit.gram[0, 1:], np.sum(measure.in_ball_covariates - x, axis=0) / 16, atol=1e-15)
        assert np.allclose(fit.gram[:, 0], fit.gram[0, :])

    def test_pseudo_inverse_identity(self, random_sample):
        for k in (1, 2, 3, 30):
            fit = local_linear_fit(random_sample, [0.5, 0.5], k, sigma2=1.0)
            gram = fit.gram
            assert np.allclose(gram, gram.T)
            assert np.all(np.linalg.eigvalsh(gram) >= -1e-12)
            assert np.allclose(gram @ fit.gram_pseudo_inverse @ gram, gram, rtol=1e-8, atol=1e-12)

    def test_variance_is_sigma2_times_pinv(self, random_sample):
        fit = local_linear_fit(random_sample, [0.5, 0.5], 30, sigma2=0.3)
        assert np.allclose(fit.variance, 0.3 * fit.gram_pseudo_inverse)

    def test_rejects_negative_sigma2(self, random_sample):
        with pytest.raises(InvalidArgumentError):
            local_linear_fit(random_sample, [0.5, 0.5], 5, sigma2=-1.0)


class TestIntervals:

    def test_normal_quantile(self):
        assert normal_quantile(0.975) == pytest.approx(1.959963984540054, rel=1e-12)
        with pytest.raises(InvalidArgumentError):
            normal_quantile(1.0)

    def test_constant_functional_has_zero_width(self, random_sample):
        interval = functional_ci(random_sample, [0.5, 0.5], 10, constant(3.0), 0.95)
        assert interval.half_width == 0.0
        assert interval.contains(3.0)

    def test_half_width_from_variance(self, alternating_sample):
        interval = functional_ci(alternating_sample, [0.0], 100, identity(), 0.95)
        assert interval.center == 0.0
        assert interval.half_width == pytest.approx(1.959963984540054 * 0.5, rel=1e-10)

    def test_half_width_scales_as_inverse_root_k(self, alternating_sample):
        small = functional_ci(alternating_sample, [0.0], 100, identity(), 0.9)
        large = functional_ci(alternating_sample, [0.0], 400, identity(), 0.9)
        assert small.half_width == pytest.approx(2.0 * large.half_width, rel=1e-12)

    def test_negative_variance_is_clamped(self, square_corners):
        sample = SampleSet.from_arrays(square_corners, [1.0, 1.0, 1.0, 1.0])
        interval = functional_ci(sample, [0.0, 0.0], 2, identity(), 0.95, Norm(NormKind.CHEBYSHEV, 2))
        assert interval.variance_clamped
        assert interval.half_width == 0.0

    @pytest.mark.parametrize("level", [0.0, 1.0, 1.2])
    def test_level_outside_unit_interval(self, random_sample, level):
        with pytest.raises(InvalidArgumentError):
            functional_ci(random_sample, [0.5, 0.5], 10, identity(), level)

    def test_local_linear_interval(self, random_sample):
        fit = local_linear_fit(random_sample, [0.5, 0.5], 40, sigma2=0.5)
        interval = local_linear_ci(fit, 0.9)
        expected = normal_quantile(0.95) * np.sqrt(0.5 * fit.gram_pseudo_inverse[0, 0] / 40)
        assert interval.center == fit.alpha
        assert interval.half_width == pytest.approx(expected, rel=1e-12)

    def test_contains_is_closed(self):
        interval = ConfidenceInterval(center=1.0, half_width=0.5, level=0.95)
        assert interval.contains(0.5) and interval.contains(1.5)
        assert not interval.contains(1.5001)


class TestEstimateAt:

    def test_mean_token(self, line_sample):
        result = estimate_at(line_sample, [0.0], 2, "mean")
        assert result.value == 15.0
        assert result.radius == 1.0
        assert result.in_ball_count == 2
        assert result.interval is None

    def test_cdf_and_quantile_tokens(self, line_sample):
        assert estimate_at(line_sample, [0.0], 2, "cdf:10").value == 0.5
        assert estimate_at(line_sample, [0.0], 2, "quantile:0.75").value == 20.0

    def test_interval_when_level_given(self, random_sample):
        result = estimate_at(random_sample, [0.5, 0.5], 10, "mean", level=0.95)
        measure = knn_measure(random_sample, [0.5, 0.5], 10)
        assert result.interval.center == pytest.approx(integrate(measure, identity()))

    def test_loclin_needs_sigma2(self, random_sample):
        with pytest.raises(InvalidArgumentError):
            estimate_at(random_sample, [0.5, 0.5], 10, "loclin")
        result = estimate_at(random_sample, [0.5, 0.5], 10, "loclin", level=0.9, sigma2=1.0)
        assert len(result.beta) == 2
        assert result.interval is not None

    @pytest.mark.parametrize("token", ["quantile:1.5", "quantile:x", "median"])
    def test_bad_tokens(self, line_sample, token):
        with pytest.raises(InvalidArgumentError):
            estimate_at(line_sample, [0.0], 2, token)
