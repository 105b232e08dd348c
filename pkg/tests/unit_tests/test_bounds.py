import logging
import math

import numpy as np
import pytest
from pydantic import ValidationError

from bounds import (
    BoundInputs,
    admissible_k_window,
    chernoff_lower,
    chernoff_upper,
    deterministic_radius,
    evaluate_bounds,
    local_process_bound,
    uniform_ball_bound,
    uniform_error_bound,
    uniform_error_terms,
    uniform_radius_bound,
    vc_concentration_bound,
)
from geometry import NormKind
from util.errors import InvalidArgumentError


class TestBoundInputs:

    def test_derived_constants(self):
        inputs = BoundInputs(d=2, n=1000, v=2.0, b_X=0.5, U_X=2.0, c=0.25)
        assert inputs.theta == 5.0
        assert inputs.kappa_X == 16.0
        assert inputs.volume == pytest.approx(math.pi, rel=1e-15)
        assert BoundInputs(d=3, n=10, norm=NormKind.CHEBYSHEV).volume == 8.0
        assert BoundInputs(d=3, n=10, V_d=1.5).volume == 1.5

    @pytest.mark.parametrize("fields", [
        {"b_X": 2.0, "U_X": 1.0},
        {"K": 0.5},
        {"A": 0.9},
        {"c": 1.5},
        {"delta": 1.0},
        {"unknown": 1.0},
    ])
    def test_rejects_invalid_constants(self, fields):
        with pytest.raises(ValidationError):
            BoundInputs(d=1, n=100, **fields)


class TestRadii:

    def test_deterministic_radius(self):
        assert deterministic_radius(BoundInputs(d=1, n=10000, k=100, f_x=1.0)) == pytest.approx(0.005, rel=1e-12)
        assert deterministic_radius(BoundInputs(d=3, n=50, k=50, f_x=0.25, V_d=4.0)) == pytest.approx(1.0, rel=1e-12)
        expected = math.sqrt(314 / (1e4 * math.pi))
        assert deterministic_radius(BoundInputs(d=2, n=10000, k=314, f_x=1.0)) == pytest.approx(expected, rel=1e-10)
        assert expected == pytest.approx(0.09997, abs=1e-5)

    def test_deterministic_radius_needs_density(self):
        with pytest.raises(InvalidArgumentError):
            deterministic_radius(BoundInputs(d=1, n=100, k=10))

    def test_uniform_radius_bound(self):
        assert uniform_radius_bound(BoundInputs(d=1, n=10000, k=100)) == pytest.approx(0.01, rel=1e-12)

    @pytest.mark.parametrize("d, k, n, b_X", [(1, 10, 1000, 0.5), (2, 77, 12345, 0.9), (4, 300, 10 ** 6, 1.0)])
    def test_ratio_to_deterministic_radius(self, d, k, n, b_X):
        inputs = BoundInputs(d=d, n=n, k=k, b_X=b_X, U_X=1.0, c=1.0, f_x=b_X)
        assert uniform_radius_bound(inputs) / deterministic_radius(inputs) == pytest.approx(2.0 ** (1.0 / d), rel=1e-12)

    def test_three_dimensional_calculator_value(self):
        inputs = BoundInputs(d=3, n=5000, k=40, b_X=0.3, U_X=2.0, c=0.125)
        expected = (2 * 40 / (5000 * 0.3 * 0.125 * 4.0 * math.pi / 3.0)) ** (1.0 / 3.0)
        assert uniform_radius_bound(inputs) == pytest.approx(expected, rel=1e-12)


class TestAdmissibleWindow:

    def test_lower_end(self):
        window = admissible_k_window(BoundInputs(d=1, n=10 ** 6, delta=0.05))
        assert window.k_min == pytest.approx(24.0 * math.log(24e6 / 0.05), rel=1e-12)
        assert window.k_min == pytest.approx(479.7, abs=0.1)
        assert window.radius_k_min == pytest.approx(24.0 * math.log(12e6 / 0.05), rel=1e-12)

    def test_zero_variance_leaves_the_radius_cap(self):
        window = admissible_k_window(BoundInputs(d=2, n=10 ** 5, sigma2_G=0.0, c=0.25, T=1.0))
        assert window.k_max == pytest.approx(10 ** 5 * 0.25 * math.pi / 2.0, rel=1e-12)
        assert window.k_max == window.radius_k_max

    def test_variance_cap(self):
        window = admissible_k_window(BoundInputs(d=1, n=10 ** 5, sigma2_G=100.0, U_X=2.0, b_X=1.0))
        assert window.k_max == pytest.approx(10 ** 5 * 8.0 / (100.0 * 2.0), rel=1e-12)

    def test_growth_in_n(self):
        small = admissible_k_window(BoundInputs(d=1, n=10 ** 5))
        large = admissible_k_window(BoundInputs(d=1, n=2 * 10 ** 5))
        assert large.k_max == pytest.approx(2.0 * small.k_max, rel=1e-12)
        assert large.k_min - small.k_min == pytest.approx(24.0 * math.log(2.0), rel=1e-10)

    def test_empty_window_is_reported(self):
        window = evaluate_bounds(BoundInputs(d=1, n=100, k=10)).window
        assert window.is_empty
        assert not window.contains(10)

    def test_projection(self):
        window = admissible_k_window(BoundInputs(d=1, n=10 ** 5))
        assert window.project(1) == math.ceil(window.k_min)
        assert window.project(10 ** 9) == math.floor(window.k_max)
        assert window.project(1000) == 1000


class TestUniformErrorBound:

    def test_only_bernstein_term_without_variance_and_bias(self):
        inputs = BoundInputs(d=1, n=10 ** 5, k=2000, v=2.0, A=1.0, K=1.5)
        expected = 1.5 * (4.0 / 2000) * math.log(1.5 * 1.0 * 10 ** 5 / 0.05)
        assert uniform_error_bound(inputs) == pytest.approx(expected, rel=1e-12)

    def test_full_formula(self):
        inputs = BoundInputs(d=2, n=10 ** 6, k=5000, v=2.0, A=3.0, sigma2_G=0.25, L=2.0,
                             b_X=0.5, U_X=1.5, c=0.25, K=2.0)
        log_factor = math.log(2.0 * 3.0 * 10 ** 6 / 0.05)
        theta = 5.0
        expected = 2.0 * (math.sqrt(0.25 * theta / 5000 * log_factor) + theta / 5000 * log_factor
                          + 2.0 * math.sqrt(5000 / (10 ** 6 * 0.25 * 0.5 * math.pi)))
        assert uniform_error_bound(inputs) == pytest.approx(expected, rel=1e-12)
        assert sum(uniform_error_terms(inputs)) * 2.0 == pytest.approx(expected, rel=1e-12)

    def test_depends_on_A_and_delta_through_their_ratio(self):
        first = BoundInputs(d=1, n=10 ** 4, k=500, A=2.0, delta=0.25, sigma2_G=0.2, L=1.0)
        second = BoundInputs(d=1, n=10 ** 4, k=500, A=1.0, delta=0.125, sigma2_G=0.2, L=1.0)
        assert uniform_error_bound(first) == uniform_error_bound(second)

    def test_terms_move_in_opposite_directions_in_k(self):
        terms = [uniform_error_terms(BoundInputs(d=1, n=10 ** 6, k=k, sigma2_G=0.25, L=1.0))
                 for k in (1000, 2000, 4000)]
        assert terms[0][0] > terms[1][0] > terms[2][0]
        assert terms[0][1] > terms[1][1] > terms[2][1]
        assert terms[0][2] < terms[1][2] < terms[2][2]

    def test_optimal_k_grows_like_n_to_two_thirds(self):
        log_n, log_k = [], []
        for n in (10 ** 6, 10 ** 7, 10 ** 8, 10 ** 9):
            base = BoundInputs(d=1, n=n, k=1, sigma2_G=1.0, L=1.0)
            ks = np.unique(np.geomspace(1, n, 4000).astype(int))
            values = [sum(uniform_error_terms(base.model_copy(update={"k": int(k)}))) for k in ks]
            log_n.append(math.log(n))
            log_k.append(math.log(ks[int(np.argmin(values))]))
        slope = np.polyfit(log_n, log_k, 1)[0]
        assert slope == pytest.approx(2.0 / 3.0, abs=0.1)

    def test_warns_outside_the_window(self, caplog):
        with caplog.at_level(logging.WARNING):
            uniform_error_bound(BoundInputs(d=1, n=100, k=10))
        assert any("[bounds]" in message for message in caplog.messages)

    def test_local_process_bound(self):
        inputs = BoundInputs(d=1, n=10 ** 5, k=1000, sigma2_G=0.25, U_X=2.0, b_X=1.0, c=0.5)
        log_factor = math.log(10 ** 5 / 0.05)
        expected = math.sqrt(4.0 * 0.25 * 4.0 * 1000 * log_factor) + 4.0 * log_factor
        assert local_process_bound(inputs) == pytest.approx(expected, rel=1e-12)


class TestConcentrationBounds:

    def test_chernoff_calculator_value(self):
        assert chernoff_lower(200.0, 0.05) == pytest.approx(200.0 - math.sqrt(2.0 * math.log(20.0) * 200.0), rel=1e-12)
        assert chernoff_lower(200.0, 0.05) == pytest.approx(165.4, abs=0.05)
        assert chernoff_upper(200.0, 0.05) == pytest.approx(200.0 + math.sqrt(3.0 * math.log(20.0) * 200.0), rel=1e-12)

    def test_chernoff_brackets_the_mean(self):
        for mu in (0.5, 3.0, 50.0, 1e4):
            for delta in (0.01, 0.3, 0.9):
                assert chernoff_lower(mu, delta) < mu < chernoff_upper(mu, delta)

    def test_chernoff_tends_to_the_mean(self):
        assert chernoff_lower(50.0, 1.0 - 1e-12) == pytest.approx(50.0, rel=1e-4)
        assert chernoff_upper(50.0, 1.0 - 1e-12) == pytest.approx(50.0, rel=1e-4)

    def test_chernoff_lower_may_be_negative(self):
        assert chernoff_lower(0.5, 0.01) < 0.0

    def test_chernoff_rejects_bad_arguments(self):
        with pytest.raises(InvalidArgumentError):
            chernoff_lower(0.0, 0.1)
        with pytest.raises(InvalidArgumentError):
            chernoff_upper(1.0, 1.5)

    def test_chernoff_lower_holds_in_simulation(self):
        generator = np.random.default_rng(2024)
        n, p, delta = 10 ** 4, 0.02, 0.05
        draws = generator.binomial(n, p, size=10 ** 5)
        assert np.mean(draws < chernoff_lower(n * p, delta)) <= delta

    def test_uniform_ball_bound_vanishes_at_its_threshold(self):
        n, d, delta = 10 ** 4, 2, 0.05
        P_B = 12.0 * d * math.log(12.0 * n / delta) / n
        assert uniform_ball_bound(P_B, n, d, delta) == pytest.approx(0.0, abs=1e-15)

    def test_uniform_ball_bound_calculator_value(self):
        expected = 0.01 * (1.0 - math.sqrt(24.0 * math.log(12e5 / 0.05) / (1e5 * 0.01)))
        assert uniform_ball_bound(0.01, 10 ** 5, 2, 0.05) == pytest.approx(expected, rel=1e-12)

    @pytest.mark.parametrize("P_B", [1e-4, 0.01, 0.5, 1.0])
    def test_uniform_ball_bound_below_probability(self, P_B):
        assert uniform_ball_bound(P_B, 10 ** 4, 3, 0.1) <= P_B

    def test_vc_calculator_value(self):
        log_factor = math.log(2.0 * 1.0 / 0.1)
        expected = 2.0 * (math.sqrt(100 * log_factor) + log_factor)
        assert vc_concentration_bound(100, 1.0, 1.0, 1.0, 1.0, 0.1, K_prime=2.0) == pytest.approx(expected, rel=1e-12)

    def test_vc_is_increasing(self):
        base = vc_concentration_bound(100, 2.0, 1.0, 1.0, 0.5, 0.1)
        assert vc_concentration_bound(200, 2.0, 1.0, 1.0, 0.5, 0.1) > base
        assert vc_concentration_bound(100, 3.0, 1.0, 1.0, 0.5, 0.1) > base
        assert vc_concentration_bound(100, 2.0, 1.0, 2.0, 0.5, 0.1) > base

    def test_vc_variance_term_vanishes(self):
        sigma = 1e-12
        remainder = 1.0 * 2.0 * math.log(1.0 / (sigma * 0.1))
        assert vc_concentration_bound(100, 2.0, 1.0, 1.0, sigma, 0.1) - remainder < 1e-8

    def test_vc_rejects_large_sigma(self):
        with pytest.raises(InvalidArgumentError):
            vc_concentration_bound(100, 2.0, 1.0, 1.0, 2.5, 0.1)

    def test_vc_rejects_log_factor_below_one(self):
        with pytest.raises(InvalidArgumentError):
            vc_concentration_bound(100, 1.0, 1.0, 1.0, 2.0, 0.9)
        assert vc_concentration_bound(100, 1.0, 1.0, 1.0, 2.0, 0.5) == 0.0


class TestEvaluateBounds:

    def test_report(self):
        report = evaluate_bounds(BoundInputs(d=1, n=10 ** 5, k=2000, sigma2_G=0.25, L=1.0, f_x=1.0))
        assert report.V_d == pytest.approx(2.0, rel=1e-15)
        assert report.theta == 4.0
        assert report.deterministic_radius == pytest.approx(2000 / (10 ** 5 * 2.0), rel=1e-12)
        assert report.k_in_window
        assert report.uniform_error_bound == pytest.approx(
            report.variance_term + report.bernstein_term + report.bias_term, rel=1e-12)

    def test_report_without_density(self):
        assert evaluate_bounds(BoundInputs(d=2, n=1000)).deterministic_radius is None
