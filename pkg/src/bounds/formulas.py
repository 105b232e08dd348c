"""
Closed-form evaluators for the radii, the admissible window and the
concentration bounds. Brackets that go negative are returned as they are.
"""
import logging
import math
from typing import Tuple

from util.errors import InvalidArgumentError
from util.tools import check_open_unit

from .bound_types import AdmissibleWindow, BoundInputs, BoundsReport


def deterministic_radius(inputs: BoundInputs) -> float:
    """(k / (n f_x V_d))^(1/d)."""
    if inputs.f_x is None:
        raise InvalidArgumentError("The deterministic radius needs the density f_x at the query point.")
    return (inputs.k / (inputs.n * inputs.f_x * inputs.volume)) ** (1.0 / inputs.d)


def uniform_radius_bound(inputs: BoundInputs) -> float:
    """(2k / (n b_X c V_d))^(1/d)."""
    return (2.0 * inputs.k / (inputs.n * inputs.b_X * inputs.c * inputs.volume)) ** (1.0 / inputs.d)


def admissible_k_window(inputs: BoundInputs) -> AdmissibleWindow:
    d, n, delta = inputs.d, inputs.n, inputs.delta
    radius_cap = inputs.T ** d * inputs.b_X * inputs.c * inputs.volume / 2.0
    variance_cap = math.inf if inputs.sigma2_G == 0 else 8.0 / (inputs.sigma2_G * inputs.kappa_X)
    return AdmissibleWindow(
        k_min=24.0 * d * math.log(24.0 * n / delta),
        k_max=n * min(variance_cap, radius_cap),
        radius_k_min=24.0 * d * math.log(12.0 * n / delta),
        radius_k_max=n * radius_cap,
    )


def uniform_error_terms(inputs: BoundInputs) -> Tuple[float, float, float]:
    """
    The variance, Bernstein and bias terms of the uniform bound, before the factor K.
    """
    ratio = inputs.theta / inputs.k
    log_factor = inputs.log_factor
    variance = math.sqrt(inputs.sigma2_G * ratio * log_factor)
    bernstein = ratio * log_factor
    bias = inputs.L * (inputs.k / (inputs.n * inputs.c * inputs.b_X * inputs.volume)) ** (1.0 / inputs.d)
    return variance, bernstein, bias


def uniform_error_bound(inputs: BoundInputs) -> float:
    """
    High-probability bound on sup over x and g of |(mu_hat - mu_x)(g)|.

    Outside the admissible window the value is still returned, with a warning.
    """
    window = admissible_k_window(inputs)
    if not window.contains(inputs.k):
        logging.warning("[bounds] k=%d lies outside the admissible window [%.4g, %.4g].",
                        inputs.k, window.k_min, window.k_max)
    return inputs.K * sum(uniform_error_terms(inputs))


def local_process_bound(inputs: BoundInputs) -> float:
    """
    Bound on the localized supremum process, K (sqrt(theta sigma2_G kappa_X k log) + theta log),
    stated for sigma2_G kappa_X k <= 8 n.
    """
    if inputs.sigma2_G * inputs.kappa_X * inputs.k > 8.0 * inputs.n:
        logging.warning("[bounds] sigma2_G kappa_X k exceeds 8n; the localized bound is outside its range.")
    log_factor = inputs.log_factor
    return inputs.K * (math.sqrt(inputs.theta * inputs.sigma2_G * inputs.kappa_X * inputs.k * log_factor)
                       + inputs.theta * log_factor)


def _check_chernoff(mu: float, delta: float):
    if not mu > 0:
        raise InvalidArgumentError(f"mu must be positive, got {mu}.")
    check_open_unit("delta", delta)


def chernoff_lower(mu: float, delta: float) -> float:
    """With probability >= 1 - delta a Binomial with mean mu is above this value."""
    _check_chernoff(mu, delta)
    return (1.0 - math.sqrt(2.0 * math.log(1.0 / delta) / mu)) * mu


def chernoff_upper(mu: float, delta: float) -> float:
    """With probability >= 1 - delta a Binomial with mean mu (mu >= log(1/delta)) is below this value."""
    _check_chernoff(mu, delta)
    return (1.0 + math.sqrt(3.0 * math.log(1.0 / delta) / mu)) * mu


def uniform_ball_bound(P_B: float, n: int, d: int, delta: float) -> float:
    """Lower bound on the empirical mass of every ball with probability P_B, uniformly over balls."""
    if not (0.0 < P_B <= 1.0):
        raise InvalidArgumentError(f"P_B must lie in (0, 1], got {P_B}.")
    check_open_unit("delta", delta)
    return P_B * (1.0 - math.sqrt(12.0 * d * math.log(12.0 * n / delta) / (n * P_B)))


def vc_concentration_bound(n: int, v: float, A: float, U: float, sigma: float, delta: float,
                           K_prime: float = 1.0) -> float:
    """
    Bound on the supremum of the centred empirical process over a VC class with
    envelope U and variance bound sigma^2, with theta = A U / sigma.
    """
    if not sigma > 0:
        raise InvalidArgumentError(f"sigma must be positive, got {sigma}.")
    if sigma > 2.0 * U:
        raise InvalidArgumentError(f"sigma={sigma} exceeds 2U={2.0 * U}.")
    if n < 1 or not (v > 0 and A > 0 and K_prime > 0):
        raise InvalidArgumentError(f"n, v, A and K_prime must be positive, got {n}, {v}, {A}, {K_prime}.")
    check_open_unit("delta", delta)
    theta = A * U / sigma
    # The bound is stated for K' theta / delta >= 1.
    if K_prime * theta < delta:
        raise InvalidArgumentError(
            f"K_prime * theta / delta = {K_prime * theta / delta:.4g} is below 1 (theta = A U / sigma = {theta:.4g}).")
    log_factor = math.log(K_prime * theta / delta)
    return K_prime * (sigma * math.sqrt(v * n * log_factor) + U * v * log_factor)


def evaluate_bounds(inputs: BoundInputs) -> BoundsReport:
    window = admissible_k_window(inputs)
    variance, bernstein, bias = uniform_error_terms(inputs)
    return BoundsReport(
        inputs=inputs,
        V_d=inputs.volume,
        theta=inputs.theta,
        kappa_X=inputs.kappa_X,
        deterministic_radius=deterministic_radius(inputs) if inputs.f_x is not None else None,
        uniform_radius_bound=uniform_radius_bound(inputs),
        window=window,
        window_is_empty=window.is_empty,
        k_in_window=window.contains(inputs.k),
        variance_term=variance,
        bernstein_term=bernstein,
        bias_term=bias,
        uniform_error_bound=uniform_error_bound(inputs),
        local_process_bound=local_process_bound(inputs),
    )
