import logging
from typing import Optional

import numpy as np
from scipy.stats import norm as standard_normal

from geometry import Norm
from measure import Functional, SampleSet, empirical_conditional_cov, identity, integrate, knn_measure
from util.errors import InvalidArgumentError
from util.tools import check_open_unit

from .estimator_types import ConfidenceInterval, LocalLinearFit

# Eigenvalues below this fraction of the largest are treated as zero.
PINV_RELATIVE_CUTOFF = 1e-12


def normal_quantile(p: float) -> float:
    check_open_unit("p", p)
    return float(standard_normal.ppf(p))


def knn_regression(sample: SampleSet, x, k: int, norm: Optional[Norm] = None) -> float:
    if not sample.is_scalar:
        raise InvalidArgumentError("k-NN regression needs scalar responses.")
    return integrate(knn_measure(sample, x, k, norm), identity())


def _pseudo_inverse(gram: np.ndarray):
    eigenvalues, eigenvectors = np.linalg.eigh(gram)
    top = float(np.max(np.abs(eigenvalues))) if eigenvalues.size else 0.0
    keep = np.abs(eigenvalues) > PINV_RELATIVE_CUTOFF * top if top > 0 else np.zeros_like(eigenvalues, dtype=bool)
    inverse = np.zeros_like(eigenvalues)
    inverse[keep] = 1.0 / eigenvalues[keep]
    return (eigenvectors * inverse) @ eigenvectors.T, int(np.count_nonzero(keep))


def local_linear_fit(sample: SampleSet, x, k: int, sigma2: float, norm: Optional[Norm] = None,
                     intercept_only: bool = False) -> LocalLinearFit:
    """
    Minimizes the k-NN average of (Y - alpha - beta^T (X - x))^2.

    beta is the minimum-norm solution of the centred normal equations and alpha
    is left free, so a singular G_x never shrinks the intercept. G_x and its
    pseudo-inverse are reported for the plug-in variance.

    With intercept_only, beta is forced to zero and alpha is the k-NN regression.
    """
    if not sample.is_scalar:
        raise InvalidArgumentError("Local-linear fitting needs scalar responses.")
    if not np.isfinite(sigma2) or sigma2 < 0:
        raise InvalidArgumentError(f"sigma2 must be a finite nonnegative number, got {sigma2}.")
    measure = knn_measure(sample, x, k, norm)
    d = sample.dimension

    if intercept_only:
        mass = measure.total_mass
        gram = np.zeros((d + 1, d + 1))
        pinv = np.zeros((d + 1, d + 1))
        gram[0, 0] = mass
        pinv[0, 0] = 1.0 / mass
        alpha = float(np.sum(measure.in_ball_responses) / measure.k) / mass
        beta = np.zeros(d)
        rank = 1
    else:
        offsets = measure.in_ball_covariates - measure.x
        y = measure.in_ball_responses
        design = np.hstack([np.ones((measure.in_ball_count, 1)), offsets])
        gram = design.T @ design / measure.k
        gram = 0.5 * (gram + gram.T)
        pinv, rank = _pseudo_inverse(gram)
        # Centred solve: alpha stays unpenalized, beta is minimum-norm.
        offset_mean = offsets.mean(axis=0)
        y_mean = float(y.mean())
        centred = offsets - offset_mean
        scatter = centred.T @ centred / measure.k
        scatter_pinv, _ = _pseudo_inverse(0.5 * (scatter + scatter.T))
        beta = np.asarray(scatter_pinv @ (centred.T @ (y - y_mean) / measure.k), dtype=float)
        alpha = y_mean - float(beta @ offset_mean)

    if rank < gram.shape[0] and not intercept_only:
        logging.debug("[estimators] Gram matrix has rank %d < %d at k=%d.", rank, gram.shape[0], k)

    return LocalLinearFit(
        alpha=alpha,
        beta=beta,
        gram=gram,
        gram_pseudo_inverse=pinv,
        variance_scale=float(sigma2),
        k=measure.k,
        in_ball_count=measure.in_ball_count,
        rank=rank,
        intercept_only=intercept_only,
    )


def _interval(center: float, variance: float, k: int, level: float) -> ConfidenceInterval:
    check_open_unit("level", level)
    clamped = variance < 0
    if clamped:
        logging.debug("[estimators] Negative variance estimate %.3g clamped to 0.", variance)
        variance = 0.0
    half_width = normal_quantile(0.5 * (1.0 + level)) * np.sqrt(variance / k)
    return ConfidenceInterval(center=center, half_width=float(half_width), level=level, variance_clamped=clamped)


def functional_ci(sample: SampleSet, x, k: int, g: Functional, level: float,
                  norm: Optional[Norm] = None) -> ConfidenceInterval:
    """Plug-in normal interval mu(g) +- z sqrt(cov(g, g) / k) under the k-NN measure."""
    check_open_unit("level", level)
    measure = knn_measure(sample, x, k, norm)
    center = integrate(measure, g)
    variance = empirical_conditional_cov(measure, g, g)
    return _interval(center, variance, measure.k, level)


def local_linear_ci(fit: LocalLinearFit, level: float) -> ConfidenceInterval:
    """Plug-in interval for the intercept with variance sigma^2(x) [G_x^+]_00 / k."""
    variance = fit.variance_scale * float(fit.gram_pseudo_inverse[0, 0])
    return _interval(fit.alpha, variance, fit.k, level)
