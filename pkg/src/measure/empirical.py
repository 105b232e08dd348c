import logging
from typing import Callable, Optional, Union

import numpy as np
from scipy.stats import qmc

from geometry import Norm, NormKind, ball_indices, knn_radius
from util.errors import EmptyBallError, InvalidArgumentError, NumericError, UnsupportedModelError
from util.tools import as_point, check_open_unit

from .functionals import Functional
from .measure_types import EmpiricalMeasure, KnnMeasure, NwMeasure, SampleSet


def default_norm(sample: SampleSet, norm: Optional[Norm] = None) -> Norm:
    if norm is None:
        return Norm(NormKind.EUCLIDEAN, sample.dimension)
    return norm


def knn_measure(sample: SampleSet, x, k: int, norm: Optional[Norm] = None, method: str = "index") -> KnnMeasure:
    norm = default_norm(sample, norm)
    query = knn_radius(sample.covariates, x, k, norm, method=method)
    if query.has_excess_ties:
        logging.debug("[measure] %d boundary ties put %d points in a k=%d ball; total mass %.6g.",
                      query.tie_count, query.in_ball_count, k, query.in_ball_count / k)
    return KnnMeasure(source=sample, x=query.center, in_ball=query.in_ball, denominator=query.k,
                      k=query.k, query=query)


def nw_measure(sample: SampleSet, x, tau: float, norm: Optional[Norm] = None) -> NwMeasure:
    if not np.isfinite(tau) or tau <= 0:
        raise InvalidArgumentError(f"Bandwidth must be positive, got {tau}.")
    norm = default_norm(sample, norm)
    point = as_point(x, sample.dimension)
    inside = ball_indices(sample.covariates, point, tau, norm)
    if inside.shape[0] == 0:
        raise EmptyBallError(f"No sample point within {tau:.6g} of the query point.")
    inside.setflags(write=False)
    return NwMeasure(source=sample, x=point, in_ball=inside, denominator=int(inside.shape[0]),
                     bandwidth=float(tau))


def _values(measure: EmpiricalMeasure, g: Functional) -> np.ndarray:
    values = np.atleast_1d(g(measure.in_ball_responses))
    if values.shape[0] != measure.in_ball_count:
        raise InvalidArgumentError(f"Functional {g.id} returned {values.shape[0]} values for {measure.in_ball_count} responses.")
    bad = np.flatnonzero(~np.isfinite(values))
    if bad.shape[0] > 0:
        index = int(measure.in_ball[bad[0]])
        raise NumericError(f"Functional {g.id} is not finite at sample {index}.", index=index)
    return values


def integrate(measure: Union[KnnMeasure, NwMeasure], g: Functional) -> float:
    """Sum of w_i g(Y_i) over the sample."""
    return float(np.sum(_values(measure, g)) / measure.denominator)


def _scalar_responses(measure: EmpiricalMeasure) -> np.ndarray:
    if not measure.source.is_scalar:
        raise InvalidArgumentError("Conditional CDF and quantiles need scalar responses.")
    return measure.in_ball_responses


def conditional_cdf(measure: Union[KnnMeasure, NwMeasure], y: float) -> float:
    """F(y|x) under the measure: mass of in-ball responses <= y."""
    responses = _scalar_responses(measure)
    return int(np.count_nonzero(responses <= y)) / measure.denominator


def conditional_quantile(measure: Union[KnnMeasure, NwMeasure], u: float) -> float:
    """
    Generalized inverse inf{y : F(y|x) >= u}.

    The j-th smallest in-ball response is the answer exactly when
    (j-1)/k < u <= j/k, so the level comparison is done on the grid j/k
    rather than by inverting u*k.
    """
    check_open_unit("u", u)
    responses = np.sort(_scalar_responses(measure))
    levels = np.arange(1, responses.shape[0] + 1) / measure.denominator
    j = int(np.searchsorted(levels, u, side="left"))
    return float(responses[min(j, responses.shape[0] - 1)])


def empirical_conditional_cov(measure: Union[KnnMeasure, NwMeasure], g1: Functional, g2: Functional) -> float:
    """Plug-in conditional covariance mu(g1 g2) - mu(g1) mu(g2)."""
    return integrate(measure, g1 * g2) - integrate(measure, g1) * integrate(measure, g2)


def ball_grid(x: np.ndarray, tau: float, grid: int, norm: Norm) -> np.ndarray:
    """
    A deterministic set of about `grid` points in the closed ball B(x, tau).

    In d = 1 this is an evenly spaced grid including both endpoints. In higher
    dimension it is an unscrambled Halton sequence mapped into the ball, plus the
    centre and the 2d axis extremes.
    """
    d = x.shape[0]
    if d == 1:
        offsets = np.linspace(-tau, tau, max(int(grid), 2)).reshape(-1, 1)
        return x + offsets

    axes = np.vstack([np.zeros((1, d)), np.eye(d), -np.eye(d)])
    unit = Norm(norm.kind, d)
    sampler = qmc.Halton(d=d, scramble=False)
    kept = []
    count = 0
    while count < grid:
        block = 2.0 * sampler.random(max(int(grid), 16)) - 1.0
        block = block[unit.distances(block, np.zeros(d)) <= 1.0]
        kept.append(block)
        count += block.shape[0]
    cloud = np.vstack([axes] + kept)[: max(int(grid), axes.shape[0])]
    return x + tau * cloud


def modulus_of_continuity(truth, g: Functional, x, tau: float, grid: int = 201,
                          norm: Optional[Norm] = None) -> float:
    """
    Grid approximation of sup over z in B(x, tau) of |mu_x(g) - mu_z(g)|.

    The maximum is taken over a finite point set, so the value is a lower bound
    of the true supremum.
    """
    if not hasattr(truth, "conditional_mean"):
        raise UnsupportedModelError("The modulus of continuity needs an analytic conditional law.")
    if tau < 0:
        raise InvalidArgumentError(f"Radius must be nonnegative, got {tau}.")
    point = as_point(x, truth.dimension)
    if tau == 0:
        return 0.0
    norm = norm or Norm(NormKind.EUCLIDEAN, truth.dimension)
    z = ball_grid(point, float(tau), int(grid), norm)
    at_x = truth.conditional_mean(g, point.reshape(1, -1))[0]
    around = truth.conditional_mean(g, z)
    return float(np.max(np.abs(around - at_x)))


def sup_cdf_error(measure: Union[KnnMeasure, NwMeasure], cdf_truth: Callable[[np.ndarray], np.ndarray]) -> float:
    """
    Exact supremum over t of |F_hat(t|x) - F(t|x)| for a continuous true CDF.

    The estimate is a step function, so the supremum is attained at a jump
    (from the left or from the right) or in the right tail, where F tends to 1
    while the estimate stays at the total mass.
    """
    responses = np.sort(_scalar_responses(measure))
    truth = np.asarray(cdf_truth(responses), dtype=float)
    right = np.searchsorted(responses, responses, side="right") / measure.denominator
    left = np.searchsorted(responses, responses, side="left") / measure.denominator
    jumps = np.maximum(np.abs(right - truth), np.abs(left - truth))
    return float(max(np.max(jumps), abs(measure.total_mass - 1.0)))
