from typing import Optional

from geometry import Norm
from measure import (
    SampleSet,
    conditional_cdf,
    conditional_quantile,
    integrate,
    knn_measure,
    parse_functional,
)
from util.errors import InvalidArgumentError
from util.tools import check_open_unit

from .estimator_types import EstimateResult
from .local import functional_ci, local_linear_ci, local_linear_fit


def estimate_at(sample: SampleSet, x, k: int, token: str, level: Optional[float] = None,
                sigma2: Optional[float] = None, norm: Optional[Norm] = None) -> EstimateResult:
    """
    Evaluate one estimate at x.

    Tokens: mean | square | const:c | coord:j | cdf:t | quantile:u | loclin.
    A level adds the plug-in interval (not available for quantiles).
    """
    measure = knn_measure(sample, x, k, norm)
    query = measure.query
    common = dict(functional=token, x=[float(v) for v in measure.x], n=sample.size, k=measure.k,
                  radius=query.radius, in_ball_count=query.in_ball_count, tie_count=query.tie_count)
    name, _, arg = token.strip().lower().partition(":")

    if name == "loclin":
        if sigma2 is None:
            raise InvalidArgumentError("loclin needs --sigma2, the residual variance at x.")
        fit = local_linear_fit(sample, x, k, sigma2, norm)
        interval = local_linear_ci(fit, level) if level is not None else None
        return EstimateResult(value=fit.alpha, interval=interval, beta=[float(b) for b in fit.beta],
                              rank_deficient=fit.rank_deficient, **common)

    if name == "quantile":
        try:
            u = float(arg)
        except ValueError:
            raise InvalidArgumentError(f"Cannot parse quantile level in '{token}'.")
        check_open_unit("u", u)
        return EstimateResult(value=conditional_quantile(measure, u), **common)

    g = parse_functional(token)
    value = conditional_cdf(measure, g.param) if g.family == "cdf" else integrate(measure, g)
    interval = functional_ci(sample, x, k, g, level, norm) if level is not None else None
    return EstimateResult(value=value, interval=interval, **common)
