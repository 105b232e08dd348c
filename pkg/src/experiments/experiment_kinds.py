from enum import Enum


class ExperimentKind(str, Enum):

    RADIUS_CONCENTRATION = "radius_concentration"
    CLT = "clt"
    CI_COVERAGE = "ci_coverage"
    RATE_SWEEP = "rate_sweep"
    NW_CONTRAST = "nw_contrast"
    BOUND_VALIDITY = "bound_validity"
    BIAS_BOUND = "bias_bound"
    # Supplementary checks
    LOCAL_LINEAR_VARIANCE = "local_linear_variance"
    CONCENTRATION = "concentration"
