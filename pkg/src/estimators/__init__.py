from .estimator_types import ConfidenceInterval, EstimateResult, LocalLinearFit
from .local import functional_ci, knn_regression, local_linear_ci, local_linear_fit, normal_quantile
from .estimate import estimate_at
