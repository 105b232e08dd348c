from .measure_types import EmpiricalMeasure, KnnMeasure, NwMeasure, SampleSet
from .functionals import (
    CDF_CLASS_TOKEN,
    Functional,
    Monomial,
    cdf_indicator,
    constant,
    coordinate,
    identity,
    is_cdf_class,
    parse_functional,
    square,
)
from .empirical import (
    conditional_cdf,
    conditional_quantile,
    empirical_conditional_cov,
    integrate,
    knn_measure,
    modulus_of_continuity,
    nw_measure,
    sup_cdf_error,
)
