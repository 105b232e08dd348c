from .errors import (
    KnnMeasureError,
    InvalidArgumentError,
    InvalidSpecError,
    UnsupportedModelError,
    NumericError,
    EmptyBallError,
    DegenerateFunctionalError,
)
from .tools import as_point, parse_point, power_k, check_open_unit
