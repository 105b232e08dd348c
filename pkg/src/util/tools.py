import math
from typing import Sequence, Union

import numpy as np

from .errors import InvalidArgumentError

ArrayLike = Union[float, Sequence[float], np.ndarray]


def as_point(x: ArrayLike, dimension: int) -> np.ndarray:
    """Coerce a query point to a finite float vector of the given dimension."""
    point = np.atleast_1d(np.asarray(x, dtype=float)).ravel()
    if point.shape[0] != dimension:
        raise InvalidArgumentError(f"Query point has dimension {point.shape[0]}, expected {dimension}.")
    if not np.all(np.isfinite(point)):
        raise InvalidArgumentError("Query point must be finite.")
    return point


def parse_point(text: str) -> list:
    """Parse '0.5' or '0.2,0.7' from the command line."""
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError as e:
        raise InvalidArgumentError(f"Cannot parse query point '{text}': {e}")


def power_k(n: int, exponent: float) -> int:
    """k = ceil(n^a), clipped to [1, n]."""
    k = math.ceil(n ** exponent - 1e-9)
    return int(min(max(k, 1), n))


def check_open_unit(name: str, value: float) -> float:
    if not (0.0 < value < 1.0):
        raise InvalidArgumentError(f"{name} must lie in (0, 1), got {value}.")
    return value
