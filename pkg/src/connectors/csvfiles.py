import logging
import re
from pathlib import Path
from typing import Union

import pandas as pd

from measure import SampleSet
from util.errors import InvalidArgumentError

_COLUMN = re.compile(r"^(x|y)(?:_(\d+))?$")


def write_sample_csv(sample: SampleSet, path: Union[str, Path]) -> Path:
    """Write a sample with header x_1..x_d, y (or y_1..y_m for vector responses)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame = pd.DataFrame(sample.covariates.points,
                         columns=[f"x_{j + 1}" for j in range(sample.dimension)])
    if sample.is_scalar:
        frame["y"] = sample.responses
    else:
        for j in range(sample.response_dimension):
            frame[f"y_{j + 1}"] = sample.responses[:, j]
    frame.to_csv(path, index=False)
    logging.info("[csvfiles] Wrote %d rows to %s", sample.size, path)
    return path


def read_sample_csv(path: Union[str, Path]) -> SampleSet:
    """Read a sample written by write_sample_csv or any CSV with the same header convention."""
    path = Path(path)
    try:
        frame = pd.read_csv(path, float_precision="round_trip")
    except FileNotFoundError:
        raise InvalidArgumentError(f"Data file {path} not found.")
    except (pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise InvalidArgumentError(f"Cannot parse data file {path}: {e}")

    x_columns, y_columns = [], []
    for name in frame.columns:
        match = _COLUMN.match(str(name).strip().lower())
        if match is None:
            raise InvalidArgumentError(f"Unexpected column '{name}' in {path}; expected x_1..x_d and y.")
        position = int(match.group(2) or 0)
        (x_columns if match.group(1) == "x" else y_columns).append((position, name))

    if not x_columns or not y_columns:
        raise InvalidArgumentError(f"{path} needs at least one x_j column and a y column.")

    x_columns = [name for _, name in sorted(x_columns)]
    y_columns = [name for _, name in sorted(y_columns)]
    try:
        covariates = frame[x_columns].to_numpy(dtype=float)
        responses = frame[y_columns].to_numpy(dtype=float)
    except ValueError as e:
        raise InvalidArgumentError(f"Non-numeric values in {path}: {e}")
    if len(y_columns) == 1 and y_columns[0].strip().lower() == "y":
        responses = responses[:, 0]

    logging.debug("[csvfiles] Read %d rows, d=%d from %s", frame.shape[0], len(x_columns), path)
    return SampleSet.from_arrays(covariates, responses)
