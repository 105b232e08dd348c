import json
import logging
import math
from pathlib import Path
from typing import Callable, Dict, Optional, Union

import pandas as pd
from jinja2 import Environment, FileSystemLoader, StrictUndefined

from constants import CALIBRATION_FILE, REPORT_FILE, REPS_FILE, RESULT_FILE, SCHEMA_VERSION
from experiments import RECORD_COLUMNS, Calibration, ExperimentResult
from util.errors import NumericError

TEMPLATES_DIR = Path(__file__).resolve().parent.parent / "templates"

# Aggregates recomputed on load must match the stored ones this closely.
AGGREGATE_TOLERANCE = 1e-10


def dumps(payload: Dict) -> str:
    """Canonical JSON: sorted keys, fixed indentation, trailing newline."""
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def aggregates_match(stored: Dict[str, Optional[float]], recomputed: Dict[str, Optional[float]],
                     tolerance: float = AGGREGATE_TOLERANCE) -> Optional[str]:
    """Name of the first aggregate that differs, or None when all match."""
    if set(stored) != set(recomputed):
        missing = sorted(set(stored) ^ set(recomputed))
        return missing[0]
    for key in sorted(stored):
        a, b = stored[key], recomputed[key]
        if a is None or b is None:
            if a is not b:
                return key
            continue
        if not math.isclose(a, b, rel_tol=tolerance, abs_tol=tolerance):
            return key
    return None


class ResultStore:
    """
    Writes and reads the output directory of one run: result.json, reps.csv,
    report.md and, for calibrations, calibration.json.
    """

    def __init__(self, out_dir: Union[str, Path]):
        self.out_dir = Path(out_dir)
        self.env = Environment(
            loader=FileSystemLoader(str(TEMPLATES_DIR)),
            undefined=StrictUndefined,
            trim_blocks=True,
            lstrip_blocks=True,
        )

    def _write_text(self, name: str, text: str) -> Path:
        self.out_dir.mkdir(parents=True, exist_ok=True)
        path = self.out_dir / name
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
        return path

    def write_result(self, result: ExperimentResult) -> Path:
        path = self._write_text(RESULT_FILE, dumps(result.model_dump(mode="json")))

        frame = pd.DataFrame([r.as_row() for r in result.records], columns=RECORD_COLUMNS)
        frame.insert(0, "schema_version", SCHEMA_VERSION)
        self._write_text(REPS_FILE, frame.to_csv(index=False, lineterminator="\n"))

        template = self.env.get_template("report.md.jinja2")
        self._write_text(REPORT_FILE, template.render(result=result))
        logging.info("[results] Wrote %s, %s and %s to %s", RESULT_FILE, REPS_FILE, REPORT_FILE, self.out_dir)
        return path

    def write_calibration(self, calibration: Calibration) -> Path:
        path = self._write_text(CALIBRATION_FILE, dumps(calibration.model_dump(mode="json")))
        logging.info("[results] Wrote %s to %s", CALIBRATION_FILE, self.out_dir)
        return path

    def load_result(self, recompute: Optional[Callable[[ExperimentResult], Dict[str, Optional[float]]]] = None) -> ExperimentResult:
        """
        Load result.json. When `recompute` is given, the aggregates are recomputed
        from the stored records and must match the stored values.
        """
        with open(self.out_dir / RESULT_FILE, "r", encoding="utf-8") as f:
            result = ExperimentResult.model_validate(json.load(f))
        if recompute is not None and result.status == "ok":
            mismatch = aggregates_match(result.aggregates, recompute(result))
            if mismatch is not None:
                raise NumericError(f"Stored aggregate '{mismatch}' does not match its recomputation from the records.")
        return result

    def load_calibration(self) -> Calibration:
        with open(self.out_dir / CALIBRATION_FILE, "r", encoding="utf-8") as f:
            return Calibration.model_validate(json.load(f))
