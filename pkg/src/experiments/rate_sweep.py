from typing import Dict, List, Optional

import numpy as np
import pandas as pd
from scipy.stats import linregress

from .base_experiment import BaseExperiment, aggregate_key, finite_or_none
from .experiment_kinds import ExperimentKind
from .experiment_types import SUP_POINT, PowerK, ReplicationRecord


def log_log_slope(x, y) -> Dict[str, Optional[float]]:
    """Least-squares slope of log y against log x, with its standard error."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size < 2 or np.any(y <= 0):
        return {"slope": None, "slope_stderr": None, "intercept": None}
    fit = linregress(np.log(x), np.log(y))
    return {
        "slope": finite_or_none(fit.slope),
        "slope_stderr": finite_or_none(fit.stderr) if x.size > 2 else None,
        "intercept": finite_or_none(fit.intercept),
    }


class RateSweepExperiment(BaseExperiment):
    """
    Mean over replications of the supremum error over the lattice and the
    functionals, across the n-grid, and its log-log slope in n.
    """
    kind = ExperimentKind.RATE_SWEEP

    def regime_notes(self) -> List[str]:
        rule = self.spec.k_rule
        rate = 2.0 / (self.spec.dimension + 2)
        if not isinstance(rule, PowerK) or abs(rule.a - rate) > 1e-12:
            self.warn(f"k rule is not n^(2/(d+2)) = n^{rate:.4g}; the slope is not expected at -1/(d+2)")
        return self.notes

    def replicate(self, replication: int) -> List[ReplicationRecord]:
        records = []
        for stream, n in enumerate(self.spec.n_grid):
            k = self.k_for(n)
            sample = self.sample(replication, stream, n)
            error = self.sup_error(sample, k, self.lattice(n, k))
            records.append(self.record(replication, n, k, SUP_POINT, self.class_id, "sup_error", error))
        return records

    def aggregate(self, frame: pd.DataFrame) -> Dict[str, Optional[float]]:
        aggregates = {}
        means = []
        for n in self.spec.n_grid:
            errors = self.select(frame, n=n, metric="sup_error")["value"].to_numpy()
            means.append(float(np.mean(errors)))
            aggregates[aggregate_key("mean_sup_error", n=n)] = finite_or_none(means[-1])
            aggregates[aggregate_key("sd_sup_error", n=n)] = finite_or_none(np.std(errors, ddof=1)) if errors.size > 1 else None

        aggregates.update(log_log_slope(self.spec.n_grid, means))

        top = self.spec.n_grid[-1]
        last = [(n, m) for n, m in zip(self.spec.n_grid, means) if n >= top / 10.0]
        tail = log_log_slope([n for n, _ in last], [m for _, m in last])
        aggregates["slope_last_decade"] = tail["slope"]
        return aggregates
