from typing import Dict, List, Optional

import numpy as np
import pandas as pd

from bounds import admissible_k_window, uniform_error_terms

from .base_experiment import BaseExperiment, aggregate_key, finite_or_none
from .experiment_kinds import ExperimentKind
from .experiment_types import SUP_POINT, ReplicationRecord
from .rate_sweep import log_log_slope


class BoundValidityExperiment(BaseExperiment):
    """
    Supremum error over the lattice and the function class against the uniform
    high-probability bound, optionally across a sweep of k.
    """
    kind = ExperimentKind.BOUND_VALIDITY

    def sweep(self, n: int) -> List[int]:
        if self.spec.k_grid:
            return list(self.spec.k_grid)
        return [self.k_for(n)]

    def regime_notes(self) -> List[str]:
        for n in self.spec.n_grid:
            for k in self.sweep(n):
                window = admissible_k_window(self.bound_inputs(n, k))
                if not window.contains(k):
                    self.warn(f"k={k} at n={n} lies outside the admissible window "
                              f"[{window.k_min:.4g}, {window.k_max:.4g}]")
        return self.notes

    def bound_value(self, n: int, k: int, K: Optional[float] = None) -> float:
        """The uniform bound; window checks are reported once by regime_notes."""
        inputs = self.bound_inputs(n, k, K)
        return inputs.K * sum(uniform_error_terms(inputs))

    def replicate(self, replication: int) -> List[ReplicationRecord]:
        records = []
        for stream, n in enumerate(self.spec.n_grid):
            sample = self.sample(replication, stream, n)
            for k in self.sweep(n):
                error = self.sup_error(sample, k, self.lattice(n, k))
                records.append(self.record(replication, n, k, SUP_POINT, self.class_id, "sup_error", error, param=k))
        return records

    def violations(self, frame: pd.DataFrame, K: float) -> np.ndarray:
        """Per replication, 1 when the bound fails for some (n, k) of the family."""
        errors = frame[frame["metric"] == "sup_error"]
        bounds = {
            (n, k): self.bound_value(n, k, K)
            for n in self.spec.n_grid for k in self.sweep(n)
        }
        limit = np.array([bounds[(int(n), int(k))] for n, k in zip(errors["n"], errors["k"])])
        failed = errors.assign(failed=(errors["value"].to_numpy() > limit).astype(float))
        return failed.groupby("replication", sort=True)["failed"].max().to_numpy()

    def aggregate(self, frame: pd.DataFrame) -> Dict[str, Optional[float]]:
        aggregates = {}
        for n in self.spec.n_grid:
            ks, means = [], []
            for k in self.sweep(n):
                errors = self.select(frame, n=n, k=k, metric="sup_error")["value"].to_numpy()
                bound = self.bound_value(n, k)
                ks.append(k)
                means.append(float(np.mean(errors)))
                aggregates[aggregate_key("mean_sup_error", n=n, k=k)] = finite_or_none(means[-1])
                aggregates[aggregate_key("bound", n=n, k=k)] = finite_or_none(bound)
                aggregates[aggregate_key("violation_frequency", n=n, k=k)] = finite_or_none(np.mean(errors > bound))
            if len(ks) > 1:
                fit = log_log_slope(ks, means)
                aggregates[aggregate_key("k_sweep_slope", n=n)] = fit["slope"]
                aggregates[aggregate_key("k_sweep_slope_stderr", n=n)] = fit["slope_stderr"]
        aggregates["violation_frequency"] = finite_or_none(np.mean(self.violations(frame, self.spec.K)))
        aggregates["K"] = self.spec.K
        return aggregates
