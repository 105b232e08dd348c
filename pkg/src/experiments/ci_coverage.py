from typing import Dict, List, Optional

import numpy as np
import pandas as pd

from estimators import functional_ci

from .base_experiment import BaseExperiment, aggregate_key, finite_or_none
from .experiment_kinds import ExperimentKind
from .experiment_types import ReplicationRecord


class CiCoverageExperiment(BaseExperiment):
    """Empirical coverage of the plug-in normal interval for mu_x(g)."""
    kind = ExperimentKind.CI_COVERAGE

    def validate(self):
        self.require_functionals()

    def replicate(self, replication: int) -> List[ReplicationRecord]:
        records = []
        truths = self.truth_at(self.points)
        for stream, n in enumerate(self.spec.n_grid):
            k = self.k_for(n)
            sample = self.sample(replication, stream, n)
            for i, x in enumerate(self.points):
                for g, mu in zip(self.functionals, truths):
                    interval = functional_ci(sample, x, k, g, self.spec.level, self.norm)
                    records.append(self.record(replication, n, k, i, g.id, "covered", float(interval.contains(mu[i]))))
                    records.append(self.record(replication, n, k, i, g.id, "half_width", interval.half_width))
        return records

    def aggregate(self, frame: pd.DataFrame) -> Dict[str, Optional[float]]:
        aggregates = {}
        for n in self.spec.n_grid:
            for i in range(self.points.shape[0]):
                for g in self.functionals:
                    labels = dict(n=n, point=i, functional=g.id)
                    covered = self.select(frame, metric="covered", **labels)["value"].to_numpy()
                    widths = self.select(frame, metric="half_width", **labels)["value"].to_numpy()
                    aggregates[aggregate_key("coverage", **labels)] = finite_or_none(np.mean(covered))
                    aggregates[aggregate_key("mean_half_width", **labels)] = finite_or_none(np.mean(widths))
        return aggregates
