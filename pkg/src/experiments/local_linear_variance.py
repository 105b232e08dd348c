import math
from typing import Dict, List, Optional

import numpy as np
import pandas as pd

from estimators import local_linear_ci, local_linear_fit

from .base_experiment import BaseExperiment, aggregate_key, finite_or_none
from .experiment_kinds import ExperimentKind
from .experiment_types import ReplicationRecord

INTERCEPT = "intercept"


class LocalLinearVarianceExperiment(BaseExperiment):
    """
    Standardizes the local-linear intercept error by the plug-in variance
    sigma^2(x) [G_x^+]_00 / k and checks the matching interval's coverage.
    """
    kind = ExperimentKind.LOCAL_LINEAR_VARIANCE

    def sigma2_at(self, x: np.ndarray) -> float:
        if self.spec.sigma2 is not None:
            return self.spec.sigma2
        return float(self.truth.noise_scale(x)[0] ** 2 * self.truth.noise_variance)

    def replicate(self, replication: int) -> List[ReplicationRecord]:
        records = []
        regression = self.truth.regression(self.points)
        for stream, n in enumerate(self.spec.n_grid):
            k = self.k_for(n)
            sample = self.sample(replication, stream, n)
            for i, x in enumerate(self.points):
                sigma2 = self.sigma2_at(x)
                fit = local_linear_fit(sample, x, k, sigma2, self.norm)
                scale = math.sqrt(fit.variance[0, 0] / k)
                interval = local_linear_ci(fit, self.spec.level)
                if scale > 0:
                    records.append(self.record(replication, n, k, i, INTERCEPT, "z", (fit.alpha - regression[i]) / scale))
                records.append(self.record(replication, n, k, i, INTERCEPT, "covered", float(interval.contains(regression[i]))))
                records.append(self.record(replication, n, k, i, INTERCEPT, "rank_deficient", float(fit.rank_deficient)))
        return records

    def aggregate(self, frame: pd.DataFrame) -> Dict[str, Optional[float]]:
        aggregates = {}
        for n in self.spec.n_grid:
            for i in range(self.points.shape[0]):
                labels = dict(n=n, point=i)
                z = self.select(frame, metric="z", **labels)["value"].to_numpy()
                covered = self.select(frame, metric="covered", **labels)["value"].to_numpy()
                deficient = self.select(frame, metric="rank_deficient", **labels)["value"].to_numpy()
                aggregates[aggregate_key("mean_z", **labels)] = finite_or_none(np.mean(z)) if z.size else None
                aggregates[aggregate_key("var_z", **labels)] = finite_or_none(np.var(z, ddof=1)) if z.size > 1 else None
                aggregates[aggregate_key("coverage", **labels)] = finite_or_none(np.mean(covered))
                aggregates[aggregate_key("rank_deficient_frequency", **labels)] = finite_or_none(np.mean(deficient))
        return aggregates
