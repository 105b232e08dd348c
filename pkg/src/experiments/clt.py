import itertools
import math
from typing import Dict, List, Optional

import numpy as np
import pandas as pd
from scipy.stats import kstest

from measure import integrate, knn_measure
from util.errors import DegenerateFunctionalError

from .base_experiment import BaseExperiment, aggregate_key, finite_or_none
from .experiment_kinds import ExperimentKind
from .experiment_types import ReplicationRecord, PowerK


class CltExperiment(BaseExperiment):
    """
    Standardized errors Z = sqrt(k) (mu_hat(g) - mu_x(g)) / sqrt(cov_x(g, g)),
    compared with the standard normal.
    """
    kind = ExperimentKind.CLT

    def validate(self):
        self.require_functionals()
        for g in self.functionals:
            variances = self.truth.conditional_cov(g, g, self.points)
            if np.any(variances <= 0):
                raise DegenerateFunctionalError(f"Functional {g.id} has zero conditional variance at a query point.")

    def regime_notes(self) -> List[str]:
        d = self.spec.dimension
        rule = self.spec.k_rule
        if isinstance(rule, PowerK):
            if rule.a * (d + 2) / 2.0 >= 1.0:
                self.warn(f"k = n^{rule.a:g} does not undersmooth: k^((d+2)/2)/n does not vanish for d={d}")
        else:
            for n, k in zip(self.spec.n_grid, self.k_values()):
                if k ** ((d + 2) / 2.0) / n > 1.0:
                    self.warn(f"k={k} at n={n} gives k^((d+2)/2)/n > 1; the bias term may not be negligible")
        return self.notes

    def replicate(self, replication: int) -> List[ReplicationRecord]:
        records = []
        truths = self.truth_at(self.points)
        scales = [np.sqrt(self.truth.conditional_cov(g, g, self.points)) for g in self.functionals]
        for stream, n in enumerate(self.spec.n_grid):
            k = self.k_for(n)
            sample = self.sample(replication, stream, n)
            for i, x in enumerate(self.points):
                measure = knn_measure(sample, x, k, self.norm)
                for g, mu, scale in zip(self.functionals, truths, scales):
                    z = math.sqrt(k) * (integrate(measure, g) - mu[i]) / scale[i]
                    records.append(self.record(replication, n, k, i, g.id, "z", z))
        return records

    def aggregate(self, frame: pd.DataFrame) -> Dict[str, Optional[float]]:
        aggregates = {}
        for n in self.spec.n_grid:
            for i, x in enumerate(self.points):
                z_by_functional = {}
                for g in self.functionals:
                    z = self.select(frame, n=n, point=i, functional=g.id, metric="z")["value"].to_numpy()
                    z_by_functional[g.id] = z
                    labels = dict(n=n, point=i, functional=g.id)
                    aggregates[aggregate_key("ks_distance", **labels)] = finite_or_none(kstest(z, "norm").statistic)
                    aggregates[aggregate_key("mean_z", **labels)] = finite_or_none(np.mean(z))
                    aggregates[aggregate_key("var_z", **labels)] = finite_or_none(np.var(z, ddof=1)) if z.size > 1 else None
                for g1, g2 in itertools.combinations(self.functionals, 2):
                    labels = dict(n=n, point=i, pair=f"{g1.id}|{g2.id}")
                    z1, z2 = z_by_functional[g1.id], z_by_functional[g2.id]
                    empirical = np.corrcoef(z1, z2)[0, 1] if z1.size > 1 else np.nan
                    point = x.reshape(1, -1)
                    expected = self.truth.conditional_cov(g1, g2, point)[0] / math.sqrt(
                        self.truth.conditional_cov(g1, g1, point)[0] * self.truth.conditional_cov(g2, g2, point)[0])
                    aggregates[aggregate_key("corr_z", **labels)] = finite_or_none(empirical)
                    aggregates[aggregate_key("expected_corr", **labels)] = finite_or_none(expected)
        return aggregates
