from typing import Dict, List, Optional

import numpy as np
import pandas as pd

from measure import knn_measure, modulus_of_continuity

from .base_experiment import BaseExperiment, aggregate_key, finite_or_none
from .experiment_kinds import ExperimentKind
from .experiment_types import ReplicationRecord


class BiasBoundExperiment(BaseExperiment):
    """
    Exact bias term sum_i w_i (mu_{X_i}(g) - mu_x(g)) against the modulus of
    continuity at the inflated radius ((1 + eta) k / (n V_d f_X(x)))^(1/d).
    """
    kind = ExperimentKind.BIAS_BOUND

    def __init__(self, spec):
        super().__init__(spec)
        self.etas = sorted(spec.eta_grid) if spec.eta_grid else [spec.eta]
        self._omega: Dict[tuple, List[float]] = {}

    def validate(self):
        self.require_functionals()

    def omegas(self, n: int, k: int, i: int, g) -> List[float]:
        """Modulus at each eta, made nondecreasing in eta."""
        key = (n, k, i, g.id)
        if key not in self._omega:
            x = self.points[i]
            f_x = float(self.truth.density(x)[0])
            values, running = [], 0.0
            for eta in self.etas:
                radius = ((1.0 + eta) * k / (n * self.volume * f_x)) ** (1.0 / self.spec.dimension)
                running = max(running, modulus_of_continuity(self.truth, g, x, radius, self.spec.modulus_grid, self.norm))
                values.append(running)
            self._omega[key] = values
        return self._omega[key]

    def replicate(self, replication: int) -> List[ReplicationRecord]:
        records = []
        truths = self.truth_at(self.points)
        for stream, n in enumerate(self.spec.n_grid):
            k = self.k_for(n)
            sample = self.sample(replication, stream, n)
            for i, x in enumerate(self.points):
                measure = knn_measure(sample, x, k, self.norm)
                for g, mu in zip(self.functionals, truths):
                    bias = float(np.sum(self.truth.conditional_mean(g, measure.in_ball_covariates) - mu[i]) / measure.k)
                    records.append(self.record(replication, n, k, i, g.id, "bias", bias))
                    for eta, omega in zip(self.etas, self.omegas(n, k, i, g)):
                        records.append(self.record(replication, n, k, i, g.id, "omega", omega, param=eta))
                        records.append(self.record(replication, n, k, i, g.id, "violated", float(abs(bias) > omega), param=eta))
        return records

    def aggregate(self, frame: pd.DataFrame) -> Dict[str, Optional[float]]:
        aggregates = {}
        for n in self.spec.n_grid:
            for i in range(self.points.shape[0]):
                for g in self.functionals:
                    labels = dict(n=n, point=i, functional=g.id)
                    bias = self.select(frame, metric="bias", **labels)["value"].to_numpy()
                    aggregates[aggregate_key("mean_abs_bias", **labels)] = finite_or_none(np.mean(np.abs(bias)))
                    for eta in self.etas:
                        violated = self.select(frame, metric="violated", param=eta, **labels)["value"].to_numpy()
                        aggregates[aggregate_key("violation_frequency", eta=eta, **labels)] = finite_or_none(np.mean(violated))
        return aggregates
