from typing import Dict, List, Optional

import numpy as np
import pandas as pd

from bounds import admissible_k_window, deterministic_radius, uniform_radius_bound
from geometry import knn_radius

from .base_experiment import BaseExperiment, aggregate_key, finite_or_none
from .experiment_kinds import ExperimentKind
from .experiment_types import SUP_POINT, ReplicationRecord

RADIUS = "radius"


class RadiusConcentrationExperiment(BaseExperiment):
    """
    Ratio (tau_hat / tau)^d of the k-NN radius to the deterministic radius at each
    query point, and whether the largest radius over the lattice exceeds the
    uniform radius bound.
    """
    kind = ExperimentKind.RADIUS_CONCENTRATION

    def regime_notes(self) -> List[str]:
        for n, k in zip(self.spec.n_grid, self.k_values()):
            window = admissible_k_window(self.bound_inputs(n, k))
            if not (window.radius_k_min <= k <= window.radius_k_max):
                self.warn(f"k={k} at n={n} is outside the radius-bound window "
                          f"[{window.radius_k_min:.4g}, {window.radius_k_max:.4g}]; outside regime")
        return self.notes

    def replicate(self, replication: int) -> List[ReplicationRecord]:
        records = []
        d = self.spec.dimension
        densities = self.truth.density(self.points)
        for stream, n in enumerate(self.spec.n_grid):
            k = self.k_for(n)
            sample = self.sample(replication, stream, n)
            inputs = self.bound_inputs(n, k)
            for i, x in enumerate(self.points):
                tau_hat = knn_radius(sample.covariates, x, k, self.norm).radius
                tau = deterministic_radius(inputs.model_copy(update={"f_x": float(densities[i])}))
                records.append(self.record(replication, n, k, i, RADIUS, "radius_ratio", (tau_hat / tau) ** d))

            largest = max(knn_radius(sample.covariates, x, k, self.norm).radius for x in self.lattice(n, k))
            cap = uniform_radius_bound(inputs)
            records.append(self.record(replication, n, k, SUP_POINT, RADIUS, "sup_radius", largest))
            records.append(self.record(replication, n, k, SUP_POINT, RADIUS, "radius_bound", cap))
            records.append(self.record(replication, n, k, SUP_POINT, RADIUS, "bound_violated", float(largest > cap)))
        return records

    def aggregate(self, frame: pd.DataFrame) -> Dict[str, Optional[float]]:
        aggregates = {}
        for n in self.spec.n_grid:
            for i in range(self.points.shape[0]):
                ratios = self.select(frame, n=n, point=i, metric="radius_ratio")["value"].to_numpy()
                aggregates[aggregate_key("median_radius_ratio", n=n, point=i)] = finite_or_none(np.median(ratios))
                aggregates[aggregate_key("mean_radius_ratio", n=n, point=i)] = finite_or_none(np.mean(ratios))
                aggregates[aggregate_key("q05_radius_ratio", n=n, point=i)] = finite_or_none(np.quantile(ratios, 0.05))
                aggregates[aggregate_key("q95_radius_ratio", n=n, point=i)] = finite_or_none(np.quantile(ratios, 0.95))
            violated = self.select(frame, n=n, metric="bound_violated")["value"].to_numpy()
            aggregates[aggregate_key("radius_bound_violation_frequency", n=n)] = finite_or_none(np.mean(violated))
        return aggregates
