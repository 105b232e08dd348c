import math
from typing import Dict, List, Optional

import numpy as np
import pandas as pd

from bounds import deterministic_radius
from measure import integrate, knn_measure, nw_measure
from util.errors import EmptyBallError, InvalidSpecError

from .base_experiment import BaseExperiment, aggregate_key, finite_or_none
from .experiment_kinds import ExperimentKind
from .experiment_types import ReplicationRecord

LOW, HIGH = 0, 1


class NwContrastExperiment(BaseExperiment):
    """
    k-NN against Nadaraya-Watson at a low-density and a high-density point.

    The Nadaraya-Watson bandwidth is the deterministic k-NN radius at the
    high-density point, so both estimators average about k points there.
    """
    kind = ExperimentKind.NW_CONTRAST

    def __init__(self, spec):
        super().__init__(spec)
        if spec.query_points is None:
            self.points = np.asarray(self.truth.contrast_points(), dtype=float)

    def validate(self):
        self.require_functionals()
        if self.points.shape[0] != 2:
            raise InvalidSpecError("nw_contrast needs exactly two query points (low density, high density).")

    def bandwidth(self, n: int, k: int) -> float:
        f_high = float(self.truth.density(self.points[HIGH])[0])
        return deterministic_radius(self.bound_inputs(n, k).model_copy(update={"f_x": f_high}))

    def replicate(self, replication: int) -> List[ReplicationRecord]:
        records = []
        truths = self.truth_at(self.points)
        for stream, n in enumerate(self.spec.n_grid):
            k = self.k_for(n)
            tau = self.bandwidth(n, k)
            nw_scale = math.sqrt(n * tau ** self.spec.dimension)
            sample = self.sample(replication, stream, n)
            for i, x in enumerate(self.points):
                knn = knn_measure(sample, x, k, self.norm)
                try:
                    nw = nw_measure(sample, x, tau, self.norm)
                except EmptyBallError:
                    nw = None
                for g, mu in zip(self.functionals, truths):
                    records.append(self.record(replication, n, k, i, g.id, "knn_scaled_error",
                                               math.sqrt(k) * (integrate(knn, g) - mu[i])))
                    if nw is None:
                        records.append(self.record(replication, n, k, i, g.id, "nw_empty", 1.0, param=tau))
                    else:
                        records.append(self.record(replication, n, k, i, g.id, "nw_scaled_error",
                                                   nw_scale * (integrate(nw, g) - mu[i]), param=tau))
        return records

    def aggregate(self, frame: pd.DataFrame) -> Dict[str, Optional[float]]:
        aggregates = {}
        for n in self.spec.n_grid:
            for g in self.functionals:
                variances = {}
                for estimator in ("knn", "nw"):
                    for i in (LOW, HIGH):
                        values = self.select(frame, n=n, point=i, functional=g.id,
                                             metric=f"{estimator}_scaled_error")["value"].to_numpy()
                        var = float(np.var(values, ddof=1)) if values.size > 1 else float("nan")
                        variances[(estimator, i)] = var
                        aggregates[aggregate_key(f"{estimator}_variance", n=n, point=i, functional=g.id)] = finite_or_none(var)
                    ratio = variances[(estimator, LOW)] / variances[(estimator, HIGH)] \
                        if variances[(estimator, HIGH)] > 0 else float("nan")
                    aggregates[aggregate_key(f"{estimator}_variance_ratio", n=n, functional=g.id)] = finite_or_none(ratio)
                for i in (LOW, HIGH):
                    empty = self.select(frame, n=n, point=i, functional=g.id, metric="nw_empty")
                    aggregates[aggregate_key("nw_empty_balls", n=n, point=i, functional=g.id)] = float(len(empty))
            f_low, f_high = self.truth.density(self.points)
            aggregates[aggregate_key("density_ratio", n=n)] = finite_or_none(f_high / f_low)
        return aggregates
