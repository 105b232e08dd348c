from typing import Dict, List, Optional

import numpy as np
import pandas as pd

from bounds import chernoff_lower, chernoff_upper, uniform_ball_bound
from geometry import PointCloud, ball_indices
from synthetic import RngSpec

from .base_experiment import BaseExperiment, aggregate_key, finite_or_none
from .experiment_kinds import ExperimentKind
from .experiment_types import SUP_POINT, ReplicationRecord

BINOMIAL = "binomial"
BALLS = "balls"
# Largest ball radius of the sweep; every ball lies inside the unit cube.
MAX_BALL_RADIUS = 0.25


class ConcentrationExperiment(BaseExperiment):
    """
    Monte Carlo checks of the Chernoff bounds on a Binomial(n, k/n) count and of
    the uniform lower bound on empirical ball masses of a uniform sample on the
    unit cube. The model setting only supplies d and the norm.
    """
    kind = ExperimentKind.CONCENTRATION

    def replicate(self, replication: int) -> List[ReplicationRecord]:
        records = []
        d = self.spec.dimension
        delta = self.spec.delta
        for stream, n in enumerate(self.spec.n_grid):
            k = self.k_for(n)
            generator = RngSpec(seed=self.spec.seed, replication=replication, stream=stream).generator()

            draw = int(generator.binomial(n, k / n))
            records.append(self.record(replication, n, k, SUP_POINT, BINOMIAL, "chernoff_lower_violated",
                                       float(draw < chernoff_lower(k, delta))))
            records.append(self.record(replication, n, k, SUP_POINT, BINOMIAL, "chernoff_upper_violated",
                                       float(draw > chernoff_upper(k, delta))))

            cloud = PointCloud(generator.random((n, d)))
            radii = generator.uniform(0.0, MAX_BALL_RADIUS, self.spec.ball_count)
            offsets = generator.random((self.spec.ball_count, d))
            failures = 0
            for radius, offset in zip(radii, offsets):
                if radius <= 0:
                    continue
                center = radius + (1.0 - 2.0 * radius) * offset
                mass = ball_indices(cloud, center, radius, self.norm).shape[0] / n
                if mass < uniform_ball_bound(self.volume * radius ** d, n, d, delta):
                    failures += 1
            records.append(self.record(replication, n, k, SUP_POINT, BALLS, "ball_violated", float(failures > 0)))
            records.append(self.record(replication, n, k, SUP_POINT, BALLS, "ball_violation_share",
                                       failures / self.spec.ball_count))
        return records

    def aggregate(self, frame: pd.DataFrame) -> Dict[str, Optional[float]]:
        aggregates = {}
        for n in self.spec.n_grid:
            for metric in ("chernoff_lower_violated", "chernoff_upper_violated", "ball_violated"):
                values = self.select(frame, n=n, metric=metric)["value"].to_numpy()
                aggregates[aggregate_key(metric.replace("_violated", "_violation_frequency"), n=n)] = finite_or_none(np.mean(values))
            share = self.select(frame, n=n, metric="ball_violation_share")["value"].to_numpy()
            aggregates[aggregate_key("mean_ball_violation_share", n=n)] = finite_or_none(np.mean(share))
        return aggregates
