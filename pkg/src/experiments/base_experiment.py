import logging
from functools import cached_property
from abc import ABC, abstractmethod
from typing import Dict, Iterable, List, Optional

import numpy as np
import pandas as pd

from bounds import BoundInputs, admissible_k_window, uniform_radius_bound
from geometry import Norm, unit_ball_volume
from measure import SampleSet, integrate, is_cdf_class, knn_measure, parse_functional, sup_cdf_error
from synthetic import RngSpec, draw_sample, get_model
from util.errors import InvalidSpecError
from util.tools import power_k

from .experiment_kinds import ExperimentKind
from .experiment_types import (
    RECORD_COLUMNS,
    SUP_POINT,
    ExperimentSpec,
    FixedK,
    PowerK,
    ReplicationRecord,
)

CLASS_LABEL = "cdf"


def aggregate_key(name: str, **labels) -> str:
    """'name[n=100,point=0]' style keys for aggregates."""
    if not labels:
        return name
    return f"{name}[{','.join(f'{k}={v}' for k, v in labels.items())}]"


def finite_or_none(value) -> Optional[float]:
    value = float(value)
    return value if np.isfinite(value) else None


class BaseExperiment(ABC):
    """
    Base class for Monte Carlo experiments.

    A subclass draws and evaluates one replication in `replicate` and reduces
    the long-format records of all replications in `aggregate`. Both must be
    deterministic functions of the spec and their arguments.
    """
    kind: ExperimentKind

    def __init__(self, spec: ExperimentSpec):
        self.spec = spec
        self.truth = get_model(spec.model, spec.dimension)
        self.norm = Norm(spec.norm, spec.dimension)
        self.volume = unit_ball_volume(self.norm).volume
        self.uses_class = any(is_cdf_class(token) for token in spec.functionals)
        self.functionals = [parse_functional(token) for token in spec.functionals if not is_cdf_class(token)]
        points = spec.query_points or self.truth.default_query_points()
        self.points = np.asarray(points, dtype=float).reshape(-1, spec.dimension)
        self.notes: List[str] = []
        self._truth_cache: Dict[tuple, np.ndarray] = {}

    @classmethod
    def create(cls, spec: ExperimentSpec) -> "BaseExperiment":
        instance = cls(spec)
        instance.validate()
        return instance

    def validate(self):
        """Raise InvalidSpecError when the spec cannot be run by this experiment."""

    def require_functionals(self):
        if not self.functionals:
            raise InvalidSpecError(f"{self.kind.value} needs explicit functionals, not only the 'cdf' class.")

    # k schedule

    def k_for(self, n: int) -> Optional[int]:
        rule = self.spec.k_rule
        if isinstance(rule, FixedK):
            return rule.k
        if isinstance(rule, PowerK):
            return power_k(n, rule.a)
        window = admissible_k_window(self.bound_inputs(n, 1))
        if window.is_empty:
            return None
        k = window.project(power_k(n, 2.0 / (self.spec.dimension + 2)))
        return k if 1 <= k <= n else None

    def k_values(self) -> List[int]:
        return [self.k_for(n) for n in self.spec.n_grid]

    def skip_reason(self) -> Optional[str]:
        for n, k in zip(self.spec.n_grid, self.k_values()):
            if k is None:
                return f"admissible k window is empty at n={n}"
            if k > n:
                return f"k={k} exceeds n={n}"
        return None

    # Constants

    @cached_property
    def class_variance(self) -> float:
        values = []
        if self.uses_class:
            values.append(self.truth.sup_variance(CLASS_LABEL))
        if self.functionals:
            values.append(self.truth.sup_variance(self.functionals))
        return max(values)

    @cached_property
    def class_lipschitz(self) -> float:
        values = [self.truth.lipschitz(CLASS_LABEL)] if self.uses_class else []
        values.extend(self.truth.lipschitz(g) for g in self.functionals)
        return max(values)

    def bound_inputs(self, n: int, k: int, K: Optional[float] = None) -> BoundInputs:
        return BoundInputs(
            d=self.spec.dimension, n=n, k=k, delta=self.spec.delta,
            v=self.spec.vc_v, A=self.spec.vc_A,
            sigma2_G=self.class_variance, L=self.class_lipschitz,
            b_X=self.truth.b_X, U_X=self.truth.U_X, c=self.truth.c, T=self.truth.T,
            V_d=self.volume, norm=self.spec.norm, K=self.spec.K if K is None else K,
        )

    def constants(self) -> Dict:
        constants = dict(self.truth.constants())
        constants["norm"] = self.spec.norm.value
        constants["V_d"] = self.volume
        constants["query_points"] = self.points.tolist()
        constants["bound_inputs"] = [
            self.bound_inputs(n, k).model_dump(mode="json")
            for n, k in zip(self.spec.n_grid, self.k_values()) if k is not None
        ]
        return constants

    # Sampling and lattices

    def sample(self, replication: int, stream: int, n: int) -> SampleSet:
        return draw_sample(self.truth, n, RngSpec(seed=self.spec.seed, replication=replication, stream=stream))

    def lattice(self, n: int, k: int) -> np.ndarray:
        """x_grid_size points per axis over the first min(d, 2) coordinates, the rest held at 1/2."""
        lo, hi = 0.0, 1.0
        if self.spec.interior_only:
            shrink = uniform_radius_bound(self.bound_inputs(n, k))
            lo, hi = shrink, 1.0 - shrink
            if lo >= hi:
                lo = hi = 0.5
        axis = np.linspace(lo, hi, self.spec.x_grid_size)
        d = self.spec.dimension
        if d == 1:
            return axis.reshape(-1, 1)
        first, second = np.meshgrid(axis, axis, indexing="ij")
        grid = np.full((first.size, d), 0.5)
        grid[:, 0] = first.ravel()
        grid[:, 1] = second.ravel()
        return grid

    def truth_at(self, points: np.ndarray) -> List[np.ndarray]:
        """mu_z(g) for every functional at every point, cached per point set."""
        key = (points.shape, points.tobytes())
        if key not in self._truth_cache:
            self._truth_cache[key] = [self.truth.conditional_mean(g, points) for g in self.functionals]
        return self._truth_cache[key]

    def sup_error(self, sample: SampleSet, k: int, points: np.ndarray) -> float:
        """Supremum over the points and the functional class of |mu_hat(g) - mu_x(g)|."""
        truths = self.truth_at(points)
        worst = 0.0
        for i, x in enumerate(points):
            measure = knn_measure(sample, x, k, self.norm)
            for g, values in zip(self.functionals, truths):
                worst = max(worst, abs(integrate(measure, g) - values[i]))
            if self.uses_class:
                worst = max(worst, sup_cdf_error(measure, lambda t, z=x: self.truth.conditional_cdf(t, z)))
        return worst

    @property
    def class_id(self) -> str:
        return "+".join(self.spec.functionals)

    # Records

    @staticmethod
    def record(replication: int, n: int, k: int, point: int, functional: str, metric: str,
               value: float, param: float = 0.0) -> ReplicationRecord:
        return ReplicationRecord(replication=replication, n=n, k=k, point=point, functional=functional,
                                 metric=metric, param=float(param), value=float(value))

    @staticmethod
    def frame(records: Iterable[ReplicationRecord]) -> pd.DataFrame:
        rows = [r.as_row() for r in records]
        return pd.DataFrame(rows, columns=RECORD_COLUMNS)

    @staticmethod
    def select(frame: pd.DataFrame, **filters) -> pd.DataFrame:
        mask = np.ones(len(frame), dtype=bool)
        for column, value in filters.items():
            mask &= (frame[column] == value).to_numpy()
        return frame[mask].sort_values("replication", kind="stable")

    def warn(self, message: str):
        if message not in self.notes:
            logging.warning("[experiments] %s", message)
            self.notes.append(message)

    def regime_notes(self) -> List[str]:
        """Warnings about runs outside the regime the checks are stated for."""
        return []

    @abstractmethod
    def replicate(self, replication: int) -> List[ReplicationRecord]:
        """All records of one replication."""

    @abstractmethod
    def aggregate(self, frame: pd.DataFrame) -> Dict[str, Optional[float]]:
        """Aggregates computed from the long-format records only."""
