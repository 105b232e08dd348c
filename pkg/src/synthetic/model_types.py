import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Dict, List, Sequence, Tuple, Union

import numpy as np
from scipy.special import comb
from scipy.stats import norm as standard_normal

from measure import Functional, is_cdf_class
from util.errors import InvalidArgumentError, UnsupportedModelError

# Variance of the centred uniform noise on (-1/2, 1/2)
_UNIFORM_VARIANCE = 1.0 / 12.0


class NoiseKind(Enum):

    GAUSSIAN = "gaussian"
    UNIFORM = "uniform"


@dataclass(frozen=True)
class RngSpec:
    """
    Seed of one random stream.

    Attributes:
        seed: master seed shared by a whole experiment.
        replication: replication id.
        stream: independent sub-stream inside one replication (one per sample drawn).
    """
    seed: int
    replication: int = 0
    stream: int = 0

    def __post_init__(self):
        if min(self.seed, self.replication, self.stream) < 0:
            raise InvalidArgumentError("Seeds, replication ids and streams must be nonnegative.")

    def generator(self) -> np.random.Generator:
        sequence = np.random.SeedSequence(self.seed, spawn_key=(self.replication, self.stream))
        return np.random.Generator(np.random.Philox(sequence))


def _gaussian_partial_moments(a: np.ndarray, order: int) -> List[np.ndarray]:
    """E[e^j 1{e <= a}] for e ~ N(0,1), j = 0..order."""
    finite = np.isfinite(a)
    a_safe = np.where(finite, a, 0.0)
    phi = np.where(finite, standard_normal.pdf(a_safe), 0.0)
    moments = [standard_normal.cdf(a), -phi]
    for j in range(2, order + 1):
        moments.append((j - 1) * moments[j - 2] - a_safe ** (j - 1) * phi)
    return moments[: order + 1]


@dataclass(frozen=True, eq=False)
class GroundTruth:
    """
    A synthetic model on [0,1]^d whose laws depend on the first coordinate only.

    Covariates: the first coordinate has a piecewise-constant density with the given
    breaks and levels; the other coordinates are uniform. Responses:
    Y = m(x1) + s(x1) * e, with e standard normal or uniform on (-1/2, 1/2).
    """
    model_id: str
    description: str
    dimension: int
    mean_fn: Callable[[np.ndarray], np.ndarray]
    mean_lipschitz: float
    mean_bound: float
    scale_fn: Callable[[np.ndarray], np.ndarray]
    scale_lipschitz: float
    scale_min: float
    scale_max: float
    noise: NoiseKind = NoiseKind.GAUSSIAN
    density_breaks: Tuple[float, ...] = (0.0, 1.0)
    density_levels: Tuple[float, ...] = (1.0,)
    contrast: Tuple[float, float] = (0.25, 0.75)

    # Regularity constants

    @property
    def b_X(self) -> float:
        return float(min(self.density_levels))

    @property
    def U_X(self) -> float:
        return float(max(self.density_levels))

    @property
    def c(self) -> float:
        """Fraction of any ball of radius <= T centred in the cube that stays in the cube."""
        return 2.0 ** (-self.dimension)

    @property
    def T(self) -> float:
        return 1.0

    # Covariate law

    def _coerce(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        if z.ndim == 1:
            z = z.reshape(1, -1) if z.shape[0] == self.dimension else z.reshape(-1, 1)
        if z.shape[1] != self.dimension:
            raise InvalidArgumentError(f"Points have dimension {z.shape[1]}, model {self.model_id} has {self.dimension}.")
        return z

    def density(self, z) -> np.ndarray:
        z = self._coerce(z)
        inside = np.all((z >= 0.0) & (z <= 1.0), axis=1)
        piece = np.clip(np.searchsorted(self.density_breaks, z[:, 0], side="right") - 1,
                        0, len(self.density_levels) - 1)
        return np.where(inside, np.asarray(self.density_levels)[piece], 0.0)

    def sample_covariates(self, generator: np.random.Generator, n: int) -> np.ndarray:
        u = generator.random((n, self.dimension))
        breaks = np.asarray(self.density_breaks)
        levels = np.asarray(self.density_levels)
        cumulative = np.concatenate([[0.0], np.cumsum(levels * np.diff(breaks))])
        piece = np.clip(np.searchsorted(cumulative, u[:, 0], side="right") - 1, 0, levels.shape[0] - 1)
        u[:, 0] = breaks[piece] + (u[:, 0] - cumulative[piece]) / levels[piece]
        return u

    def sample_noise(self, generator: np.random.Generator, n: int) -> np.ndarray:
        if self.noise is NoiseKind.GAUSSIAN:
            return generator.standard_normal(n)
        return generator.random(n) - 0.5

    # Conditional law

    def regression(self, z) -> np.ndarray:
        return np.asarray(self.mean_fn(self._coerce(z)[:, 0]), dtype=float)

    @property
    def noise_variance(self) -> float:
        """Variance of the standardized noise e."""
        return 1.0 if self.noise is NoiseKind.GAUSSIAN else _UNIFORM_VARIANCE

    def noise_scale(self, z) -> np.ndarray:
        z = self._coerce(z)
        return np.broadcast_to(np.asarray(self.scale_fn(z[:, 0]), dtype=float), (z.shape[0],)).copy()

    def _term_mean(self, m: np.ndarray, s: np.ndarray, power: int, threshold) -> np.ndarray:
        if self.noise is NoiseKind.GAUSSIAN:
            a = np.full(m.shape, np.inf) if threshold is None else (threshold - m) / s
            moments = _gaussian_partial_moments(a, power)
            total = np.zeros(m.shape)
            for j in range(power + 1):
                total = total + comb(power, j, exact=True) * m ** (power - j) * s ** j * moments[j]
            return total
        lo = m - 0.5 * s
        hi = m + 0.5 * s
        top = hi if threshold is None else np.minimum(hi, np.maximum(threshold, lo))
        return (top ** (power + 1) - lo ** (power + 1)) / ((power + 1) * (hi - lo))

    def conditional_mean(self, g: Functional, z) -> np.ndarray:
        """mu_z(g) at every row of z, from the functional's monomial form."""
        if g.terms is None:
            raise UnsupportedModelError(f"Functional {g.id} has no analytic form.")
        if g.family == "coord":
            raise UnsupportedModelError("Synthetic models have scalar responses.")
        z = self._coerce(z)
        m = self.regression(z)
        s = self.noise_scale(z)
        total = np.zeros(z.shape[0])
        for term in g.terms:
            total = total + term.coef * self._term_mean(m, s, term.power, term.threshold)
        return total

    def conditional_cov(self, g1: Functional, g2: Functional, z) -> np.ndarray:
        return self.conditional_mean(g1 * g2, z) - self.conditional_mean(g1, z) * self.conditional_mean(g2, z)

    def conditional_cdf(self, t, z) -> np.ndarray:
        """F(t | X = z), vectorized over t for a single point or over points for a single t."""
        z = self._coerce(z)
        m = self.regression(z)
        s = self.noise_scale(z)
        a = (np.asarray(t, dtype=float) - m) / s
        if self.noise is NoiseKind.GAUSSIAN:
            return standard_normal.cdf(a)
        return np.clip(a + 0.5, 0.0, 1.0)

    def lipschitz(self, g: Union[Functional, str]) -> float:
        """Lipschitz constant of z -> mu_z(g) on the support, for catalog functionals."""
        family = "cdf" if isinstance(g, str) and is_cdf_class(g) else getattr(g, "family", None)
        if family == "const":
            return 0.0
        if family == "identity":
            return self.mean_lipschitz
        if family == "square":
            second_moment = self.noise_variance
            return 2.0 * self.mean_bound * self.mean_lipschitz + 2.0 * self.scale_max * self.scale_lipschitz * second_moment
        if family == "cdf":
            if self.noise is NoiseKind.GAUSSIAN:
                return (standard_normal.pdf(0.0) * self.mean_lipschitz
                        + standard_normal.pdf(1.0) * self.scale_lipschitz) / self.scale_min
            return (self.mean_lipschitz + 0.5 * self.scale_lipschitz) / self.scale_min
        raise UnsupportedModelError(f"No analytic Lipschitz constant for {getattr(g, 'id', g)}.")

    def sup_variance(self, functionals: Union[str, Sequence[Functional]], grid: int = 1001) -> float:
        """sigma_G^2: supremum over the support and the class of cov_z(g, g)."""
        if isinstance(functionals, str):
            if is_cdf_class(functionals):
                return 0.25
            raise InvalidArgumentError(f"Unknown functional class '{functionals}'.")
        z = np.full((grid, self.dimension), 0.5)
        z[:, 0] = np.linspace(0.0, 1.0, grid)
        return float(max(np.max(self.conditional_cov(g, g, z)) for g in functionals))

    def default_query_points(self) -> List[List[float]]:
        return [[0.5] * self.dimension]

    def contrast_points(self) -> List[List[float]]:
        return [[x1] + [0.5] * (self.dimension - 1) for x1 in self.contrast]

    def constants(self) -> Dict[str, float]:
        return {
            "model": self.model_id,
            "dimension": self.dimension,
            "noise": self.noise.value,
            "b_X": self.b_X,
            "U_X": self.U_X,
            "c": self.c,
            "T": self.T,
            "L_identity": self.mean_lipschitz,
            "L_cdf": self.lipschitz("cdf"),
        }

    def __repr__(self) -> str:
        return f"GroundTruth({self.model_id}, d={self.dimension})"


def has_unit_mass(levels: Sequence[float], breaks: Sequence[float]) -> bool:
    mass = sum(level * (b - a) for level, a, b in zip(levels, breaks[:-1], breaks[1:]))
    return math.isclose(mass, 1.0, rel_tol=1e-12)
