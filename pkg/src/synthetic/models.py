import logging
from typing import List

import numpy as np

from util.errors import InvalidArgumentError

from .model_types import GroundTruth, NoiseKind, has_unit_mass

MODEL_IDS = ("M0", "M1", "M2", "M3", "M4", "M5")


def _sine(x1):
    return np.sin(2.0 * np.pi * x1)


def _flat(x1):
    return np.zeros_like(x1)


def _constant_scale(value: float):
    return lambda x1: np.full_like(x1, value)


def _build(model_id: str, dimension: int) -> GroundTruth:
    if model_id == "M0":
        return GroundTruth(
            model_id="M0", description="flat: Y = N(0, 0.5^2), no covariate effect",
            dimension=dimension, mean_fn=_flat, mean_lipschitz=0.0, mean_bound=0.0,
            scale_fn=_constant_scale(0.5), scale_lipschitz=0.0, scale_min=0.5, scale_max=0.5,
        )
    if model_id == "M1":
        return GroundTruth(
            model_id="M1", description="sine: Y = sin(2 pi x1) + N(0, 0.5^2)",
            dimension=dimension, mean_fn=_sine, mean_lipschitz=2.0 * np.pi, mean_bound=1.0,
            scale_fn=_constant_scale(0.5), scale_lipschitz=0.0, scale_min=0.5, scale_max=0.5,
        )
    if model_id == "M2":
        return GroundTruth(
            model_id="M2", description="two-level density 0.25 / 1.75 split at x1 = 1/2, sine response",
            dimension=dimension, mean_fn=_sine, mean_lipschitz=2.0 * np.pi, mean_bound=1.0,
            scale_fn=_constant_scale(0.5), scale_lipschitz=0.0, scale_min=0.5, scale_max=0.5,
            density_breaks=(0.0, 0.5, 1.0), density_levels=(0.25, 1.75),
        )
    if model_id == "M3":
        return GroundTruth(
            model_id="M3", description="heteroscedastic: Y = cos(pi x1) + (0.2 + 0.3 x1) N(0, 1)",
            dimension=dimension, mean_fn=lambda x1: np.cos(np.pi * x1), mean_lipschitz=np.pi, mean_bound=1.0,
            scale_fn=lambda x1: 0.2 + 0.3 * x1, scale_lipschitz=0.3, scale_min=0.2, scale_max=0.5,
        )
    if model_id == "M4":
        return GroundTruth(
            model_id="M4", description="linear: Y = x1 + N(0, 0.25^2)",
            dimension=dimension, mean_fn=lambda x1: np.asarray(x1, dtype=float), mean_lipschitz=1.0, mean_bound=1.0,
            scale_fn=_constant_scale(0.25), scale_lipschitz=0.0, scale_min=0.25, scale_max=0.25,
        )
    if model_id == "M5":
        return GroundTruth(
            model_id="M5", description="sine with uniform noise on (-0.5, 0.5)",
            dimension=dimension, mean_fn=_sine, mean_lipschitz=2.0 * np.pi, mean_bound=1.0,
            scale_fn=_constant_scale(1.0), scale_lipschitz=0.0, scale_min=1.0, scale_max=1.0,
            noise=NoiseKind.UNIFORM,
        )
    raise InvalidArgumentError(f"Unknown model '{model_id}', expected one of {', '.join(MODEL_IDS)}.")


def get_model(model_id: str, dimension: int = 1) -> GroundTruth:
    if int(dimension) < 1:
        raise InvalidArgumentError(f"Model dimension must be >= 1, got {dimension}.")
    truth = _build(str(model_id).strip().upper(), int(dimension))
    if not has_unit_mass(truth.density_levels, truth.density_breaks):
        raise InvalidArgumentError(f"Model {truth.model_id} density does not integrate to one.")
    logging.debug("[synthetic] Built %r", truth)
    return truth


def model_catalog(dimension: int = 1) -> List[GroundTruth]:
    return [get_model(model_id, dimension) for model_id in MODEL_IDS]
