import logging

from measure import SampleSet
from util.errors import InvalidArgumentError

from .model_types import GroundTruth, RngSpec


def draw_sample(truth: GroundTruth, n: int, rng: RngSpec) -> SampleSet:
    """n i.i.d. pairs from the model; the same RngSpec always gives the same sample."""
    if int(n) < 1:
        raise InvalidArgumentError(f"Sample size must be >= 1, got {n}.")
    generator = rng.generator()
    covariates = truth.sample_covariates(generator, int(n))
    noise = truth.sample_noise(generator, int(n))
    responses = truth.regression(covariates) + truth.noise_scale(covariates) * noise
    logging.debug("[synthetic] Drew n=%d from %s (seed=%d, replication=%d, stream=%d)",
                  n, truth.model_id, rng.seed, rng.replication, rng.stream)
    return SampleSet.from_arrays(covariates, responses)
