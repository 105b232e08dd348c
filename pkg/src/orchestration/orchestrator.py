import logging
import math
from pathlib import Path
from typing import List, Optional, Sequence, Union

import numpy as np
from joblib import Parallel, delayed
from opentelemetry.trace import SpanKind

from connectors.results import ResultStore
from experiments import (
    BaseExperiment,
    Calibration,
    ExperimentFactory,
    ExperimentKind,
    ExperimentResult,
    ExperimentSpec,
    ReplicationRecord,
    RECORD_COLUMNS,
)
from telemetry import Telemetry
from util.errors import InvalidSpecError

tracer = Telemetry.get_tracer(__name__)

# Replication batches per worker; more batches balance uneven replication costs.
BATCHES_PER_WORKER = 4


def _replicate_batch(spec_json: str, replications: Sequence[int]) -> List[list]:
    """Runs in a worker process: rebuild the experiment from its spec and evaluate a batch of replications."""
    spec = ExperimentSpec.model_validate_json(spec_json)
    experiment = ExperimentFactory.get_experiment(spec)
    rows = []
    for replication in replications:
        rows.extend(record.as_row() for record in experiment.replicate(replication))
    return rows


def _batches(replications: int, workers: int) -> List[List[int]]:
    count = max(1, min(replications, workers * BATCHES_PER_WORKER))
    size = math.ceil(replications / count)
    return [list(range(start, min(start + size, replications))) for start in range(0, replications, size)]


class Orchestrator:
    """
    Runs one experiment: replications are mapped over workers, merged in
    replication order, aggregated and written to the output directory.
    """

    def __init__(self, spec: ExperimentSpec, workers: Optional[int] = None, out_dir: Optional[Union[str, Path]] = None):
        self.spec = spec
        self.workers = int(workers or spec.workers)
        self.out_dir = out_dir if out_dir is not None else spec.output
        self.experiment: BaseExperiment = None

    @classmethod
    def create(cls, spec: ExperimentSpec, workers: Optional[int] = None,
               out_dir: Optional[Union[str, Path]] = None) -> "Orchestrator":
        instance = cls(spec, workers=workers, out_dir=out_dir)
        instance.experiment = ExperimentFactory.get_experiment(spec)
        return instance

    def collect(self) -> List[ReplicationRecord]:
        spec_json = self.spec.model_dump_json()
        batches = _batches(self.spec.replications, self.workers)
        logging.info("[orchestrator] %s: %d replications in %d batches on %d workers",
                     self.spec.kind.value, self.spec.replications, len(batches), self.workers)
        if self.workers == 1:
            parts = [_replicate_batch(spec_json, batch) for batch in batches]
        else:
            parts = Parallel(n_jobs=self.workers)(delayed(_replicate_batch)(spec_json, batch) for batch in batches)

        rows = [row for part in parts for row in part]
        # stable sort keeps each replication's own record order
        rows.sort(key=lambda row: row[0])
        return [ReplicationRecord(**dict(zip(RECORD_COLUMNS, row))) for row in rows]

    def run(self) -> ExperimentResult:
        with tracer.start_as_current_span("run_experiment", kind=SpanKind.INTERNAL) as span:
            span.set_attribute("kind", self.spec.kind.value)
            span.set_attribute("replications", self.spec.replications)
            try:
                experiment = self.experiment or ExperimentFactory.get_experiment(self.spec)
                result = ExperimentResult(kind=self.spec.kind, spec=self.spec.echo())

                reason = experiment.skip_reason()
                if reason is not None:
                    logging.warning("[orchestrator] Skipping %s: %s", self.spec.kind.value, reason)
                    result.status = "skipped"
                    result.notes.append(reason)
                else:
                    result.notes.extend(experiment.regime_notes())
                    result.constants = experiment.constants()
                    result.records = self.collect()
                    result.aggregates = experiment.aggregate(BaseExperiment.frame(result.records))

                if self.out_dir:
                    ResultStore(self.out_dir).write_result(result)
                return result
            except Exception as e:
                Telemetry.record_exception(span, e)
                raise

    def calibrate(self) -> Calibration:
        """
        Smallest K on the spec's grid whose violation frequency over the whole
        family is at most delta.
        """
        if self.spec.kind is not ExperimentKind.BOUND_VALIDITY:
            raise InvalidSpecError("K calibration runs on a bound_validity spec.")
        with tracer.start_as_current_span("calibrate_K", kind=SpanKind.INTERNAL) as span:
            try:
                experiment = self.experiment or ExperimentFactory.get_experiment(self.spec)
                reason = experiment.skip_reason()
                if reason is not None:
                    raise InvalidSpecError(f"Cannot calibrate: {reason}.")
                experiment.regime_notes()
                frame = BaseExperiment.frame(self.collect())

                frequencies = [float(np.mean(experiment.violations(frame, K))) for K in self.spec.K_grid]
                chosen = next((i for i, f in enumerate(frequencies) if f <= self.spec.delta), None)
                calibration = Calibration(
                    spec=self.spec.echo(),
                    chosen_K=None if chosen is None else self.spec.K_grid[chosen],
                    violation_frequency=None if chosen is None else frequencies[chosen],
                    target=self.spec.delta,
                    grid=list(self.spec.K_grid),
                    frequencies=frequencies,
                )
                if chosen is None:
                    logging.warning("[orchestrator] No K on the grid keeps the violation frequency below %.3g.", self.spec.delta)
                else:
                    logging.info("[orchestrator] Calibrated K=%.4g (violation frequency %.4g).",
                                 calibration.chosen_K, calibration.violation_frequency)
                if self.out_dir:
                    ResultStore(self.out_dir).write_calibration(calibration)
                return calibration
            except Exception as e:
                Telemetry.record_exception(span, e)
                raise

    @staticmethod
    def recompute_aggregates(result: ExperimentResult):
        spec = ExperimentSpec.model_validate(result.spec)
        experiment = ExperimentFactory.get_experiment(spec)
        return experiment.aggregate(BaseExperiment.frame(result.records))

    @staticmethod
    def load(out_dir: Union[str, Path]) -> ExperimentResult:
        """Load a stored result and check its aggregates against the records."""
        return ResultStore(out_dir).load_result(recompute=Orchestrator.recompute_aggregates)


def run_experiment(spec: ExperimentSpec, workers: Optional[int] = None,
                   out_dir: Optional[Union[str, Path]] = None) -> ExperimentResult:
    return Orchestrator.create(spec, workers=workers, out_dir=out_dir).run()


def calibrate_K(spec: ExperimentSpec, workers: Optional[int] = None,
                out_dir: Optional[Union[str, Path]] = None) -> Calibration:
    return Orchestrator.create(spec, workers=workers, out_dir=out_dir).calibrate()


def _runner(kind: ExperimentKind):
    def run(spec: ExperimentSpec, workers: Optional[int] = None,
            out_dir: Optional[Union[str, Path]] = None) -> ExperimentResult:
        if spec.kind is not kind:
            spec = spec.model_copy(update={"kind": kind})
        return run_experiment(spec, workers=workers, out_dir=out_dir)
    run.__name__ = f"run_{kind.value}"
    run.__doc__ = f"Run a {kind.value} experiment."
    return run


run_radius_concentration = _runner(ExperimentKind.RADIUS_CONCENTRATION)
run_clt = _runner(ExperimentKind.CLT)
run_ci_coverage = _runner(ExperimentKind.CI_COVERAGE)
run_rate_sweep = _runner(ExperimentKind.RATE_SWEEP)
run_nw_contrast = _runner(ExperimentKind.NW_CONTRAST)
run_bound_validity = _runner(ExperimentKind.BOUND_VALIDITY)
run_bias_bound = _runner(ExperimentKind.BIAS_BOUND)
run_local_linear_variance = _runner(ExperimentKind.LOCAL_LINEAR_VARIANCE)
run_concentration = _runner(ExperimentKind.CONCENTRATION)
