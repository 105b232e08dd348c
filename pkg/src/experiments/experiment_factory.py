from .base_experiment import BaseExperiment
from .bias_bound import BiasBoundExperiment
from .bound_validity import BoundValidityExperiment
from .ci_coverage import CiCoverageExperiment
from .clt import CltExperiment
from .concentration import ConcentrationExperiment
from .experiment_kinds import ExperimentKind
from .experiment_types import ExperimentSpec
from .local_linear_variance import LocalLinearVarianceExperiment
from .nw_contrast import NwContrastExperiment
from .radius_concentration import RadiusConcentrationExperiment
from .rate_sweep import RateSweepExperiment

_EXPERIMENTS = {
    ExperimentKind.RADIUS_CONCENTRATION.value: RadiusConcentrationExperiment,
    ExperimentKind.CLT.value: CltExperiment,
    ExperimentKind.CI_COVERAGE.value: CiCoverageExperiment,
    ExperimentKind.RATE_SWEEP.value: RateSweepExperiment,
    ExperimentKind.NW_CONTRAST.value: NwContrastExperiment,
    ExperimentKind.BOUND_VALIDITY.value: BoundValidityExperiment,
    ExperimentKind.BIAS_BOUND.value: BiasBoundExperiment,
    ExperimentKind.LOCAL_LINEAR_VARIANCE.value: LocalLinearVarianceExperiment,
    ExperimentKind.CONCENTRATION.value: ConcentrationExperiment,
}


class ExperimentFactory:
    @staticmethod
    def get_experiment(spec: ExperimentSpec) -> BaseExperiment:
        """
        Return an instance of the experiment class corresponding to the spec's kind.
        """
        key = spec.kind.value if isinstance(spec.kind, ExperimentKind) else str(spec.kind)
        experiment_class = _EXPERIMENTS.get(key)
        if experiment_class is None:
            raise ValueError(f"Unknown experiment kind: {key}")
        return experiment_class.create(spec)
