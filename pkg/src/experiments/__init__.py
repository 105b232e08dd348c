from .experiment_kinds import ExperimentKind
from .experiment_types import (
    RECORD_COLUMNS,
    SUP_POINT,
    Calibration,
    ExperimentResult,
    ExperimentSpec,
    FixedK,
    PowerK,
    ReplicationRecord,
    WindowK,
)
from .base_experiment import BaseExperiment
from .experiment_factory import ExperimentFactory
