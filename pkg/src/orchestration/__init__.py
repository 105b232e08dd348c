from .orchestrator import (
    Orchestrator,
    calibrate_K,
    run_bias_bound,
    run_bound_validity,
    run_ci_coverage,
    run_clt,
    run_concentration,
    run_experiment,
    run_local_linear_variance,
    run_nw_contrast,
    run_radius_concentration,
    run_rate_sweep,
)
