from .bound_types import AdmissibleWindow, BoundInputs, BoundsReport
from .formulas import (
    admissible_k_window,
    chernoff_lower,
    chernoff_upper,
    deterministic_radius,
    evaluate_bounds,
    local_process_bound,
    uniform_ball_bound,
    uniform_error_bound,
    uniform_error_terms,
    uniform_radius_bound,
    vc_concentration_bound,
)
