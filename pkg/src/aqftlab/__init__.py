"""Exact and approximate QFT phase estimation: circuits, semiclassical trials, bounds."""

from .bounds import (
    FIXED_BOUND_CONST,
    QFT_BASELINE,
    BoundsReport,
    aqft_lower_bound,
    barenco_bound,
    bounds_report,
    cos_product_identity,
    fixed_bound,
    log_rule,
)
from .circuits import CircuitPlan, Gate, GateCount, build_aqft, build_qft, gate_count, inverse, run
from .phase import BitString, Phase, chi, nearest_estimate, phase_from_bits, wrapped_distance
from .semiclassical import (
    Criterion,
    RunRecord,
    TrialSpec,
    bit_success_probability,
    delta_p,
    full_distribution,
    path_probability,
    sample_run,
    success_probability_exact,
)
from .statevector import StateVector, basis_state, dft_reference, prepare_phase_register

__all__ = [
    "aqft_lower_bound",
    "barenco_bound",
    "basis_state",
    "bit_success_probability",
    "BitString",
    "bounds_report",
    "BoundsReport",
    "build_aqft",
    "build_qft",
    "chi",
    "CircuitPlan",
    "cos_product_identity",
    "Criterion",
    "delta_p",
    "dft_reference",
    "fixed_bound",
    "FIXED_BOUND_CONST",
    "full_distribution",
    "Gate",
    "gate_count",
    "GateCount",
    "inverse",
    "log_rule",
    "nearest_estimate",
    "path_probability",
    "Phase",
    "phase_from_bits",
    "prepare_phase_register",
    "QFT_BASELINE",
    "run",
    "RunRecord",
    "sample_run",
    "StateVector",
    "success_probability_exact",
    "TrialSpec",
    "wrapped_distance",
]

__version__ = "0.1.0"
