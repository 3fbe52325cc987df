"""Collective-spin squeezing on the Dicke ladder.

Simulates squeezing of N spin-1/2 particles under one-axis twisting, a
rotating-frame variant that holds the optimal ellipse orientation, a pulsed
emulation of two-axis counter-twisting, and a combined scheme that switches
between them, with Husimi Q-function output and a small CLI.
"""

from .dicke import (
    CollectiveOperators,
    DickeState,
    FrameRotation,
    expectation,
    make_coherent_state,
    mean_spin_vector,
    rotate_to_mean_spin_frame,
)
from .husimi import QFunctionGrid, q_function, sphere_integral
from .propagators import (
    TridiagonalSpectralCache,
    build_spectral_cache,
    evolve_oat,
    evolve_rotating_oat,
    rotate_state,
    rotation_matrix_y,
)
from .protocols import (
    PROTOCOL_LABELS,
    ProtocolSchedule,
    ProtocolSegment,
    SqueezingReport,
    TimeSeries,
    asymptote_curve,
    best_squeezing,
    build_schedule,
    run_protocol,
    squeezing_parameter,
    sweep_switch_time,
    variance_matrix,
)
from .twisting import (
    CanonicalForm,
    TwistingTensor,
    canonicalize,
    classify,
    effective_cycle_tensor,
    max_squeezing_rate,
    oat_tensor,
    tact_tensor,
)

__all__ = [
    "CollectiveOperators",
    "DickeState",
    "FrameRotation",
    "expectation",
    "make_coherent_state",
    "mean_spin_vector",
    "rotate_to_mean_spin_frame",
    "QFunctionGrid",
    "q_function",
    "sphere_integral",
    "TridiagonalSpectralCache",
    "build_spectral_cache",
    "evolve_oat",
    "evolve_rotating_oat",
    "rotate_state",
    "rotation_matrix_y",
    "PROTOCOL_LABELS",
    "ProtocolSchedule",
    "ProtocolSegment",
    "SqueezingReport",
    "TimeSeries",
    "asymptote_curve",
    "best_squeezing",
    "build_schedule",
    "run_protocol",
    "squeezing_parameter",
    "sweep_switch_time",
    "variance_matrix",
    "CanonicalForm",
    "TwistingTensor",
    "canonicalize",
    "classify",
    "effective_cycle_tensor",
    "max_squeezing_rate",
    "oat_tensor",
    "tact_tensor",
]
