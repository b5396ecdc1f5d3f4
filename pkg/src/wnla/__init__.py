"""Exact simulation and closed forms for heralded amplification of single-photon W states."""
from ._kernels import BACKEND
from .analytics import (
    GainCurvePoint,
    Limit,
    analytic_eta_prime,
    analytic_gain,
    analytic_success_prob,
    gain_threshold_check,
    is_limit,
)
from .fock import (
    FockError,
    MixedState,
    ModeId,
    PureState,
    basis_state,
    create_photon,
    fidelity,
    inner_product,
    make_vacuum,
    state_from_json,
    state_to_json,
    tensor,
    trace_out,
)
from .optics import (
    DetectionPattern,
    LossChannel,
    TwoModeElement,
    accepted_patterns,
    apply_bs50,
    apply_phase,
    apply_two_mode,
    apply_vbs,
    loss_channel,
    make_bs50,
    make_vbs,
    outcome_distribution,
    project_pattern,
)
from .protocol import (
    ProtocolConfig,
    ProtocolError,
    ProtocolOutcome,
    build_w_state,
    phase_correct,
    run_nla,
    sample_run,
)

__version__ = "0.1.0"
