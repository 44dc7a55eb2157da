"""Qudit state-vector simulation of single-qudit-measurement teleportation
and the d-dimensional remote CNOT gate."""

from .errors import *  # noqa: F401,F403
from .gates import (
    GateOp,
    apply_cnot,
    apply_gate,
    apply_hadamard,
    apply_swap,
    apply_u_mn,
    apply_x,
    apply_z,
    gate_matrix,
)
from .measurement import MeasurementRecord, measure, outcome_distribution, postselect
from .state import (
    StateVector,
    basis_state,
    equal_up_to_global_phase,
    fidelity,
    max_entangled,
    random_state,
    tensor,
)

__version__ = "0.1.0"
