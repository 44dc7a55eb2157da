"""Computational-basis measurement of single qudits."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DegenerateState, InvalidDigit
from .state import StateVector, check_wire

# Branch probabilities below this are treated as exactly zero.
ZERO_PROB = 1e-14


@dataclass(frozen=True)
class MeasurementRecord:
    wire: int
    outcome: int
    probability: float
    post_state: StateVector
    draw: Optional[float] = None  # uniform variate consumed, None for postselection


def outcome_distribution(s: StateVector, wire: int) -> np.ndarray:
    """Born probabilities of each digit on ``wire``."""
    wire = check_wire(s, wire)
    t = np.moveaxis(s.tensor_view(), wire, 0).reshape(s.d, -1)
    return np.einsum("ij,ij->i", t.conj(), t).real


def _project(s: StateVector, wire: int, outcome: int, probability: float) -> StateVector:
    t = np.moveaxis(s.tensor_view(), wire, 0).copy()
    keep = t[outcome].copy()
    t[:] = 0
    t[outcome] = keep / np.sqrt(probability)
    return StateVector(s.d, s.wires, np.moveaxis(t, 0, wire).reshape(-1))


def postselect(s: StateVector, wire: int, outcome: int) -> tuple[float, Optional[StateVector]]:
    """Probability of ``outcome`` on ``wire`` and the renormalized projected state.

    The state is ``None`` when the probability is below ``ZERO_PROB``.
    """
    wire = check_wire(s, wire)
    if not isinstance(outcome, (int, np.integer)) or not 0 <= outcome < s.d:
        raise InvalidDigit(f"outcome {outcome!r} not in [0, {s.d})")
    p = float(outcome_distribution(s, wire)[outcome])
    if p < ZERO_PROB:
        return p, None
    return p, _project(s, wire, int(outcome), p)


def measure(s: StateVector, wire: int, rng: np.random.Generator) -> MeasurementRecord:
    """Sample an outcome by inverse CDF on a single uniform draw, then collapse."""
    probs = outcome_distribution(s, wire)
    probs = np.where(probs < ZERO_PROB, 0.0, probs)
    total = probs.sum()
    if total < ZERO_PROB:
        raise DegenerateState("every outcome has negligible probability")
    u = float(rng.random())
    cdf = np.cumsum(probs / total)
    outcome = int(min(np.searchsorted(cdf, u, side="right"), s.d - 1))
    while probs[outcome] == 0.0:  # guards the cdf's flat tail against rounding
        outcome -= 1
    p = float(probs[outcome])
    return MeasurementRecord(wire, outcome, p, _project(s, wire, outcome, p), draw=u)
