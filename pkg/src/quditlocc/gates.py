"""Generalized Pauli, Fourier, CNOT and SWAP gates on qudit registers.

Conventions used throughout:

* ``X|j> = |j+1 mod d>`` and ``Z|j> = w**j |j>`` with ``w = exp(+2 pi i / d)``.
* ``H = (1/sqrt d) sum_{j,k} w**(j k) |k><j|``, the d-dimensional Fourier
  transform.
* ``CNOT|k, l> = |k, l+k mod d>`` with the control listed first;
  ``CNOT_adj`` subtracts instead.
* ``U_mn = X**m Z**n``, so ``Z**n`` acts first.

Gates are applied by permuting or phasing amplitudes in place of a matrix
product; :func:`gate_matrix` builds the dense matrices for cross-checks.
"""

from __future__ import annotations

import contextlib
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .errors import InvalidInput, SameWire
from .state import StateVector, check_register, check_wire

KINDS = ("X", "Z", "H", "H_adj", "CNOT", "CNOT_adj", "SWAP", "U_mn")
TWO_QUDIT = frozenset({"CNOT", "CNOT_adj", "SWAP"})

# Sign of the exponent in w = exp(sign * 2 pi i / d) on the structured path.
# Only flipped by conjugated_omega() to check that verification notices.
_omega_sign = 1


@contextlib.contextmanager
def conjugated_omega() -> Iterator[None]:
    """Fault injection: run the structured gates with w replaced by conj(w)."""
    global _omega_sign
    _omega_sign = -1
    try:
        yield
    finally:
        _omega_sign = 1


def omega(d: int) -> complex:
    return complex(np.exp(2j * np.pi / d))


def _phases(d: int, power: int) -> np.ndarray:
    # w**(j * power) for j in 0..d-1, reduced mod d before exponentiating
    j = (np.arange(d) * power) % d
    return np.exp(_omega_sign * 2j * np.pi * j / d)


def _fourier(d: int, adjoint: bool) -> np.ndarray:
    jk = np.outer(np.arange(d), np.arange(d)) % d
    f = np.exp(_omega_sign * 2j * np.pi * jk / d) / np.sqrt(d)
    return f.conj() if adjoint else f


@dataclass(frozen=True)
class GateOp:
    """Structured description of one gate.

    ``wires`` holds one index, or two for CNOT-type gates and SWAP (control
    first). ``power`` applies to X and Z; ``m`` and ``n`` to ``U_mn``, whose
    ``dagger`` flag selects ``(X**m Z**n)^dagger``.
    """

    kind: str
    wires: tuple[int, ...]
    power: int = 1
    m: int = 0
    n: int = 0
    dagger: bool = False

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise InvalidInput(f"unknown gate kind {self.kind!r}")
        object.__setattr__(self, "wires", tuple(int(w) for w in self.wires))
        arity = 2 if self.kind in TWO_QUDIT else 1
        if len(self.wires) != arity:
            raise InvalidInput(f"{self.kind} takes {arity} wire(s), got {self.wires}")
        if arity == 2 and self.wires[0] == self.wires[1]:
            raise SameWire(f"{self.kind} needs two distinct wires, got {self.wires}")

    @property
    def two_qudit(self) -> bool:
        return self.kind in TWO_QUDIT

    def adjoint(self) -> "GateOp":
        kind = {"H": "H_adj", "H_adj": "H", "CNOT": "CNOT_adj", "CNOT_adj": "CNOT"}.get(
            self.kind, self.kind
        )
        if self.kind in ("X", "Z"):
            return GateOp(self.kind, self.wires, power=-self.power)
        if self.kind == "U_mn":
            return GateOp("U_mn", self.wires, m=self.m, n=self.n, dagger=not self.dagger)
        return GateOp(kind, self.wires)

    def is_identity(self, d: int) -> bool:
        if self.kind in ("X", "Z"):
            return self.power % d == 0
        if self.kind == "U_mn":
            return self.m % d == 0 and self.n % d == 0
        return False

    def label(self) -> str:
        if self.kind in ("X", "Z"):
            return f"{self.kind}^{self.power}"
        if self.kind == "U_mn":
            return f"U_{self.m},{self.n}" + ("^dag" if self.dagger else "")
        return self.kind


def _axis_first(s: StateVector, wire: int) -> np.ndarray:
    return np.moveaxis(s.tensor_view(), wire, 0)


def _rebuild(s: StateVector, t: np.ndarray, wire: int) -> StateVector:
    return StateVector(s.d, s.wires, np.moveaxis(t, 0, wire).reshape(-1))


def apply_x(s: StateVector, wire: int, power: int = 1) -> StateVector:
    wire = check_wire(s, wire)
    return StateVector(s.d, s.wires, np.roll(s.tensor_view(), power % s.d, axis=wire).reshape(-1))


def apply_z(s: StateVector, wire: int, power: int = 1) -> StateVector:
    wire = check_wire(s, wire)
    shape = [1] * s.wires
    shape[wire] = s.d
    out = s.tensor_view() * _phases(s.d, power).reshape(shape)
    return StateVector(s.d, s.wires, out.reshape(-1))


def apply_u_mn(s: StateVector, wire: int, m: int, n: int, dagger: bool = False) -> StateVector:
    """Apply ``X**m Z**n`` (Z first), or its adjoint ``Z**-n X**-m``."""
    if dagger:
        return apply_z(apply_x(s, wire, -m), wire, -n)
    return apply_x(apply_z(s, wire, n), wire, m)


def apply_hadamard(s: StateVector, wire: int, adjoint: bool = False) -> StateVector:
    wire = check_wire(s, wire)
    t = _axis_first(s, wire)
    out = np.tensordot(_fourier(s.d, adjoint), t, axes=(1, 0))
    return _rebuild(s, out, wire)


def _check_pair(s: StateVector, a: int, b: int) -> tuple[int, int]:
    a, b = check_wire(s, a), check_wire(s, b)
    if a == b:
        raise SameWire(f"control and target must differ (both {a})")
    return a, b


def apply_cnot(s: StateVector, control: int, target: int, adjoint: bool = False) -> StateVector:
    control, target = _check_pair(s, control, target)
    t = np.moveaxis(s.tensor_view(), (control, target), (0, 1))
    out = np.empty_like(t)
    sign = -1 if adjoint else 1
    for k in range(s.d):
        out[k] = np.roll(t[k], sign * k, axis=0)
    out = np.moveaxis(out, (0, 1), (control, target))
    return StateVector(s.d, s.wires, out.reshape(-1))


def apply_swap(s: StateVector, w1: int, w2: int) -> StateVector:
    w1, w2 = _check_pair(s, w1, w2)
    return StateVector(s.d, s.wires, np.swapaxes(s.tensor_view(), w1, w2).reshape(-1))


def apply_gate(s: StateVector, g: GateOp) -> StateVector:
    k = g.kind
    if k == "X":
        return apply_x(s, g.wires[0], g.power)
    if k == "Z":
        return apply_z(s, g.wires[0], g.power)
    if k == "U_mn":
        return apply_u_mn(s, g.wires[0], g.m, g.n, g.dagger)
    if k in ("H", "H_adj"):
        return apply_hadamard(s, g.wires[0], adjoint=k == "H_adj")
    if k in ("CNOT", "CNOT_adj"):
        return apply_cnot(s, *g.wires, adjoint=k == "CNOT_adj")
    return apply_swap(s, *g.wires)


def shift_matrix(d: int, power: int = 1) -> np.ndarray:
    x = np.zeros((d, d), dtype=np.complex128)
    for j in range(d):
        x[(j + power) % d, j] = 1.0
    return x


def clock_matrix(d: int, power: int = 1) -> np.ndarray:
    return np.diag([omega(d) ** ((j * power) % d) for j in range(d)])


def gate_matrix(g: GateOp, d: int) -> np.ndarray:
    """Dense matrix of ``g`` on its own wires (control/first wire most significant)."""
    check_register(d, len(g.wires))
    k = g.kind
    if k == "X":
        return shift_matrix(d, g.power)
    if k == "Z":
        return clock_matrix(d, g.power)
    if k == "U_mn":
        u = shift_matrix(d, g.m) @ clock_matrix(d, g.n)
        return u.conj().T if g.dagger else u
    if k in ("H", "H_adj"):
        w = omega(d)
        h = np.array([[w ** ((j * kk) % d) for j in range(d)] for kk in range(d)]) / np.sqrt(d)
        return h.conj().T if k == "H_adj" else h
    out = np.zeros((d * d, d * d), dtype=np.complex128)
    for a in range(d):
        for b in range(d):
            if k == "CNOT":
                img = (a, (b + a) % d)
            elif k == "CNOT_adj":
                img = (a, (b - a) % d)
            else:
                img = (b, a)
            out[img[0] * d + img[1], a * d + b] = 1.0
    return out
