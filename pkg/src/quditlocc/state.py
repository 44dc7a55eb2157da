"""Dense pure states of registers of qudits.

Basis index ``x`` encodes the digits ``(x_0, ..., x_{wires-1})`` in base ``d``
with wire 0 the most significant digit, so ``|k l>`` on two wires sits at
index ``k * d + l``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import (
    CapacityExceeded,
    DimensionMismatch,
    InvalidDigit,
    InvalidDimension,
    InvalidInput,
    InvalidWire,
    StateFileError,
)

NORM_TOL = 1e-10

# d**wires above this is refused; 16**6 is the largest register the tools are meant for.
_max_amplitudes = 16**6


def max_amplitudes() -> int:
    return _max_amplitudes


def set_max_amplitudes(limit: int) -> int:
    """Set the amplitude cap and return the previous value."""
    global _max_amplitudes
    if limit < 2:
        raise ValueError("amplitude cap must be at least 2")
    previous, _max_amplitudes = _max_amplitudes, int(limit)
    return previous


def check_register(d: int, wires: int) -> None:
    if not isinstance(d, (int, np.integer)) or d < 2:
        raise InvalidDimension(f"qudit dimension must be an integer >= 2, got {d!r}")
    if not isinstance(wires, (int, np.integer)) or wires < 1:
        raise InvalidInput(f"register needs at least one wire, got {wires!r}")
    if d**wires > _max_amplitudes:
        raise CapacityExceeded(
            f"d={d}, wires={wires} needs {d**wires} amplitudes; cap is {_max_amplitudes}"
        )


@dataclass(frozen=True, eq=False)
class StateVector:
    """Normalized pure state of ``wires`` qudits of dimension ``d``.

    The amplitude array is copied on construction and marked read-only, so a
    StateVector can be shared freely; every operation returns a new one.
    """

    d: int
    wires: int
    amps: np.ndarray

    def __post_init__(self) -> None:
        check_register(self.d, self.wires)
        amps = np.array(self.amps, dtype=np.complex128).reshape(-1)
        if amps.size != self.d**self.wires:
            raise DimensionMismatch(
                f"expected {self.d ** self.wires} amplitudes, got {amps.size}"
            )
        norm = float(np.vdot(amps, amps).real)
        if abs(norm - 1.0) > NORM_TOL:
            raise InvalidInput(f"state is not normalized (norm^2 = {norm!r})")
        amps.flags.writeable = False
        object.__setattr__(self, "d", int(self.d))
        object.__setattr__(self, "wires", int(self.wires))
        object.__setattr__(self, "amps", amps)

    @classmethod
    def from_amplitudes(cls, d: int, amps, normalize: bool = False) -> "StateVector":
        amps = np.asarray(amps, dtype=np.complex128).reshape(-1)
        wires = _wires_for(d, amps.size)
        if normalize:
            norm = np.linalg.norm(amps)
            if norm < 1e-300:
                raise InvalidInput("cannot normalize the zero vector")
            amps = amps / norm
        return cls(d, wires, amps)

    def tensor_view(self) -> np.ndarray:
        """Amplitudes reshaped to one axis per wire (read-only view)."""
        return self.amps.reshape((self.d,) * self.wires)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def __repr__(self) -> str:
        return f"StateVector(d={self.d}, wires={self.wires})"


def _wires_for(d: int, size: int) -> int:
    if d < 2:
        raise InvalidDimension(f"qudit dimension must be >= 2, got {d}")
    wires, n = 0, 1
    while n < size:
        n *= d
        wires += 1
    if n != size or wires == 0:
        raise DimensionMismatch(f"{size} amplitudes is not a power of d={d}")
    return wires


def check_wire(s: StateVector, wire: int) -> int:
    if not isinstance(wire, (int, np.integer)) or not 0 <= wire < s.wires:
        raise InvalidWire(f"wire {wire!r} out of range for {s.wires}-wire register")
    return int(wire)


def index_of(d: int, digits: Sequence[int]) -> int:
    """Encode base-d digits (wire 0 most significant) as a basis index."""
    if d < 2:
        raise InvalidDimension(f"qudit dimension must be >= 2, got {d}")
    index = 0
    for digit in digits:
        if not isinstance(digit, (int, np.integer)) or not 0 <= digit < d:
            raise InvalidDigit(f"digit {digit!r} not in [0, {d})")
        index = index * d + int(digit)
    return index


def digits_of(d: int, wires: int, index: int) -> list[int]:
    if not 0 <= index < d**wires:
        raise InvalidInput(f"index {index} out of range for d={d}, wires={wires}")
    digits = []
    for _ in range(wires):
        index, r = divmod(index, d)
        digits.append(r)
    return digits[::-1]


def basis_state(d: int, digits: Sequence[int]) -> StateVector:
    digits = list(digits)
    if not digits:
        raise InvalidInput("basis label needs at least one digit")
    check_register(d, len(digits))
    amps = np.zeros(d ** len(digits), dtype=np.complex128)
    amps[index_of(d, digits)] = 1.0
    return StateVector(d, len(digits), amps)


def max_entangled(d: int) -> StateVector:
    """(1/sqrt d) sum_j |jj> on two wires."""
    if not isinstance(d, (int, np.integer)) or d < 2:
        raise InvalidDimension(f"qudit dimension must be >= 2, got {d!r}")
    amps = np.zeros(d * d, dtype=np.complex128)
    amps[np.arange(d) * (d + 1)] = 1.0 / np.sqrt(d)
    return StateVector(d, 2, amps)


def tensor(a: StateVector, b: StateVector) -> StateVector:
    """Kronecker product; amplitude at (x, y) is computed as ``a[x] * b[y]``."""
    if a.d != b.d:
        raise DimensionMismatch(f"cannot tensor d={a.d} with d={b.d}")
    check_register(a.d, a.wires + b.wires)
    return StateVector(a.d, a.wires + b.wires, np.outer(a.amps, b.amps).reshape(-1))


def random_state(d: int, wires: int, seed: int) -> StateVector:
    """Haar-random pure state: iid complex Gaussians, normalized."""
    check_register(d, wires)
    rng = np.random.default_rng(seed)
    raw = rng.standard_normal((2, d**wires))
    amps = raw[0] + 1j * raw[1]
    return StateVector(d, wires, amps / np.linalg.norm(amps))


def inner(a: StateVector, b: StateVector) -> complex:
    """<a|b>."""
    if a.d != b.d or a.wires != b.wires:
        raise DimensionMismatch(
            f"shape mismatch: (d={a.d}, wires={a.wires}) vs (d={b.d}, wires={b.wires})"
        )
    return complex(np.vdot(a.amps, b.amps))


def fidelity(a: StateVector, b: StateVector) -> float:
    return abs(inner(a, b)) ** 2


def equal_up_to_global_phase(a: StateVector, b: StateVector, tol: float = 1e-10) -> bool:
    return abs(inner(a, b)) >= 1.0 - tol


def permute_wires(s: StateVector, order: Sequence[int]) -> StateVector:
    """Reorder wires: wire ``w`` of the result is wire ``order[w]`` of ``s``."""
    order = [int(w) for w in order]
    if sorted(order) != list(range(s.wires)):
        raise InvalidWire(f"{order} is not a permutation of {s.wires} wires")
    out = np.transpose(s.tensor_view(), order).reshape(-1)
    return StateVector(s.d, s.wires, out)


def drop_wire(s: StateVector, wire: int, digit: int) -> StateVector:
    """Remove a wire known to be in basis state ``|digit>``.

    The slice must carry the whole norm of the state, i.e. the wire must
    already be unentangled in that basis state (after a projective
    measurement, for instance).
    """
    wire = check_wire(s, wire)
    if s.wires == 1:
        raise InvalidInput("cannot drop the only wire of a register")
    if not 0 <= digit < s.d:
        raise InvalidDigit(f"digit {digit!r} not in [0, {s.d})")
    rest = np.take(s.tensor_view(), digit, axis=wire).reshape(-1)
    if abs(float(np.vdot(rest, rest).real) - 1.0) > NORM_TOL:
        raise InvalidInput(f"wire {wire} is not in basis state |{digit}>")
    return StateVector(s.d, s.wires - 1, rest)


def state_to_dict(s: StateVector) -> dict:
    return {
        "d": s.d,
        "wires": s.wires,
        "amps": [[float(a.real), float(a.imag)] for a in s.amps],
    }


def read_state_file(path: str | Path) -> StateVector:
    """Load a JSON state document ``{"d", "wires", "amps": [[re, im], ...]}``.

    States off normalization by at most 1e-4 are renormalized; anything
    further off is rejected.
    """
    try:
        doc = json.loads(Path(path).read_text())
        d, wires = int(doc["d"]), int(doc["wires"])
        pairs = np.asarray(doc["amps"], dtype=float)
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise StateFileError(f"{path}: unreadable state file ({exc})") from exc
    if pairs.ndim != 2 or pairs.shape[1] != 2:
        raise StateFileError(f"{path}: amps must be a list of [re, im] pairs")
    try:
        check_register(d, wires)
    except (InvalidDimension, InvalidInput, CapacityExceeded) as exc:
        raise StateFileError(f"{path}: {exc}") from exc
    if pairs.shape[0] != d**wires:
        raise StateFileError(f"{path}: expected {d ** wires} amplitudes, got {pairs.shape[0]}")
    amps = pairs[:, 0] + 1j * pairs[:, 1]
    norm = float(np.linalg.norm(amps))
    if abs(norm**2 - 1.0) > 1e-4:
        raise StateFileError(f"{path}: state norm^2 {norm ** 2!r} is not close to 1")
    if abs(norm**2 - 1.0) > 1e-8:
        amps = amps / norm
    return StateVector(d, wires, amps)


def write_state_file(s: StateVector, path: str | Path) -> None:
    Path(path).write_text(json.dumps(state_to_dict(s)) + "\n")
