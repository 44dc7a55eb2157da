"""Teleportation and remote-CNOT protocols as data, plus the swap-chain baseline.

A :class:`ProtocolScript` lists, over a fixed register layout, the local
gates each party applies before measuring, which wires are measured (and
under which outcome label), which outcomes are sent where, and the
outcome-dependent correction table. :mod:`quditlocc.engine` executes it.

Register layouts
----------------
``teleport_a`` / ``teleport_b``
    wires ``(0, 1, 2)``: input qudit, Alice's half and Bob's half of the
    shared pair. Alice holds 0 and 1, Bob holds 2. Wire 0 is measured as
    ``n`` and wire 1 as ``m``.
``remote_cnot_dagger`` / ``remote_cnot``
    wires ``(i, i', j', j)`` for a two-qudit input on ``(i, j)``; Alice holds
    ``i, i'`` and Bob holds ``j', j``. ``i'`` is measured as ``m`` by Alice,
    ``j'`` as ``n`` by Bob. Larger inputs are supported by inserting ``i'``
    right after the control and ``j'`` right before the target.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import InvalidDimension, InvalidInput, InvalidProtocol, InvalidWire
from .gates import GateOp, apply_cnot, apply_swap, omega
from .state import StateVector

PROTOCOLS = ("teleport_a", "teleport_b", "remote_cnot_dagger", "remote_cnot")
ALICE, BOB = "Alice", "Bob"


def canonical_name(name: str) -> str:
    """Accept CLI spellings such as ``remote-cnot-dagger``."""
    key = name.replace("-", "_").lower()
    if key not in PROTOCOLS:
        raise InvalidProtocol(f"unknown protocol {name!r}; expected one of {PROTOCOLS}")
    return key


@dataclass(frozen=True)
class CorrectionRule:
    outcome_m: int
    outcome_n: int
    alice_ops: tuple[GateOp, ...]
    bob_ops: tuple[GateOp, ...]
    branch_phase: complex = 1.0

    def ops_for(self, party: str) -> tuple[GateOp, ...]:
        return self.alice_ops if party == ALICE else self.bob_ops


@dataclass(frozen=True)
class Measurement:
    party: str
    wire: int
    label: str  # "m" or "n"


@dataclass(frozen=True)
class Message:
    sender: str
    receiver: str
    labels: tuple[str, ...]


@dataclass(frozen=True)
class ProtocolScript:
    name: str
    d: int
    wire_names: tuple[str, ...]
    holders: dict  # party name -> frozenset of wires
    sources: tuple[int, ...]  # register wire w <- wire sources[w] of (input..., pair_0, pair_1)
    input_wires: int
    resource_wires: tuple[int, int]
    steps: tuple[tuple[str, GateOp], ...]
    measurements: tuple[Measurement, ...]
    messages: tuple[Message, ...]
    corrections: tuple[CorrectionRule, ...]  # indexed by m * d + n
    needs: dict  # party name -> outcome labels its corrections depend on
    target: Callable[[StateVector], StateVector] = field(compare=False, repr=False)
    exact: bool = False  # teleportation restores the input with no residual phase

    @property
    def wires(self) -> int:
        return len(self.wire_names)

    def owner(self, wire: int) -> str:
        for party, held in self.holders.items():
            if wire in held:
                return party
        raise InvalidWire(f"wire {wire} has no owner")

    def rule(self, m: int, n: int) -> CorrectionRule:
        return self.corrections[m * self.d + n]

    def measured_wires(self) -> tuple[int, ...]:
        return tuple(meas.wire for meas in self.measurements)

    def output_wires(self) -> tuple[int, ...]:
        measured = set(self.measured_wires())
        return tuple(w for w in range(self.wires) if w not in measured)


def _check_d(d: int) -> int:
    if not isinstance(d, (int, np.integer)) or d < 2:
        raise InvalidDimension(f"qudit dimension must be an integer >= 2, got {d!r}")
    return int(d)


def _x(wire: int, power: int) -> GateOp:
    return GateOp("X", (wire,), power=power)


def _z(wire: int, power: int) -> GateOp:
    return GateOp("Z", (wire,), power=power)


# ---------------------------------------------------------------------------
# Correction tables. Operation sequences are listed in application order.


def _teleport_a_rules(d: int, bob: int = 2) -> tuple[CorrectionRule, ...]:
    # branch state X^m Z^n phi, undone by (X^m Z^n)^dag = Z^-n X^-m
    return tuple(
        CorrectionRule(m, n, (), (_x(bob, -m), _z(bob, -n)), 1.0)
        for m in range(d)
        for n in range(d)
    )


def _teleport_b_rules(d: int, bob: int = 2) -> tuple[CorrectionRule, ...]:
    # branch state Z^m X^-n phi, undone by X^n Z^-m
    return tuple(
        CorrectionRule(m, n, (), (_z(bob, -m), _x(bob, n)), 1.0)
        for m in range(d)
        for n in range(d)
    )


def _remote_dagger_rules(d: int, i: int, j: int) -> tuple[CorrectionRule, ...]:
    # branch state w^{nm} Z_i^-n X_j^m C^dag psi
    w = omega(d)
    return tuple(
        CorrectionRule(m, n, (_z(i, n),), (_x(j, -m),), w ** ((n * m) % d))
        for m in range(d)
        for n in range(d)
    )


@lru_cache(maxsize=None)
def frozen_remote_cnot_table() -> dict:
    """Correction formula for ``remote_cnot``, derived and checked by the oracle."""
    text = resources.files("quditlocc.data").joinpath("remote_cnot_corrections.json").read_text()
    return json.loads(text)


def _ops_from_formula(formula: dict, wire: int, m: int, n: int) -> tuple[GateOp, ...]:
    ops = []
    xm, xn = formula["x"]
    zm, zn = formula["z"]
    if (xm, xn) != (0, 0):
        ops.append(_x(wire, xm * m + xn * n))
    if (zm, zn) != (0, 0):
        ops.append(_z(wire, zm * m + zn * n))
    return tuple(ops)


def _remote_rules_from_table(d: int, i: int, j: int, table: dict) -> tuple[CorrectionRule, ...]:
    w = omega(d)
    k = table["phase_nm"]
    return tuple(
        CorrectionRule(
            m,
            n,
            _ops_from_formula(table["alice"], i, m, n),
            _ops_from_formula(table["bob"], j, m, n),
            w ** ((k * n * m) % d),
        )
        for m in range(d)
        for n in range(d)
    )


def correction_table(protocol: str, d: int) -> tuple[CorrectionRule, ...]:
    """All d**2 correction rules for ``protocol`` on its default layout, indexed by m*d+n."""
    return build_script(protocol, d).corrections


# ---------------------------------------------------------------------------
# Scripts


def teleport_script(d: int, variant: str = "a") -> ProtocolScript:
    d = _check_d(d)
    if variant == "a":
        # C_01^dag then H_0
        steps = ((ALICE, GateOp("CNOT_adj", (0, 1))), (ALICE, GateOp("H", (0,))))
        rules = _teleport_a_rules(d)
    elif variant == "b":
        # C_10^dag then H_1: control and target exchanged
        steps = ((ALICE, GateOp("CNOT_adj", (1, 0))), (ALICE, GateOp("H", (1,))))
        rules = _teleport_b_rules(d)
    else:
        raise InvalidProtocol(f"unknown teleportation variant {variant!r}")
    return ProtocolScript(
        name=f"teleport_{variant}",
        d=d,
        wire_names=("phi", "a", "b"),
        holders={ALICE: frozenset({0, 1}), BOB: frozenset({2})},
        sources=(0, 1, 2),
        input_wires=1,
        resource_wires=(1, 2),
        steps=steps,
        measurements=(Measurement(ALICE, 0, "n"), Measurement(ALICE, 1, "m")),
        messages=(Message(ALICE, BOB, ("n", "m")),),
        corrections=rules,
        needs={ALICE: (), BOB: ("m", "n")},
        target=lambda phi: phi,
        exact=True,
    )


def remote_cnot_script(
    d: int,
    adjoint: bool = True,
    system_wires: int = 2,
    control: int = 0,
    target: int = 1,
) -> ProtocolScript:
    """Remote CNOT between system qudits ``control`` and ``target``.

    ``adjoint=True`` runs ``C_{ii'}, H_{j'}, C_{j'j}`` and realizes
    ``CNOT^dag`` on the system; ``adjoint=False`` replaces Bob's pair by
    ``C^dag_{j'j}, H^dag_{j'}`` and realizes ``CNOT``.
    """
    d = _check_d(d)
    if system_wires < 2:
        raise InvalidInput("remote CNOT needs at least two system qudits")
    for w in (control, target):
        if not 0 <= w < system_wires:
            raise InvalidWire(f"wire {w} out of range for {system_wires} system qudits")
    if control == target:
        raise InvalidWire("control and target must differ")

    # register labels: system index, or "i'"/"j'" for the pair halves
    labels: list = []
    for s in range(system_wires):
        if s == target:
            labels.append("j'")
        labels.append(s)
        if s == control:
            labels.append("i'")
    pos = {lab: w for w, lab in enumerate(labels)}
    i, j, ip, jp = pos[control], pos[target], pos["i'"], pos["j'"]
    sources = tuple(
        system_wires if lab == "i'" else system_wires + 1 if lab == "j'" else lab
        for lab in labels
    )

    # spectator qudits go to whichever side of the midpoint they sit on
    mid = (i + j) / 2
    alice = {i, ip}
    bob = {j, jp}
    for w, lab in enumerate(labels):
        if w in alice or w in bob:
            continue
        (alice if (w < mid) == (i < j) else bob).add(w)

    if adjoint:
        bob_steps = (GateOp("CNOT", (jp, j)), GateOp("H", (jp,)))
        rules = _remote_dagger_rules(d, i, j)
        name = "remote_cnot_dagger"

        def goal(psi: StateVector) -> StateVector:
            return apply_cnot(psi, control, target, adjoint=True)

    else:
        bob_steps = (GateOp("CNOT_adj", (jp, j)), GateOp("H_adj", (jp,)))
        rules = _remote_rules_from_table(d, i, j, frozen_remote_cnot_table())
        name = "remote_cnot"

        def goal(psi: StateVector) -> StateVector:
            return apply_cnot(psi, control, target)

    names = tuple(
        lab if isinstance(lab, str) else ("i" if lab == control else "j" if lab == target else f"s{lab}")
        for lab in labels
    )
    return ProtocolScript(
        name=name,
        d=d,
        wire_names=names,
        holders={ALICE: frozenset(alice), BOB: frozenset(bob)},
        sources=sources,
        input_wires=system_wires,
        resource_wires=(ip, jp),
        steps=tuple((BOB, g) for g in bob_steps) + ((ALICE, GateOp("CNOT", (i, ip))),),
        measurements=(Measurement(ALICE, ip, "m"), Measurement(BOB, jp, "n")),
        messages=(Message(ALICE, BOB, ("m",)), Message(BOB, ALICE, ("n",))),
        corrections=rules,
        needs={ALICE: ("n",), BOB: ("m",)},
        target=goal,
        exact=False,
    )


def build_script(protocol: str, d: int) -> ProtocolScript:
    name = canonical_name(protocol)
    if name == "teleport_a":
        return teleport_script(d, "a")
    if name == "teleport_b":
        return teleport_script(d, "b")
    return remote_cnot_script(d, adjoint=name == "remote_cnot_dagger")


# ---------------------------------------------------------------------------
# Protocol entry points


def _run_protocol(name: str, psi: StateVector, d: int, wires: int, mode: str, seed: int):
    from . import engine

    if psi.wires != wires:
        raise InvalidInput(f"{name} takes a {wires}-wire input, got {psi.wires} wires")
    if psi.d != d:
        raise InvalidInput(f"input has d={psi.d} but protocol was asked for d={d}")
    script = build_script(name, d)
    if mode == "sample":
        return engine.run(script, psi, seed)
    if mode == "enumerate":
        return engine.enumerate_branches(script, psi, seed)
    raise InvalidInput(f"mode must be 'sample' or 'enumerate', got {mode!r}")


def teleport_a(phi: StateVector, d: int, mode: str = "sample", seed: int = 0):
    """Teleport ``phi`` with ``C_01^dag`` and ``H_0`` followed by two Alice measurements.

    Returns a :class:`~quditlocc.engine.Transcript` in ``sample`` mode or the
    list of all d**2 branch transcripts in ``enumerate`` mode.
    """
    return _run_protocol("teleport_a", phi, d, 1, mode, seed)


def teleport_b(phi: StateVector, d: int, mode: str = "sample", seed: int = 0):
    """As :func:`teleport_a` with control and target of the CNOT exchanged."""
    return _run_protocol("teleport_b", phi, d, 1, mode, seed)


def remote_cnot_dagger(psi: StateVector, d: int, mode: str = "sample", seed: int = 0):
    return _run_protocol("remote_cnot_dagger", psi, d, 2, mode, seed)


def remote_cnot(psi: StateVector, d: int, mode: str = "sample", seed: int = 0):
    return _run_protocol("remote_cnot", psi, d, 2, mode, seed)


def swap_chain_cnot(chain: StateVector, pos_i: int, pos_j: int) -> tuple[StateVector, int]:
    """CNOT(pos_i -> pos_j) using nearest-neighbour gates only.

    The target is swapped toward the control until adjacent, the CNOT is
    applied, and the target is swapped back: ``2 * (|i - j| - 1) + 1``
    two-qudit gates.
    """
    L = chain.wires
    for p in (pos_i, pos_j):
        if not isinstance(p, (int, np.integer)) or not 0 <= p < L:
            raise InvalidWire(f"position {p!r} out of range for a chain of {L}")
    if pos_i == pos_j:
        raise InvalidWire("control and target positions must differ")
    step = 1 if pos_j > pos_i else -1
    path: list[tuple[int, int]] = []
    cur = pos_j
    while abs(cur - pos_i) > 1:
        path.append((cur - step, cur))
        cur -= step
    s = chain
    for a, b in path:
        s = apply_swap(s, a, b)
    s = apply_cnot(s, pos_i, cur)
    for a, b in reversed(path):
        s = apply_swap(s, a, b)
    return s, 2 * len(path) + 1


def swap_chain_gate_count(separation: int) -> int:
    if separation < 1:
        raise InvalidInput("separation must be at least 1")
    return 2 * (separation - 1) + 1


def remote_on_chain(
    chain: StateVector,
    pos_i: int,
    pos_j: int,
    branch: Optional[Sequence[int]] = None,
    seed: int = 0,
):
    """Run the remote CNOT between two sites of a longer register."""
    from . import engine

    script = remote_cnot_script(chain.d, adjoint=False, system_wires=chain.wires, control=pos_i, target=pos_j)
    return engine.run(script, chain, seed, branch=branch)
