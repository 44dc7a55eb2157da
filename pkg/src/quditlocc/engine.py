"""Two-party execution of protocol scripts with an ideal classical channel.

The simulation keeps one global state vector but checks that every gate,
measurement and correction only touches wires held by the party performing
it. Each party draws measurement randomness from its own stream, spawned
from the run seed, so the sampled branch does not depend on how the two
parties' operations are interleaved.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import DegenerateState, InvalidInput, LocalityError
from .gates import GateOp, apply_gate
from .measurement import measure, postselect
from .protocols import ALICE, BOB, Measurement, ProtocolScript
from .state import (
    StateVector,
    drop_wire,
    fidelity,
    inner,
    max_entangled,
    permute_wires,
    state_to_dict,
    tensor,
)

PARTIES = (ALICE, BOB)
PASS_TOL = 1e-10


@dataclass(frozen=True)
class Party:
    name: str
    held_wires: frozenset


@dataclass(frozen=True)
class ClassicalMessage:
    sender: str
    receiver: str
    payload: dict
    step_id: int


@dataclass
class Transcript:
    """Event log and outcome of one protocol run (one branch).

    ``to_dict`` emits the fields in a fixed order: protocol, d, seed,
    events, outcomes, branch_phase, fidelity, gate_counts, final_state.
    """

    protocol: str
    d: int
    seed: int
    events: list = field(default_factory=list)
    outcomes: dict = field(default_factory=dict)
    branch_phase: complex = 1.0
    fidelity: float = 0.0
    gate_counts: dict = field(default_factory=dict)
    final_state: Optional[StateVector] = None
    target: Optional[StateVector] = field(default=None, repr=False)
    overlap: complex = 0.0  # <target|final>
    exact: bool = False
    complete: bool = True  # every correction was applied

    @property
    def messages(self) -> list[dict]:
        return [e for e in self.events if e["type"] == "message"]

    @property
    def phase_error(self) -> float:
        """Distance of ``<target|final>`` from the phase the table predicts."""
        expected = 1.0 if self.exact else self.branch_phase
        return abs(self.overlap - expected)

    @property
    def passed(self) -> bool:
        return self.fidelity >= 1.0 - PASS_TOL and self.phase_error <= PASS_TOL

    def to_dict(self) -> dict:
        return {
            "protocol": self.protocol,
            "d": self.d,
            "seed": self.seed,
            "events": self.events,
            "outcomes": self.outcomes,
            "branch_phase": {"re": float(self.branch_phase.real), "im": float(self.branch_phase.imag)},
            "fidelity": float(self.fidelity),
            "gate_counts": self.gate_counts,
            "final_state": None if self.final_state is None else state_to_dict(self.final_state),
        }

    def to_json(self, indent: Optional[int] = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)


def parties(script: ProtocolScript) -> tuple[Party, ...]:
    return tuple(Party(name, frozenset(script.holders[name])) for name in PARTIES)


def check_script(script: ProtocolScript) -> None:
    """Structural locality checks; raises LocalityError on violation."""
    alice, bob = (script.holders[p] for p in PARTIES)
    if alice & bob or alice | bob != set(range(script.wires)):
        raise LocalityError("party wire sets must partition the register")
    for party, g in script.steps:
        _check_local(script, party, g)
    for meas in script.measurements:
        if meas.wire not in script.holders[meas.party]:
            raise LocalityError(f"{meas.party} cannot measure wire {meas.wire}")
    for rule in script.corrections:
        for party in PARTIES:
            for g in rule.ops_for(party):
                _check_local(script, party, g)


def _check_local(script: ProtocolScript, party: str, g: GateOp) -> None:
    held = script.holders[party]
    if not set(g.wires) <= held:
        raise LocalityError(f"{party} applies {g.kind} on wires {g.wires} but holds {sorted(held)}")


def prepare(script: ProtocolScript, psi: StateVector) -> StateVector:
    """Input placed on its wires and the shared pair on the resource wires."""
    if psi.wires != script.input_wires:
        raise InvalidInput(f"{script.name} needs a {script.input_wires}-wire input, got {psi.wires}")
    if psi.d != script.d:
        raise InvalidInput(f"input has d={psi.d}, script has d={script.d}")
    return permute_wires(tensor(psi, max_entangled(script.d)), script.sources)


def pre_measurement_state(script: ProtocolScript, psi: StateVector) -> StateVector:
    """State after every local gate, before any measurement (script order)."""
    s = prepare(script, psi)
    for _, g in script.steps:
        s = apply_gate(s, g)
    return s


def _gate_event(party: str, g: GateOp, kind: str = "gate") -> dict:
    event = {"type": kind, "party": party, "gate": g.kind, "wires": list(g.wires)}
    if g.kind in ("X", "Z"):
        event["power"] = g.power
    return event


def _schedule(script: ProtocolScript, order: Optional[Sequence[str]]):
    """Pre-measurement actions as (party, GateOp | Measurement) tuples."""
    if order is None:
        return list(script.steps) + [(meas.party, meas) for meas in script.measurements]
    out = []
    for party in order:
        out += [(p, g) for p, g in script.steps if p == party]
        out += [(meas.party, meas) for meas in script.measurements if meas.party == party]
    return out


def _execute(
    script: ProtocolScript,
    psi: StateVector,
    seed: int,
    order: Optional[Sequence[str]] = None,
    branch: Optional[Sequence[int]] = None,
    omit_messages: Iterable[str] = (),
) -> Transcript:
    check_script(script)
    d = script.d
    omit = set(omit_messages)
    streams = dict(zip(PARTIES, (np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(2))))
    counts = {p: {"one_qudit": 0, "two_qudit": 0} for p in PARTIES}
    t = Transcript(script.name, d, int(seed), exact=script.exact)
    a, b = script.resource_wires
    t.events.append(
        {"type": "resource", "state": "max_entangled", "wires": [a, b], "holders": [script.owner(a), script.owner(b)]}
    )

    s = prepare(script, psi)
    wanted = None if branch is None else {"m": int(branch[0]), "n": int(branch[1])}
    outcomes: dict[str, int] = {}
    known = {p: set() for p in PARTIES}
    for party, action in _schedule(script, order):
        if isinstance(action, Measurement):
            if wanted is None:
                rec = measure(s, action.wire, streams[party])
                outcome, p, s, draw = rec.outcome, rec.probability, rec.post_state, rec.draw
            else:
                outcome = wanted[action.label]
                p, post = postselect(s, action.wire, outcome)
                if post is None:
                    raise DegenerateState(f"branch {wanted} has zero probability")
                s, draw = post, None
            outcomes[action.label] = outcome
            known[party].add(action.label)
            event = {"type": "measure", "party": party, "wire": action.wire, "label": action.label,
                     "outcome": outcome, "probability": p}
            if draw is not None:
                event["draw"] = draw
            t.events.append(event)
        else:
            _check_local(script, party, action)
            s = apply_gate(s, action)
            counts[party]["two_qudit" if action.two_qudit else "one_qudit"] += 1
            t.events.append(_gate_event(party, action))

    for step_id, msg in enumerate(script.messages):
        payload = {label: outcomes[label] for label in msg.labels}
        if msg.sender in omit:
            t.events.append({"type": "message_dropped", "step_id": step_id, "sender": msg.sender,
                             "receiver": msg.receiver, "payload": payload})
            continue
        known[msg.receiver].update(msg.labels)
        t.events.append({"type": "message", "step_id": step_id, "sender": msg.sender,
                         "receiver": msg.receiver, "payload": payload})

    m, n = outcomes["m"], outcomes["n"]
    rule = script.rule(m, n)
    for party in PARTIES:
        ops = rule.ops_for(party)
        if not set(script.needs[party]) <= known[party]:
            if ops:
                t.complete = False
                t.events.append({"type": "correction_skipped", "party": party,
                                 "missing": sorted(set(script.needs[party]) - known[party])})
            continue
        for g in ops:
            if g.is_identity(d):
                continue
            _check_local(script, party, g)
            s = apply_gate(s, g)
            counts[party]["one_qudit"] += 1
            event = _gate_event(party, g, kind="correction")
            event["depends_on"] = list(script.needs[party])
            t.events.append(event)

    for meas in sorted(script.measurements, key=lambda x: -x.wire):
        s = drop_wire(s, meas.wire, outcomes[meas.label])

    t.outcomes = {"m": m, "n": n}
    t.branch_phase = complex(rule.branch_phase)
    t.gate_counts = counts
    t.final_state = s
    t.target = script.target(psi)
    t.overlap = inner(t.target, s)
    t.fidelity = fidelity(t.target, s)
    return t


def run(
    script: ProtocolScript,
    psi: StateVector,
    seed: int = 0,
    branch: Optional[Sequence[int]] = None,
    omit_messages: Iterable[str] = (),
) -> Transcript:
    """Execute ``script`` on ``psi`` in the order the script lists its steps.

    Measurements are sampled from the seeded per-party streams, or forced to
    ``branch = (m, n)`` by postselection. Messages whose sender is in
    ``omit_messages`` are dropped, and corrections that depend on them are
    skipped.
    """
    return _execute(script, psi, seed, None, branch, omit_messages)


def run_interleaved(
    script: ProtocolScript,
    psi: StateVector,
    seed: int = 0,
    order: str = "alice_first",
    branch: Optional[Sequence[int]] = None,
) -> Transcript:
    """Run each party's local gates and measurement as one block, in ``order``."""
    if order == "alice_first":
        seq = (ALICE, BOB)
    elif order == "bob_first":
        seq = (BOB, ALICE)
    else:
        raise InvalidInput(f"order must be 'alice_first' or 'bob_first', got {order!r}")
    return _execute(script, psi, seed, seq, branch)


def enumerate_branches(script: ProtocolScript, psi: StateVector, seed: int = 0) -> list[Transcript]:
    """One postselected transcript per outcome pair (m, n), m-major."""
    return [run(script, psi, seed, branch=(m, n)) for m in range(script.d) for n in range(script.d)]
