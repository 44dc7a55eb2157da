"""Brute-force verification of the protocol identities.

Right-hand sides are rebuilt here from explicitly summed dense matrices and
plain numpy arrays; nothing in this module calls the structured gate
routines of :mod:`quditlocc.gates` to build an expected value. The
simulated left-hand sides come from the engine, so a bug in either path
shows up as a deviation.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from . import engine, gates
from .protocols import build_script, canonical_name, teleport_script, remote_cnot_script
from .state import StateVector, basis_state, max_entangled, random_state

IDENTITY_TOL = 1e-12
PROTOCOL_TOL = 1e-10


@dataclass
class VerificationReport:
    identity: str
    d: int
    trials: int
    max_amplitude_deviation: float
    worst_branch: Optional[tuple[int, int]]
    passed: bool
    tolerance: float
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["worst_branch"] = None if self.worst_branch is None else list(self.worst_branch)
        return out

    def to_json(self, indent: Optional[int] = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)


# ---------------------------------------------------------------------------
# Independent dense operators


def _omega(d: int, conjugate: bool = False) -> complex:
    w = np.exp(2j * np.pi / d)
    return np.conj(w) if conjugate else w


def shift(d: int, power: int = 1) -> np.ndarray:
    """sum_j |j+power><j|"""
    out = np.zeros((d, d), dtype=complex)
    for j in range(d):
        out[(j + power) % d, j] = 1
    return out


def clock(d: int, power: int = 1, conjugate: bool = False) -> np.ndarray:
    """sum_j w^(j*power) |j><j|"""
    w = _omega(d, conjugate)
    out = np.zeros((d, d), dtype=complex)
    for j in range(d):
        out[j, j] = w ** ((j * power) % d)
    return out


def fourier(d: int, conjugate: bool = False) -> np.ndarray:
    """(1/sqrt d) sum_{j,k} w^(jk) |k><j|"""
    w = _omega(d, conjugate)
    out = np.zeros((d, d), dtype=complex)
    for j in range(d):
        for k in range(d):
            out[k, j] += w ** ((j * k) % d) / np.sqrt(d)
    return out


def cnot(d: int, adjoint: bool = False) -> np.ndarray:
    """sum_{j,k} |j><j| (x) |k +/- j><k| on (control, target)."""
    sign = -1 if adjoint else 1
    out = np.zeros((d * d, d * d), dtype=complex)
    for j in range(d):
        for k in range(d):
            out[j * d + (k + sign * j) % d, j * d + k] = 1
    return out


def ket(d: int, *digits: int) -> np.ndarray:
    v = np.zeros(d ** len(digits), dtype=complex)
    idx = 0
    for x in digits:
        idx = idx * d + x
    v[idx] = 1
    return v


def kron(*ops: np.ndarray) -> np.ndarray:
    out = np.ones((1,) * ops[0].ndim, dtype=complex)
    for op in ops:
        out = np.kron(out, op)
    return out


def _embed_two(d: int, op: np.ndarray, a: int, b: int, wires: int) -> np.ndarray:
    """Dense matrix of a two-wire operator acting on wires (a, b) of a register."""
    full = np.zeros((d**wires, d**wires), dtype=complex)
    op4 = op.reshape(d, d, d, d)
    for x in range(d**wires):
        digits = list(np.unravel_index(x, (d,) * wires))
        for a2 in range(d):
            for b2 in range(d):
                amp = op4[a2, b2, digits[a], digits[b]]
                if amp != 0:
                    out_digits = list(digits)
                    out_digits[a], out_digits[b] = a2, b2
                    full[np.ravel_multi_index(out_digits, (d,) * wires), x] += amp
    return full


def _embed_one(d: int, op: np.ndarray, a: int, wires: int) -> np.ndarray:
    mats = [np.eye(d, dtype=complex)] * wires
    mats[a] = op
    return kron(*mats)


def _inputs(d: int, wires: int, trials: int, seed: int, extra: Iterable[StateVector]) -> list[np.ndarray]:
    seeds = np.random.SeedSequence(seed).generate_state(trials)
    out = [random_state(d, wires, int(s)).amps for s in seeds]
    out += [np.asarray(e.amps) for e in extra]
    return out


def _report(name, d, n, worst, worst_branch, tol, **details) -> VerificationReport:
    return VerificationReport(name, d, n, float(worst), worst_branch, bool(worst <= tol), tol, details)


# ---------------------------------------------------------------------------
# Identity reconstruction


def _teleport_check(name, variant, d, trials, seed, branch_op, inputs, tol):
    script = teleport_script(d, variant)
    phis = _inputs(d, 1, trials, seed, inputs)
    worst, worst_branch = 0.0, None
    for phi in phis:
        lhs = engine.pre_measurement_state(script, StateVector(d, 1, phi)).amps
        rhs = np.zeros(d**3, dtype=complex)
        for n in range(d):
            for m in range(d):
                rhs += kron(ket(d, n), ket(d, m), branch_op(m, n) @ phi) / d
        dev = np.abs(lhs - rhs).reshape(d, d, d)
        for n in range(d):
            for m in range(d):
                if worst_branch is None or dev[n, m].max() > worst:
                    worst, worst_branch = dev[n, m].max(), (m, n)
    return _report(name, d, len(phis), worst, worst_branch, tol)


def verify_eq4(d: int, trials: int = 20, seed: int = 0, fault: Optional[str] = None,
               inputs: Sequence[StateVector] = (), tol: float = IDENTITY_TOL) -> VerificationReport:
    """``H_0 C_01^dag |phi>|Psi> = (1/d) sum_{n,m} |n>|m> X^m Z^n |phi>``.

    ``fault="conjugate_omega"`` builds the right side with conj(w), which
    must make the check fail.
    """
    conj = fault == "conjugate_omega"
    return _teleport_check(
        "eq4_teleport_a", "a", d, trials, seed,
        lambda m, n: shift(d, m) @ clock(d, n, conj), inputs, tol,
    )


def verify_eq5(d: int, trials: int = 20, seed: int = 0, fault: Optional[str] = None,
               inputs: Sequence[StateVector] = (), tol: float = IDENTITY_TOL) -> VerificationReport:
    """``H_1 C_10^dag |phi>|Psi> = (1/d) sum_{n,m} |n>|m> Z^m X^-n |phi>``.

    Faults: ``x_sign`` uses ``X^+n``; ``conjugate_omega`` uses conj(w).
    """
    sign = 1 if fault == "x_sign" else -1
    conj = fault == "conjugate_omega"
    return _teleport_check(
        "eq5_teleport_b", "b", d, trials, seed,
        lambda m, n: clock(d, m, conj) @ shift(d, sign * n), inputs, tol,
    )


def eq13_rhs(psi: np.ndarray, d: int, fault: Optional[str] = None) -> np.ndarray:
    """(1/d) sum_{m,n} w^{nm} (Z_i^-n X_j^m C^dag psi) (x) |m>_i' |n>_j', laid out (i, i', j', j)."""
    conj = fault == "conjugate_omega"
    w = _omega(d, conj)
    c_dag_psi = cnot(d, adjoint=True) @ psi
    rhs = np.zeros(d**4, dtype=complex)
    for m in range(d):
        for n in range(d):
            phase = 1.0 if fault == "drop_phase" else w ** ((n * m) % d)
            branch = kron(clock(d, -n, conj), shift(d, m)) @ c_dag_psi
            rhs += phase * kron(branch, ket(d, m, n)) / d
    return rhs.reshape(d, d, d, d).transpose(0, 2, 3, 1).reshape(-1)


def verify_eq13(d: int, trials: int = 20, seed: int = 0, fault: Optional[str] = None,
                inputs: Sequence[StateVector] = (), tol: float = IDENTITY_TOL) -> VerificationReport:
    """``C_ii' H_j' C_j'j |psi>|Psi> = (1/d) sum w^{nm} Z_i^-n X_j^m C^dag psi (x) |mn>``.

    Faults: ``drop_phase`` omits ``w^{nm}``; ``conjugate_omega`` uses conj(w).
    """
    script = remote_cnot_script(d, adjoint=True)
    psis = _inputs(d, 2, trials, seed, inputs)
    worst, worst_branch = 0.0, None
    for psi in psis:
        lhs = engine.pre_measurement_state(script, StateVector(d, 2, psi)).amps
        dev = np.abs(lhs - eq13_rhs(psi, d, fault)).reshape(d, d, d, d)
        for m in range(d):
            for n in range(d):
                if worst_branch is None or dev[:, m, n, :].max() > worst:
                    worst, worst_branch = dev[:, m, n, :].max(), (m, n)
    return _report("eq13_remote_cnot_dagger", d, len(psis), worst, worst_branch, tol)


# d = 2 branch operators multiplying C|psi>, keyed by the (i', j') outcome
EQ9_OPERATORS = {
    (0, 0): lambda: kron(np.eye(2), np.eye(2)),
    (0, 1): lambda: kron(clock(2), np.eye(2)),
    (1, 0): lambda: kron(np.eye(2), shift(2)),
    (1, 1): lambda: -kron(clock(2), shift(2)),
}


def verify_eq9(trials: int = 20, seed: int = 0, tol: float = IDENTITY_TOL) -> VerificationReport:
    """Each d = 2 branch equals (1/2) {I, Z_i, X_j, -Z_i X_j} C|psi> exactly, sign included."""
    d = 2
    script = remote_cnot_script(d, adjoint=True)
    psis = _inputs(d, 2, trials, seed, ())
    worst, worst_branch = 0.0, None
    for psi in psis:
        lhs = engine.pre_measurement_state(script, StateVector(d, 2, psi)).tensor_view()
        c_psi = cnot(d) @ psi
        for (m, n), op in EQ9_OPERATORS.items():
            expected = op() @ c_psi / 2
            dev = np.abs(lhs[:, m, n, :].reshape(-1) - expected).max()
            if worst_branch is None or dev > worst:
                worst, worst_branch = dev, (m, n)
    return _report("eq9_qubit_signs", d, len(psis), worst, worst_branch, tol)


# ---------------------------------------------------------------------------
# Operator algebra on the structured gate path


def _structured_matrix(d: int, wires: int, fn) -> np.ndarray:
    cols = [fn(basis_state(d, np.unravel_index(x, (d,) * wires))).amps for x in range(d**wires)]
    return np.array(cols).T


def algebra_suite(d_max: int, omega_sign: int = 1, d_min: int = 2) -> VerificationReport:
    """X^d = I, Z^d = I, ZX = wXZ, HXH^dag = Z and CC^dag = I for every d in range.

    The operators are read off the structured gate routines column by
    column; ``w`` in the commutation check is ``exp(omega_sign * 2 pi i / d)``.
    """
    worst, worst_name, failures = 0.0, None, []
    for d in range(d_min, d_max + 1):
        X = _structured_matrix(d, 1, lambda s: gates.apply_x(s, 0, 1))
        Z = _structured_matrix(d, 1, lambda s: gates.apply_z(s, 0, 1))
        H = _structured_matrix(d, 1, lambda s: gates.apply_hadamard(s, 0))
        C = _structured_matrix(d, 2, lambda s: gates.apply_cnot(s, 0, 1))
        Cdag = _structured_matrix(d, 2, lambda s: gates.apply_cnot(s, 0, 1, adjoint=True))
        w = np.exp(omega_sign * 2j * np.pi / d)
        eye, eye2 = np.eye(d), np.eye(d * d)
        checks = {
            "X^d=I": np.linalg.matrix_power(X, d) - eye,
            "Z^d=I": np.linalg.matrix_power(Z, d) - eye,
            "ZX=wXZ": Z @ X - w * X @ Z,
            "HXH^dag=Z": H @ X @ H.conj().T - Z,
            "CC^dag=I": C @ Cdag - eye2,
        }
        for name, diff in checks.items():
            dev = float(np.abs(diff).max())
            if dev > IDENTITY_TOL:
                failures.append(f"{name} (d={d})")
            if worst_name is None or dev > worst:
                worst, worst_name = dev, f"{name} (d={d})"
    return _report("operator_algebra", d_max, d_max - d_min + 1, worst, None, IDENTITY_TOL,
                   worst_identity=worst_name, failures=failures)


# ---------------------------------------------------------------------------
# Exhaustive branch checks


def _target(protocol: str, d: int, psi: np.ndarray) -> np.ndarray:
    if protocol.startswith("teleport"):
        return psi
    return cnot(d, adjoint=protocol == "remote_cnot_dagger") @ psi


def exhaustive_protocol_check(protocol: str, d: int, trials: int = 20, seed: int = 0,
                              inputs: Sequence[StateVector] = ()) -> VerificationReport:
    """Every (m, n) branch of every input: probability 1/d**2 and corrected output on target.

    Teleportation must restore the input exactly; remote CNOT up to the
    global phase, which must also match the correction table's branch phase.
    Two-qudit protocols always include the maximally entangled input.
    """
    protocol = canonical_name(protocol)
    script = build_script(protocol, d)
    wires = script.input_wires
    extra = list(inputs)
    if wires == 2:
        extra.append(max_entangled(d))
    states = _inputs(d, wires, trials, seed, extra)
    worst, worst_branch = 0.0, None
    worst_prob, min_fid, worst_phase = 0.0, 1.0, 0.0
    for psi in states:
        target = _target(protocol, d, psi)
        for t in engine.enumerate_branches(script, StateVector(d, wires, psi), seed):
            joint = float(np.prod([e["probability"] for e in t.events if e["type"] == "measure"]))
            out = np.asarray(t.final_state.amps)
            overlap = np.vdot(target, out)
            if script.exact:
                aligned = target
            else:
                aligned = target * overlap / abs(overlap) if abs(overlap) > 0 else target
            dev = float(np.abs(out - aligned).max())
            key = (t.outcomes["m"], t.outcomes["n"])
            if worst_branch is None or dev > worst:
                worst, worst_branch = dev, key
            worst_prob = max(worst_prob, abs(joint - 1 / d**2))
            min_fid = min(min_fid, float(abs(overlap) ** 2))
            worst_phase = max(worst_phase, t.phase_error)
    passed = (worst <= PROTOCOL_TOL and worst_prob <= IDENTITY_TOL
              and min_fid >= 1 - PROTOCOL_TOL and worst_phase <= PROTOCOL_TOL)
    rep = _report(f"exhaustive_{protocol}", d, len(states), worst, worst_branch, PROTOCOL_TOL,
                  max_probability_deviation=worst_prob, min_fidelity=min_fid,
                  max_phase_error=worst_phase)
    rep.passed = bool(passed)
    return rep


# ---------------------------------------------------------------------------
# Deriving the remote-CNOT correction table


def remote_lhs(psi: np.ndarray, d: int, conjugate: Sequence[str] = ("C_j'j", "H_j'")) -> np.ndarray:
    """Dense ``C_ii' H_j' C_j'j |psi>|Psi>`` on (i, i', j', j), with the named gates daggered."""
    layout_state = kron(psi, max_entangled(d).amps).reshape(d, d, d, d).transpose(0, 2, 3, 1).reshape(-1)
    c_jj = _embed_two(d, cnot(d, adjoint="C_j'j" in conjugate), 2, 3, 4)
    h = fourier(d)
    h_j = _embed_one(d, h.conj().T if "H_j'" in conjugate else h, 2, 4)
    c_ii = _embed_two(d, cnot(d, adjoint="C_ii'" in conjugate), 0, 1, 4)
    return c_ii @ h_j @ c_jj @ layout_state


def _best_pauli_correction(residual: np.ndarray, target: np.ndarray, d: int):
    """Search Z^za X^xa on i and Z^zb X^xb on j mapping residual onto target up to phase."""
    R = residual.reshape(d, d)
    T = target.reshape(d, d)
    paulis = {(x, z): clock(d, z) @ shift(d, x) for x in range(d) for z in range(d)}
    hits = []
    for (xa, za), A in paulis.items():
        AR = A @ R
        for (xb, zb), B in paulis.items():
            ov = np.vdot(T, AR @ B.T)
            if abs(ov) >= 1 - PROTOCOL_TOL:
                hits.append(((xa, za, xb, zb), ov))
    return hits


def _fit_linear(values: dict) -> list[int]:
    for cm, cn in itertools.product((0, 1, -1), repeat=2):
        if all((cm * m + cn * n - v) % d == 0 for (d, m, n), v in values.items()):
            return [cm, cn]
    raise ValueError("exponent is not linear in (m, n) with coefficients in {-1, 0, 1}")


def derive_remote_cnot_table(d_values: Sequence[int] = (2, 3, 4, 5), seed: int = 0,
                             conjugate: Sequence[str] = ("C_j'j", "H_j'")) -> dict:
    """Find, by exhaustive search over local Pauli pairs, the correction formula
    that maps every branch of the conjugated remote-CNOT circuit onto ``CNOT|psi>``.

    Raises ValueError if some branch has no unique Pauli correction or if
    the corrections are not a single linear formula across all ``d``.
    """
    exps = {k: {} for k in ("xa", "za", "xb", "zb")}
    phases = {}
    for d in d_values:
        psi = random_state(d, 2, seed + d).amps
        target = cnot(d) @ psi
        lhs = remote_lhs(psi, d, conjugate).reshape(d, d, d, d)
        for m in range(d):
            for n in range(d):
                residual = lhs[:, m, n, :].reshape(-1) * d
                hits = _best_pauli_correction(residual, target, d)
                if len(hits) != 1:
                    raise ValueError(f"d={d}, branch {(m, n)}: {len(hits)} Pauli corrections found")
                (xa, za, xb, zb), ov = hits[0]
                for k, v in zip(("xa", "za", "xb", "zb"), (xa, za, xb, zb)):
                    exps[k][(d, m, n)] = v
                phases[(d, m, n)] = ov
    coeffs = {k: _fit_linear(v) for k, v in exps.items()}
    phase_nm = None
    for p in (0, 1, -1):
        if all(abs(ov - _omega(d) ** ((p * n * m) % d)) <= PROTOCOL_TOL for (d, m, n), ov in phases.items()):
            phase_nm = p
            break
    if phase_nm is None:
        raise ValueError("branch phase is not w^(k n m) for k in {-1, 0, 1}")
    return {
        "protocol": "remote_cnot",
        "local_gates": {"Alice": ["CNOT i->i'"], "Bob": ["CNOT_adj j'->j", "H_adj j'"]},
        "order": "per party: X power first, then Z power; powers are [coef_m, coef_n]",
        "alice": {"wire": "i", "x": coeffs["xa"], "z": coeffs["za"]},
        "bob": {"wire": "j", "x": coeffs["xb"], "z": coeffs["zb"]},
        "phase_nm": phase_nm,
        "derived_for_d": list(d_values),
    }


def regenerate_remote_cnot_table(path: Optional[Path] = None, d_values: Sequence[int] = (2, 3, 4, 5),
                                 seed: int = 0, verify_d_max: int = 7) -> dict:
    """Derive the table, write it, then re-run the exhaustive check on the written data."""
    from . import protocols

    table = derive_remote_cnot_table(d_values, seed)
    path = path or Path(__file__).parent / "data" / "remote_cnot_corrections.json"
    path.write_text(json.dumps(table, indent=2) + "\n")
    protocols.frozen_remote_cnot_table.cache_clear()
    for d in range(2, verify_d_max + 1):
        rep = exhaustive_protocol_check("remote_cnot", d, trials=3, seed=seed)
        if not rep.passed:
            raise RuntimeError(f"frozen table fails exhaustive check at d={d}: {rep.to_dict()}")
    return table
