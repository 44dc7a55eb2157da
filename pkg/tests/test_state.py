import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quditlocc import gates
from quditlocc.errors import (
    CapacityExceeded,
    DimensionMismatch,
    InvalidDigit,
    InvalidDimension,
    StateFileError,
)
from quditlocc.state import (
    StateVector,
    basis_state,
    digits_of,
    drop_wire,
    equal_up_to_global_phase,
    fidelity,
    index_of,
    max_entangled,
    permute_wires,
    random_state,
    read_state_file,
    set_max_amplitudes,
    tensor,
    write_state_file,
)


class TestBasisState:
    def test_two_wire_index(self):
        s = basis_state(3, [1, 2])
        assert s.wires == 2
        assert np.flatnonzero(s.amps).tolist() == [5]
        assert s.amps[5] == 1

    def test_single_qubit(self):
        np.testing.assert_array_equal(basis_state(2, [0]).amps, [1, 0])

    def test_three_wire_index(self):
        assert np.flatnonzero(basis_state(5, [4, 0, 4]).amps).tolist() == [104]

    @pytest.mark.parametrize("digits", [[3], [0, -1], [1, 5]])
    def test_digit_out_of_range(self, digits):
        with pytest.raises(InvalidDigit):
            basis_state(3, digits)


class TestMaxEntangled:
    def test_qubit(self):
        r = 1 / np.sqrt(2)
        np.testing.assert_allclose(max_entangled(2).amps, [r, 0, 0, r], atol=1e-15)

    def test_qutrit(self):
        amps = max_entangled(3).amps
        assert np.flatnonzero(amps).tolist() == [0, 4, 8]
        np.testing.assert_allclose(amps[[0, 4, 8]], 1 / np.sqrt(3), atol=1e-15)

    def test_bad_dimension(self):
        with pytest.raises(InvalidDimension):
            max_entangled(1)

    def test_equals_hadamard_then_cnot(self):
        s = gates.apply_cnot(gates.apply_hadamard(basis_state(2, [0, 0]), 0), 0, 1)
        np.testing.assert_allclose(s.amps, max_entangled(2).amps, atol=1e-12)

    @pytest.mark.parametrize("d", range(3, 8))
    def test_equals_hadamard_then_cnot_qudit(self, d):
        s = gates.apply_cnot(gates.apply_hadamard(basis_state(d, [0, 0]), 0), 0, 1)
        np.testing.assert_allclose(s.amps, max_entangled(d).amps, atol=1e-12)


class TestTensor:
    def test_basis_product(self):
        s = tensor(basis_state(3, [1]), basis_state(3, [2]))
        np.testing.assert_array_equal(s.amps, basis_state(3, [1, 2]).amps)

    def test_norm_preserved(self):
        s = tensor(random_state(4, 1, seed=3), basis_state(4, [2]))
        assert abs(s.norm() - 1) < 1e-12

    def test_outer_product_order(self):
        a = StateVector(2, 1, [0.6, 0.8])
        b = StateVector(2, 1, [0.8, -0.6j])
        expected = [0.6 * 0.8, 0.6 * -0.6j, 0.8 * 0.8, 0.8 * -0.6j]
        np.testing.assert_array_equal(tensor(a, b).amps, expected)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            tensor(basis_state(2, [0]), basis_state(3, [0]))

    def test_associative_exact_for_dyadic_amplitudes(self):
        a = StateVector(2, 1, [0.5 + 0.5j, 0.5 - 0.5j])
        b = StateVector(2, 1, [0, 1j])
        c = StateVector(2, 1, [-0.5 - 0.5j, 0.5 - 0.5j])
        np.testing.assert_array_equal(tensor(tensor(a, b), c).amps, tensor(a, tensor(b, c)).amps)

    @given(st.integers(2, 5), st.integers(0, 2**32 - 1))
    @settings(max_examples=30, deadline=None)
    def test_associative_random(self, d, seed):
        a, b, c = (random_state(d, 1, seed + k) for k in range(3))
        np.testing.assert_allclose(
            tensor(tensor(a, b), c).amps, tensor(a, tensor(b, c)).amps, rtol=0, atol=1e-15
        )


class TestRandomState:
    def test_deterministic(self):
        np.testing.assert_array_equal(random_state(3, 2, 11).amps, random_state(3, 2, 11).amps)

    @given(st.integers(2, 7), st.integers(1, 3), st.integers(0, 2**32 - 1))
    @settings(max_examples=40, deadline=None)
    def test_normalized(self, d, wires, seed):
        assert abs(random_state(d, wires, seed).norm() - 1) < 1e-12

    def test_size(self):
        assert random_state(4, 2, 0).amps.size == 16

    def test_seeds_differ(self):
        assert not np.allclose(random_state(3, 1, 0).amps, random_state(3, 1, 1).amps)


class TestGlobalPhase:
    def test_phase_ignored(self):
        psi = random_state(3, 2, 5)
        rotated = StateVector(3, 2, np.exp(0.7j) * psi.amps)
        assert equal_up_to_global_phase(psi, rotated)
        assert abs(fidelity(psi, rotated) - 1) < 1e-12

    def test_orthogonal(self):
        a, b = basis_state(2, [0]), basis_state(2, [1])
        assert not equal_up_to_global_phase(a, b)
        assert fidelity(a, b) == 0

    def test_fourier_state_against_clock(self):
        psi = gates.apply_hadamard(basis_state(3, [0]), 0)
        zpsi = gates.apply_z(psi, 0, 1)
        # |<psi|Z psi>|^2 = |sum_j w^j / 3|^2, summed directly
        w = np.exp(2j * np.pi / 3)
        expected = abs(sum(w**j for j in range(3)) / 3) ** 2
        assert expected < 1e-30
        assert not equal_up_to_global_phase(psi, zpsi)
        assert fidelity(psi, zpsi) == pytest.approx(expected, abs=1e-15)

    def test_shape_mismatch(self):
        with pytest.raises(DimensionMismatch):
            fidelity(basis_state(2, [0]), basis_state(2, [0, 0]))


@pytest.mark.parametrize("d", range(2, 8))
@pytest.mark.parametrize("wires", range(1, 5))
def test_encoding_round_trip(d, wires):
    for x in range(d**wires):
        assert index_of(d, digits_of(d, wires, x)) == x


def test_unnormalized_rejected():
    with pytest.raises(ValueError):
        StateVector(2, 1, [1, 1])


def test_amplitudes_read_only():
    s = basis_state(2, [0])
    with pytest.raises(ValueError):
        s.amps[0] = 0


def test_capacity_cap():
    previous = set_max_amplitudes(100)
    try:
        with pytest.raises(CapacityExceeded):
            random_state(3, 5, 0)
        random_state(3, 4, 0)
    finally:
        set_max_amplitudes(previous)


def test_permute_wires_matches_swap():
    s = random_state(3, 3, 2)
    np.testing.assert_array_equal(permute_wires(s, [2, 1, 0]).amps, gates.apply_swap(s, 0, 2).amps)


def test_drop_wire():
    s = tensor(random_state(3, 1, 4), basis_state(3, [2]))
    np.testing.assert_array_equal(drop_wire(s, 1, 2).amps, random_state(3, 1, 4).amps)
    with pytest.raises(ValueError):
        drop_wire(s, 1, 0)


class TestStateFile:
    def test_round_trip(self, tmp_path):
        s = random_state(3, 2, 8)
        path = tmp_path / "s.json"
        write_state_file(s, path)
        np.testing.assert_allclose(read_state_file(path).amps, s.amps, atol=1e-15)

    def test_renormalizes_small_error(self, tmp_path):
        path = tmp_path / "s.json"
        path.write_text(json.dumps({"d": 2, "wires": 1, "amps": [[1.00001, 0], [0, 0]]}))
        s = read_state_file(path)
        assert abs(s.norm() - 1) < 1e-14

    def test_rejects_large_error(self, tmp_path):
        path = tmp_path / "s.json"
        path.write_text(json.dumps({"d": 2, "wires": 1, "amps": [[1, 0], [1, 0]]}))
        with pytest.raises(StateFileError):
            read_state_file(path)

    @pytest.mark.parametrize(
        "doc",
        ['{"d": 2, "wires": 1, "amps": [[1, 0]]}', '{"d": 1, "wires": 1, "amps": [[1, 0]]}', "not json"],
    )
    def test_rejects_malformed(self, tmp_path, doc):
        path = tmp_path / "s.json"
        path.write_text(doc)
        with pytest.raises(StateFileError):
            read_state_file(path)
