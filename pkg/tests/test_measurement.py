import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from quditlocc import engine
from quditlocc.errors import InvalidDigit, InvalidWire
from quditlocc.gates import apply_hadamard
from quditlocc.measurement import measure, outcome_distribution, postselect
from quditlocc.protocols import remote_cnot_script, teleport_script
from quditlocc.state import basis_state, max_entangled, random_state


def uniform(d):
    return apply_hadamard(basis_state(d, [0]), 0)


class TestOutcomeDistribution:
    def test_uniform_superposition(self):
        np.testing.assert_allclose(outcome_distribution(uniform(5), 0), np.full(5, 0.2), atol=1e-12)

    def test_basis_state(self):
        np.testing.assert_array_equal(outcome_distribution(basis_state(4, [2]), 0), [0, 0, 1, 0])

    def test_teleport_register_is_uniform(self):
        d = 3
        s = engine.pre_measurement_state(teleport_script(d), random_state(d, 1, 17))
        np.testing.assert_allclose(outcome_distribution(s, 0), np.full(d, 1 / d), atol=1e-12)
        np.testing.assert_allclose(outcome_distribution(s, 1), np.full(d, 1 / d), atol=1e-12)
        joint = (np.abs(s.tensor_view()) ** 2).sum(axis=2)
        np.testing.assert_allclose(joint, np.full((d, d), 1 / d**2), atol=1e-12)

    def test_bad_wire(self):
        with pytest.raises(InvalidWire):
            outcome_distribution(basis_state(3, [0]), 2)


class TestMeasure:
    def test_basis_state_is_certain(self):
        rec = measure(basis_state(3, [2]), 0, np.random.default_rng(0))
        assert rec.outcome == 2
        assert rec.probability == 1
        np.testing.assert_array_equal(rec.post_state.amps, basis_state(3, [2]).amps)

    def test_deterministic_for_seed(self):
        a = [measure(uniform(4), 0, np.random.default_rng(9)).outcome for _ in range(5)]
        b = [measure(uniform(4), 0, np.random.default_rng(9)).outcome for _ in range(5)]
        assert a == b

    def test_empirical_frequencies(self):
        rng = np.random.default_rng(2024)
        s = uniform(4)
        counts = np.bincount([measure(s, 0, rng).outcome for _ in range(100_000)], minlength=4)
        np.testing.assert_allclose(counts / 100_000, 0.25, atol=0.01)

    @pytest.mark.parametrize("seed", [1, 2, 3])
    def test_chi_square_against_born_rule(self, seed):
        s = random_state(5, 2, seed)
        probs = outcome_distribution(s, 1)
        rng = np.random.default_rng(seed)
        n = 20_000
        counts = np.bincount([measure(s, 1, rng).outcome for _ in range(n)], minlength=5)
        assert stats.chisquare(counts, probs * n).pvalue > 0.001

    def test_post_state_normalized(self):
        rec = measure(random_state(3, 3, 4), 1, np.random.default_rng(1))
        assert abs(rec.post_state.norm() - 1) < 1e-10
        assert rec.probability == pytest.approx(outcome_distribution(random_state(3, 3, 4), 1)[rec.outcome], abs=1e-12)


class TestPostselect:
    def test_max_entangled(self):
        p, post = postselect(max_entangled(3), 0, 1)
        assert p == pytest.approx(1 / 3, abs=1e-12)
        np.testing.assert_allclose(post.amps, basis_state(3, [1, 1]).amps, atol=1e-12)

    def test_zero_probability_is_absent(self):
        p, post = postselect(basis_state(2, [0]), 0, 1)
        assert p == 0
        assert post is None

    def test_bad_outcome(self):
        with pytest.raises(InvalidDigit):
            postselect(basis_state(2, [0]), 0, 2)

    @pytest.mark.parametrize("d", range(2, 6))
    def test_remote_cnot_branches_uniform(self, d):
        s = engine.pre_measurement_state(remote_cnot_script(d), random_state(d, 2, d))
        for m in range(d):
            p_m, post = postselect(s, 1, m)
            for n in range(d):
                p_n, _ = postselect(post, 2, n)
                assert p_m * p_n == pytest.approx(1 / d**2, abs=1e-12)


@given(st.integers(2, 5), st.integers(1, 3), st.integers(0, 2**32 - 1), st.data())
@settings(max_examples=60, deadline=None)
def test_postselect_probabilities_sum_to_one(d, wires, seed, data):
    s = random_state(d, wires, seed)
    wire = data.draw(st.integers(0, wires - 1))
    total = sum(postselect(s, wire, k)[0] for k in range(d))
    assert abs(total - 1) < 1e-10


@given(st.integers(2, 4), st.integers(0, 2**32 - 1), st.data())
@settings(max_examples=60, deadline=None)
def test_postselections_commute(d, seed, data):
    s = random_state(d, 3, seed)
    a, b = data.draw(st.integers(0, d - 1)), data.draw(st.integers(0, d - 1))
    pa, sa = postselect(s, 0, a)
    pab, sab = postselect(sa, 2, b)
    pb, sb = postselect(s, 2, b)
    pba, sba = postselect(sb, 0, a)
    assert pa * pab == pytest.approx(pb * pba, abs=1e-12)
    np.testing.assert_allclose(sab.amps, sba.amps, atol=1e-12)
