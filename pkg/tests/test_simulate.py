import numpy as np
import pytest

from vqetools import (
    GateSpec,
    ParametricCircuit,
    PauliSum,
    apply_circuit,
    evaluate_circuit,
    expectation,
    sample_measurements,
    single_qubit_euler_circuit,
    tangent_vector,
)

from conftest import random_circuit, random_point

# 2x2 single-qubit matrices for the independent matrix-product oracle
def _rx(t):
    c, s = np.cos(t / 2), np.sin(t / 2)
    return np.array([[c, -1j * s], [-1j * s, c]])


def _ry(t):
    c, s = np.cos(t / 2), np.sin(t / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def _rz(t):
    return np.array([[np.exp(-1j * t / 2), 0], [0, np.exp(1j * t / 2)]])


class TestEvaluate:
    def test_empty_circuit(self):
        circuit = ParametricCircuit(1, ())
        assert np.array_equal(evaluate_circuit(circuit, []), [1.0, 0.0])

    def test_rx_pi_flips_with_phase(self):
        circuit = ParametricCircuit(1, (GateSpec("rx", (0,), param="a"),), ("a",))
        state = evaluate_circuit(circuit, [np.pi])
        assert np.allclose(state, [0.0, -1.0j], atol=1e-12)

    def test_euler_chain_matches_matrix_oracle(self):
        point = [0.3, 0.7, 1.1]
        state = evaluate_circuit(single_qubit_euler_circuit(), point)
        oracle = _ry(1.1) @ _rz(0.7) @ _rx(0.3) @ np.array([1.0, 0.0], dtype=complex)
        assert np.allclose(state, oracle, atol=1e-14)
        # frozen values from the matrix-product oracle
        frozen = np.array([
            0.7650621793484506 - 0.21567241009038499j,
            0.5291698089444968 - 0.29689154005806323j,
        ])
        assert np.allclose(state, frozen, atol=1e-12)

    def test_param_count_mismatch(self):
        with pytest.raises(ValueError, match="expected 3 parameter"):
            evaluate_circuit(single_qubit_euler_circuit(), [0.1, 0.2])

    def test_little_endian_x_on_qubit_one(self):
        circuit = ParametricCircuit(2, (GateSpec("x", (1,)),))
        state = evaluate_circuit(circuit, [])
        # |01> with qubit 1 set means basis index 2
        assert np.allclose(state, [0, 0, 1, 0])

    def test_cnot_entangles(self):
        circuit = ParametricCircuit(
            2, (GateSpec("h", (0,)), GateSpec("cnot", (0, 1))))
        state = evaluate_circuit(circuit, [])
        assert np.allclose(state, [1 / np.sqrt(2), 0, 0, 1 / np.sqrt(2)])

    def test_controlled_rotation_identity_on_zero_control(self):
        circuit = ParametricCircuit(
            2, (GateSpec("crx", (0, 1), param="a"),), ("a",))
        assert np.allclose(evaluate_circuit(circuit, [1.3]), [1, 0, 0, 0])

    @pytest.mark.parametrize("seed", range(6))
    def test_norm_preserved_on_random_circuits(self, seed):
        circuit = random_circuit(num_qubits=1 + seed % 4, num_params=2 + seed,
                                 seed=seed)
        point = random_point(circuit.num_parameters, seed + 100)
        state = evaluate_circuit(circuit, point)
        assert abs(np.linalg.norm(state) - 1.0) < 1e-12

    @pytest.mark.parametrize("seed", range(4))
    def test_composition(self, seed):
        a = random_circuit(num_qubits=2, num_params=3, seed=seed)
        raw_b = random_circuit(num_qubits=2, num_params=2, seed=seed + 50)
        # rename b's parameters to avoid clashing with a's
        b = ParametricCircuit(2, tuple(
            GateSpec(g.gate, g.qubits,
                     param=None if g.param is None else f"q_{g.param}",
                     value=g.value)
            for g in raw_b.gates),
            tuple(f"q_{p}" for p in raw_b.parameters))
        combined = ParametricCircuit(2, a.gates + b.gates,
                                     a.parameters + b.parameters)
        pa = random_point(a.num_parameters, seed + 7)
        pb = random_point(b.num_parameters, seed + 8)
        joint = evaluate_circuit(combined, np.concatenate([pa, pb]))
        staged = apply_circuit(b, pb, evaluate_circuit(a, pa))
        assert np.allclose(joint, staged, atol=1e-13)


class TestTangent:
    def test_rx_derivative_at_zero(self):
        circuit = ParametricCircuit(1, (GateSpec("rx", (0,), param="a"),), ("a",))
        tangent = tangent_vector(circuit, [0.0], 0)
        assert np.allclose(tangent, [0.0, -0.5j], atol=1e-14)

    def test_single_occurrence_norm_is_half(self):
        circuit = single_qubit_euler_circuit()
        for j in range(3):
            tangent = tangent_vector(circuit, [0.4, 1.2, 2.2], j)
            assert abs(np.linalg.norm(tangent) - 0.5) < 1e-12

    def test_invalid_index(self):
        with pytest.raises(ValueError, match="out of range"):
            tangent_vector(single_qubit_euler_circuit(), [0.1, 0.2, 0.3], 3)

    def test_two_qubit_circuit_matches_central_differences(self):
        circuit = ParametricCircuit(
            2,
            (
                GateSpec("ry", (0,), param="a"),
                GateSpec("cnot", (0, 1)),
                GateSpec("crz", (0, 1), param="b"),
                GateSpec("rx", (1,), param="c"),
            ),
            ("a", "b", "c"),
        )
        point = np.array([0.7, 1.9, 2.4])
        h = 1e-5
        for j in range(3):
            plus, minus = point.copy(), point.copy()
            plus[j] += h
            minus[j] -= h
            fd = (evaluate_circuit(circuit, plus)
                  - evaluate_circuit(circuit, minus)) / (2 * h)
            assert np.allclose(tangent_vector(circuit, point, j), fd, atol=1e-8)

    @pytest.mark.parametrize("seed", range(8))
    def test_gradient_check_randomized_corpus(self, seed):
        # circuits up to 4 qubits and 12 parameters, h = 1e-5, tol 1e-8
        num_qubits = 1 + seed % 4
        num_params = min(12, 3 + 2 * seed)
        circuit = random_circuit(num_qubits, num_params, seed=seed + 300)
        point = random_point(num_params, seed + 400)
        h = 1e-5
        for j in range(num_params):
            plus, minus = point.copy(), point.copy()
            plus[j] += h
            minus[j] -= h
            fd = (evaluate_circuit(circuit, plus)
                  - evaluate_circuit(circuit, minus)) / (2 * h)
            analytic = tangent_vector(circuit, point, j)
            assert np.max(np.abs(analytic - fd)) < 1e-8

    def test_shared_parameter_sums_occurrences(self):
        shared = ParametricCircuit(
            1,
            (GateSpec("rx", (0,), param="a"), GateSpec("rx", (0,), param="a")),
            ("a",),
        )
        point = [0.8]
        h = 1e-5
        fd = (evaluate_circuit(shared, [0.8 + h])
              - evaluate_circuit(shared, [0.8 - h])) / (2 * h)
        assert np.allclose(tangent_vector(shared, point, 0), fd, atol=1e-9)


class TestExpectation:
    def test_z_on_zero(self):
        assert expectation(np.array([1, 0], dtype=complex),
                           PauliSum([(1.0, {0: "Z"})])) == pytest.approx(1.0)

    def test_z_on_plus(self):
        plus = np.array([1, 1], dtype=complex) / np.sqrt(2)
        assert expectation(plus, PauliSum([(1.0, {0: "Z"})])) == pytest.approx(0.0, abs=1e-14)

    def test_z_is_probability_difference(self, rng):
        # <psi|Z|psi> = |c1|^2 - |c2|^2 for psi = c1|0> + c2|1>
        c = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        c /= np.linalg.norm(c)
        value = expectation(c, PauliSum([(1.0, {0: "Z"})]))
        assert value == pytest.approx(abs(c[0]) ** 2 - abs(c[1]) ** 2, abs=1e-12)

    @pytest.mark.parametrize("seed", range(5))
    def test_matches_dense_matrix_oracle(self, seed):
        rng = np.random.default_rng(seed)
        state = rng.standard_normal(8) + 1j * rng.standard_normal(8)
        state /= np.linalg.norm(state)
        observable = PauliSum([
            (0.7, {0: "Z", 2: "Z"}),
            (-1.3, {1: "X"}),
            (0.4, {0: "Y", 1: "Z", 2: "X"}),
            (0.9, {}),
        ])
        dense = observable.to_matrix(3)
        oracle = float(np.real(np.vdot(state, dense @ state)))
        assert expectation(state, observable) == pytest.approx(oracle, abs=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError, match="observable acts on"):
            expectation(np.array([1, 0], dtype=complex),
                        PauliSum([(1.0, {3: "Z"})]))


class TestSampling:
    def test_zero_state_all_zero_outcomes(self):
        counts = sample_measurements(np.array([1, 0], dtype=complex), 500, 1)
        assert counts.counts == {"0": 500}

    def test_plus_state_frequency_within_five_sigma(self):
        plus = np.array([1, 1], dtype=complex) / np.sqrt(2)
        shots = 10**6
        counts = sample_measurements(plus, shots, 42)
        freq = counts.counts.get("1", 0) / shots
        sigma = np.sqrt(0.25 / shots)
        assert abs(freq - 0.5) < 5 * sigma

    def test_bell_state_zero_amplitudes_never_drawn(self):
        bell = np.zeros(4, dtype=complex)
        bell[0] = bell[3] = 1 / np.sqrt(2)
        counts = sample_measurements(bell, 10**6, 7)
        assert set(counts.counts) <= {"00", "11"}

    def test_same_seed_bit_identical(self):
        state = np.array([0.6, 0.8j], dtype=complex)
        a = sample_measurements(state, 4096, 9)
        b = sample_measurements(state, 4096, 9)
        assert a == b

    def test_zero_shots_rejected(self):
        with pytest.raises(ValueError, match="shots must be positive"):
            sample_measurements(np.array([1, 0], dtype=complex), 0, 1)

    def test_frequencies_converge_as_inverse_sqrt_shots(self):
        state = evaluate_circuit(single_qubit_euler_circuit(), [0.9, 0.2, 1.4])
        probs = np.abs(state) ** 2
        errors = []
        for shots in (10**3, 10**5):
            counts = sample_measurements(state, shots, 11)
            emp = np.array([counts.counts.get(b, 0) / shots for b in ("0", "1")])
            errors.append(np.max(np.abs(emp - probs)))
        # two orders of magnitude more shots: expect roughly 10x smaller error
        assert errors[1] < errors[0] / 3
