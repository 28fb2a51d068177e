"""Shared test utilities: random circuit corpus and independent oracles."""

from __future__ import annotations

import numpy as np
import pytest

from vqetools import GateSpec, ParametricCircuit, evaluate_circuit


def random_circuit(num_qubits: int, num_params: int, seed: int,
                   shared_prob: float = 0.2) -> ParametricCircuit:
    """Random circuit where every parameter occurs at least once.

    Mixes plain and controlled rotations, fixed gates and fixed-angle
    rotations; a few parameters get a second occurrence to exercise shared
    parameters.
    """
    rng = np.random.default_rng(seed)
    names = [f"p{i}" for i in range(num_params)]
    single = ["rx", "ry", "rz"]
    controlled = ["crx", "cry", "crz"]
    fixed = ["h", "x", "z"]

    def random_param_gate(name: str) -> GateSpec:
        if num_qubits > 1 and rng.random() < 0.3:
            control, target = rng.choice(num_qubits, size=2, replace=False)
            return GateSpec(str(rng.choice(controlled)),
                            (int(control), int(target)), param=name)
        return GateSpec(str(rng.choice(single)),
                        (int(rng.integers(num_qubits)),), param=name)

    def random_fixed_gate() -> GateSpec:
        if num_qubits > 1 and rng.random() < 0.4:
            control, target = rng.choice(num_qubits, size=2, replace=False)
            return GateSpec("cnot", (int(control), int(target)))
        if rng.random() < 0.3:
            return GateSpec(str(rng.choice(single)),
                            (int(rng.integers(num_qubits)),),
                            value=float(rng.uniform(0, 2 * np.pi)))
        return GateSpec(str(rng.choice(fixed)), (int(rng.integers(num_qubits)),))

    gates: list[GateSpec] = []
    for name in names:
        gates.append(random_param_gate(name))
        if rng.random() < 0.4:
            gates.append(random_fixed_gate())
    for name in names:
        if rng.random() < shared_prob:
            gates.append(random_param_gate(name))
    return ParametricCircuit(num_qubits=num_qubits, gates=tuple(gates),
                             parameters=tuple(names))


def random_point(num_params: int, seed: int) -> np.ndarray:
    return np.random.default_rng(seed).uniform(0.0, 2.0 * np.pi, num_params)


def finite_difference_jacobian(circuit: ParametricCircuit,
                               params: np.ndarray,
                               h: float = 1e-6) -> np.ndarray:
    """Real Jacobian of the output state by central differences.

    Column j stacks the real and imaginary parts of the numerical
    derivative with respect to parameter j. Independent of the analytic
    tangent path.
    """
    params = np.asarray(params, dtype=float)
    cols = []
    for j in range(circuit.num_parameters):
        plus = params.copy()
        plus[j] += h
        minus = params.copy()
        minus[j] -= h
        diff = (evaluate_circuit(circuit, plus)
                - evaluate_circuit(circuit, minus)) / (2.0 * h)
        cols.append(np.concatenate([diff.real, diff.imag]))
    return np.array(cols).T


def numerical_rank(matrix: np.ndarray, tol: float = 1e-6) -> int:
    """Count singular values above ``tol``."""
    if matrix.size == 0:
        return 0
    return int((np.linalg.svd(matrix, compute_uv=False) > tol).sum())


@pytest.fixture
def rng():
    return np.random.default_rng(20240613)
