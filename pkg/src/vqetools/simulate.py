"""Exact statevector simulation of parametric circuits.

Provides circuit evaluation, analytic tangent vectors (derivatives of the
output state with respect to each parameter), Pauli expectation values and
seeded shot sampling. States are plain complex numpy vectors of length
``2**num_qubits`` with little-endian qubit ordering.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .circuits import (
    CONTROLLED_ROTATION_GATES,
    ParametricCircuit,
    ROTATION_GATES,
)
from .paulis import PauliSum
from .rng import stream

_H = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=complex) / np.sqrt(2.0)
_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
_CNOT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)
_AXIS_PAULI = {"x": _X, "y": _Y, "z": _Z}


def zero_state(num_qubits: int) -> np.ndarray:
    state = np.zeros(2**num_qubits, dtype=complex)
    state[0] = 1.0
    return state


def _rotation(axis: str, angle: float) -> np.ndarray:
    # exp(-i * angle * P / 2)
    c = np.cos(angle / 2.0)
    s = np.sin(angle / 2.0)
    if axis == "x":
        return np.array([[c, -1j * s], [-1j * s, c]])
    if axis == "y":
        return np.array([[c, -s], [s, c]], dtype=complex)
    return np.array([[np.exp(-1j * angle / 2.0), 0.0], [0.0, np.exp(1j * angle / 2.0)]])


def apply_single_qubit(state: np.ndarray, mat: np.ndarray, qubit: int,
                       num_qubits: int) -> np.ndarray:
    """Apply a 2x2 operator on one qubit of a little-endian state vector."""
    psi = state.reshape(2 ** (num_qubits - qubit - 1), 2, 2**qubit)
    return np.einsum("ab,ibj->iaj", mat, psi).reshape(-1)


def apply_two_qubit(state: np.ndarray, mat: np.ndarray, q_first: int,
                    q_second: int, num_qubits: int) -> np.ndarray:
    """Apply a 4x4 operator on (q_first, q_second).

    The 4x4 matrix is indexed so that q_first supplies the more significant
    bit of the pair, i.e. basis order |q_first q_second> = 00, 01, 10, 11.
    """
    psi = state.reshape([2] * num_qubits)
    ax1 = num_qubits - 1 - q_first
    ax2 = num_qubits - 1 - q_second
    psi = np.moveaxis(psi, (ax1, ax2), (0, 1))
    shape = psi.shape
    psi = (mat @ psi.reshape(4, -1)).reshape(shape)
    psi = np.moveaxis(psi, (0, 1), (ax1, ax2))
    return psi.reshape(-1).copy()


def _controlled(mat2: np.ndarray) -> np.ndarray:
    out = np.eye(4, dtype=complex)
    out[2:, 2:] = mat2
    return out


def _gate_angles(circuit: ParametricCircuit, params: Sequence[float]) -> list[float | None]:
    """Resolved angle per gate (None for fixed non-rotation gates)."""
    params = np.asarray(params, dtype=float)
    if params.shape != (circuit.num_parameters,):
        raise ValueError(
            f"expected {circuit.num_parameters} parameter values, "
            f"got shape {params.shape}"
        )
    index = {name: i for i, name in enumerate(circuit.parameters)}
    angles: list[float | None] = []
    for g in circuit.gates:
        if g.param is not None:
            angles.append(float(params[index[g.param]]))
        elif g.value is not None:
            angles.append(g.value)
        else:
            angles.append(None)
    return angles


def _apply_gate(state: np.ndarray, gate, angle: float | None,
                num_qubits: int) -> np.ndarray:
    name = gate.gate
    if name in ROTATION_GATES:
        return apply_single_qubit(state, _rotation(name[1], angle),
                                  gate.qubits[0], num_qubits)
    if name in CONTROLLED_ROTATION_GATES:
        return apply_two_qubit(state, _controlled(_rotation(name[2], angle)),
                               gate.qubits[0], gate.qubits[1], num_qubits)
    if name == "cnot":
        return apply_two_qubit(state, _CNOT, gate.qubits[0], gate.qubits[1],
                               num_qubits)
    mat = {"h": _H, "x": _X, "z": _Z}[name]
    return apply_single_qubit(state, mat, gate.qubits[0], num_qubits)


def apply_circuit(circuit: ParametricCircuit, params: Sequence[float],
                  state: np.ndarray) -> np.ndarray:
    """Apply the circuit's gates in list order to an existing state."""
    state = np.asarray(state, dtype=complex)
    if state.shape != (2**circuit.num_qubits,):
        raise ValueError(
            f"state has dimension {state.shape}, circuit needs "
            f"{2**circuit.num_qubits}"
        )
    angles = _gate_angles(circuit, params)
    for gate, angle in zip(circuit.gates, angles):
        state = _apply_gate(state, gate, angle, circuit.num_qubits)
    return state


def evaluate_circuit(circuit: ParametricCircuit,
                     params: Sequence[float]) -> np.ndarray:
    """Output state of the circuit applied to |0...0>."""
    return apply_circuit(circuit, params, zero_state(circuit.num_qubits))


def _evaluate_with_insertions(
    circuit: ParametricCircuit,
    params: Sequence[float],
    insertions: Mapping[int, np.ndarray],
) -> np.ndarray:
    """Run the circuit inserting extra operators after selected gates.

    ``insertions`` maps gate position -> matrix (2x2 for single-qubit gates,
    4x4 for two-qubit gates); each is applied on its gate's qubits right
    after that gate. Used for analytic derivatives and overlap estimation.
    """
    state = zero_state(circuit.num_qubits)
    angles = _gate_angles(circuit, params)
    n = circuit.num_qubits
    for pos, (gate, angle) in enumerate(zip(circuit.gates, angles)):
        state = _apply_gate(state, gate, angle, n)
        if pos in insertions:
            op = insertions[pos]
            if len(gate.qubits) == 1:
                state = apply_single_qubit(state, op, gate.qubits[0], n)
            else:
                state = apply_two_qubit(state, op, gate.qubits[0],
                                        gate.qubits[1], n)
    return state


def _generator_insertion(gate) -> np.ndarray:
    """Matrix of -i G for the gate's generator G.

    Plain rotations have G = P/2 on the target; controlled rotations have
    G = |1><1| (x) P/2, which vanishes on the control-|0> block.
    """
    if gate.gate in ROTATION_GATES:
        return -0.5j * _AXIS_PAULI[gate.gate[1]]
    pauli = _AXIS_PAULI[gate.gate[2]]
    out = np.zeros((4, 4), dtype=complex)
    out[2:, 2:] = -0.5j * pauli
    return out


def tangent_vector(circuit: ParametricCircuit, params: Sequence[float],
                   index: int) -> np.ndarray:
    """Analytic derivative of the output state w.r.t. parameter ``index``.

    Sums, over every gate occurrence of the parameter, the circuit run with
    -iG inserted after that occurrence. The result is an unnormalized
    vector; a single Pauli-rotation occurrence has norm 1/2.
    """
    if not 0 <= index < circuit.num_parameters:
        raise ValueError(
            f"parameter index {index} out of range "
            f"(0..{circuit.num_parameters - 1})"
        )
    positions = circuit.occurrences(index)
    total = np.zeros(2**circuit.num_qubits, dtype=complex)
    for pos in positions:
        op = _generator_insertion(circuit.gates[pos])
        total += _evaluate_with_insertions(circuit, params, {pos: op})
    return total


def _apply_pauli_string(state: np.ndarray, string: Mapping[int, str],
                        num_qubits: int) -> np.ndarray:
    psi = state.reshape([2] * num_qubits).copy()
    for q, p in string.items():
        ax = num_qubits - 1 - q
        if p == "X":
            psi = np.flip(psi, axis=ax)
        elif p == "Y":
            psi = np.flip(psi, axis=ax)
            # Y|0> = i|1>, Y|1> = -i|0>
            idx0 = [slice(None)] * num_qubits
            idx0[ax] = 0
            idx1 = [slice(None)] * num_qubits
            idx1[ax] = 1
            psi[tuple(idx0)] *= -1.0j
            psi[tuple(idx1)] *= 1.0j
        else:  # Z
            idx1 = [slice(None)] * num_qubits
            idx1[ax] = 1
            psi[tuple(idx1)] *= -1.0
    return psi.reshape(-1)


def expectation(state: np.ndarray, observable: PauliSum) -> float:
    """<state| observable |state> as a real number.

    The imaginary residue must stay below 1e-10 (guaranteed for Hermitian
    input up to roundoff); it is checked and discarded.
    """
    state = np.asarray(state, dtype=complex)
    dim = state.shape[0]
    num_qubits = int(np.log2(dim))
    if 2**num_qubits != dim:
        raise ValueError(f"state dimension {dim} is not a power of two")
    if observable.min_qubits() > num_qubits:
        raise ValueError(
            f"observable acts on {observable.min_qubits()} qubits, state has "
            f"{num_qubits}"
        )
    value = 0.0 + 0.0j
    for coeff, string in observable:
        value += coeff * np.vdot(state, _apply_pauli_string(state, string,
                                                            num_qubits))
    if abs(value.imag) > 1e-10:
        raise ValueError(f"expectation has imaginary residue {value.imag:g}")
    return float(value.real)


def bitstring(index: int, num_qubits: int) -> str:
    """Basis index as a bitstring, most significant qubit first."""
    return format(index, f"0{num_qubits}b")


@dataclass(frozen=True)
class ShotCounts:
    """Measurement outcome tallies.

    Keys are bitstrings written ``q(n-1) ... q0`` (qubit 0 least
    significant); values are nonnegative counts summing to ``shots``.
    """

    counts: Mapping[str, int]
    shots: int
    num_qubits: int

    def __post_init__(self):
        object.__setattr__(self, "counts", dict(self.counts))
        total = 0
        for key, value in self.counts.items():
            if len(key) != self.num_qubits or set(key) - {"0", "1"}:
                raise ValueError(f"bad bitstring key {key!r}")
            if value < 0:
                raise ValueError("counts must be nonnegative")
            total += value
        if total != self.shots:
            raise ValueError(f"counts sum to {total}, expected {self.shots}")

    def frequencies(self) -> dict[str, float]:
        return {k: v / self.shots for k, v in self.counts.items()}

    def to_dict(self) -> dict:
        return {
            "counts": {k: int(v) for k, v in sorted(self.counts.items())},
            "shots": int(self.shots),
            "num_qubits": int(self.num_qubits),
            "qubit_ordering": "little-endian",
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "ShotCounts":
        counts = {str(k): int(v) for k, v in data["counts"].items()}
        widths = {len(k) for k in counts}
        if len(widths) > 1:
            raise ValueError("inconsistent bitstring widths in counts")
        num_qubits = int(data.get("num_qubits", widths.pop() if widths else 1))
        shots = int(data.get("shots", sum(counts.values())))
        return cls(counts=counts, shots=shots, num_qubits=num_qubits)


def sample_measurements(state: np.ndarray, shots: int, seed: int) -> ShotCounts:
    """Draw computational-basis outcomes i.i.d. from |amplitude|^2.

    Deterministic for a given seed (PCG64). Outcomes with zero probability
    are never drawn.
    """
    if shots <= 0:
        raise ValueError("shots must be positive")
    state = np.asarray(state, dtype=complex)
    num_qubits = int(np.log2(state.shape[0]))
    if 2**num_qubits != state.shape[0]:
        raise ValueError("state dimension is not a power of two")
    probs = np.abs(state) ** 2
    probs = probs / probs.sum()
    rng = stream(seed)
    draws = rng.multinomial(shots, probs)
    counts = {
        bitstring(i, num_qubits): int(c) for i, c in enumerate(draws) if c > 0
    }
    return ShotCounts(counts=counts, shots=shots, num_qubits=num_qubits)
