"""Readout bit-flip noise: simulation, calibration, and exact inversion.

The noise model is per-qubit and asymmetric: qubit q reads 0 as 1 with
probability p(q,0) and 1 as 0 with probability p(q,1); flips on different
qubits are independent. Under this model the statistical expectation of a
measured Z string factorizes over qubits, with per-qubit damping factors

    gamma(Z_q) = 1 - p(q,0) - p(q,1)
    gamma(1_q) = p(q,1) - p(q,0)

so the exact expectation of any diagonal observable can be reconstructed
from noisy counts by a tensor-product inversion whose cost is 2**k per
k-local term, polynomial for local Hamiltonians. Reconstruction fails only
when gamma(Z_q) = 0 for a needed qubit (total flip probability one half).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import combinations
from typing import Callable, Mapping, Sequence

import numpy as np

from .circuits import GateSpec, ParametricCircuit
from .paulis import PauliSum, split_measurement_settings
from .rng import child_seed, stream
from .simulate import ShotCounts, bitstring, evaluate_circuit, sample_measurements


class SingularGammaError(ValueError):
    """Raised when gamma(Z_q) = 0 makes the inversion impossible."""

    def __init__(self, qubit: int):
        self.qubit = qubit
        super().__init__(
            f"qubit {qubit}: gamma(Z) = 1 - p0 - p1 is zero, readout "
            "mitigation is impossible for this qubit"
        )


@dataclass(frozen=True)
class ReadoutNoiseModel:
    """Per-qubit asymmetric bit-flip probabilities.

    ``probabilities`` maps qubit -> (p0, p1) with p0 the chance of reading
    a true 0 as 1 and p1 the chance of reading a true 1 as 0.
    """

    probabilities: Mapping[int, tuple[float, float]]

    def __post_init__(self):
        clean = {}
        for q, (p0, p1) in dict(self.probabilities).items():
            q = int(q)
            p0, p1 = float(p0), float(p1)
            if not (0.0 <= p0 < 1.0 and 0.0 <= p1 < 1.0):
                raise ValueError(f"qubit {q}: flip probabilities must lie in [0, 1)")
            clean[q] = (p0, p1)
        object.__setattr__(self, "probabilities", clean)

    @classmethod
    def uniform(cls, num_qubits: int, p: float,
                p1: float | None = None) -> "ReadoutNoiseModel":
        """Same probabilities on every qubit; symmetric unless p1 given."""
        p1 = p if p1 is None else p1
        return cls({q: (p, p1) for q in range(num_qubits)})

    @property
    def qubits(self) -> tuple[int, ...]:
        return tuple(sorted(self.probabilities))

    def p0(self, qubit: int) -> float:
        return self.probabilities[qubit][0]

    def p1(self, qubit: int) -> float:
        return self.probabilities[qubit][1]

    def covers(self, num_qubits: int) -> bool:
        return all(q in self.probabilities for q in range(num_qubits))

    def to_dict(self) -> dict:
        return {
            "qubits": [
                {"q": q, "p0": self.probabilities[q][0], "p1": self.probabilities[q][1]}
                for q in self.qubits
            ]
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "ReadoutNoiseModel":
        try:
            entries = data["qubits"]
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed noise model: {exc}") from None
        return cls({int(e["q"]): (float(e["p0"]), float(e["p1"]))
                    for e in entries})


def gamma(op: str, qubit: int, model: ReadoutNoiseModel) -> float:
    """Damping factor of a single-qubit operator under readout flips.

    ``op`` is "Z" or "I" (identity). gamma("Z") = 1 - p0 - p1;
    gamma("I") = p1 - p0.
    """
    p0, p1 = model.probabilities[qubit]
    if op == "Z":
        return 1.0 - p0 - p1
    if op in ("I", "identity", "1"):
        return p1 - p0
    raise ValueError(f"op must be 'Z' or 'I', got {op!r}")


def _gamma_z_checked(qubit: int, model: ReadoutNoiseModel) -> float:
    g = gamma("Z", qubit, model)
    if abs(g) < 1e-12:
        raise SingularGammaError(qubit)
    return g


def _flip_kernel(p0: float, p1: float) -> np.ndarray:
    # column = true bit, row = read bit
    return np.array([[1.0 - p0, p1], [p0, 1.0 - p1]])


def noisy_probability_vector(probs: np.ndarray,
                             model: ReadoutNoiseModel) -> np.ndarray:
    """Exact outcome distribution after independent per-qubit bit flips."""
    probs = np.asarray(probs, dtype=float)
    num_qubits = int(np.log2(probs.shape[0]))
    if 2**num_qubits != probs.shape[0]:
        raise ValueError("probability vector length is not a power of two")
    if not model.covers(num_qubits):
        raise ValueError("noise model does not cover all qubits")
    out = probs
    for q in range(num_qubits):
        kernel = _flip_kernel(*model.probabilities[q])
        resh = out.reshape(2 ** (num_qubits - q - 1), 2, 2**q)
        out = np.einsum("ab,ibj->iaj", kernel, resh).reshape(-1)
    return out


def apply_readout_noise(counts: ShotCounts, model: ReadoutNoiseModel,
                        seed: int) -> ShotCounts:
    """Flip each shot's bits independently per the noise model.

    Equivalent to flipping every bit of every shot with its per-qubit
    probability; shots are preserved. Deterministic for a given seed.
    """
    n = counts.num_qubits
    if not model.covers(n):
        raise ValueError("noise model does not cover all qubits in the counts")
    rng = stream(seed)
    result: dict[str, int] = {}
    for source in sorted(counts.counts):
        c = counts.counts[source]
        if c == 0:
            continue
        # distribution over read outcomes for this true outcome
        pattern = np.array([1.0])
        for q in reversed(range(n)):
            bit = int(source[n - 1 - q])
            col = _flip_kernel(*model.probabilities[q])[:, bit]
            pattern = np.kron(pattern, col)
        draws = rng.multinomial(c, pattern)
        for idx, k in enumerate(draws):
            if k:
                key = bitstring(idx, n)
                result[key] = result.get(key, 0) + int(k)
    return ShotCounts(counts=result, shots=counts.shots, num_qubits=n)


def _support(zstring: Mapping[int, str] | Sequence[int]) -> tuple[int, ...]:
    if isinstance(zstring, Mapping):
        bad = {p for p in zstring.values() if p != "Z"}
        if bad:
            raise ValueError(f"expected a Z string, found letters {sorted(bad)}")
        return tuple(sorted(int(q) for q in zstring))
    return tuple(sorted(int(q) for q in zstring))


def correct_operator(zstring: Mapping[int, str] | Sequence[int],
                     model: ReadoutNoiseModel) -> PauliSum:
    """Expand a Z string into noisy Z strings whose measured value is
    an unbiased estimator of the exact expectation.

    Implements the tensor-product inversion
    ``prod over support of (Z_q - gamma(1_q) * 1) / gamma(Z_q)``: the result
    has 2**k terms for a k-qubit support, each a Z string on a subset, to
    be evaluated on noise-afflicted counts. An empty support returns the
    identity. Raises :class:`SingularGammaError` when some gamma(Z_q) = 0.
    """
    support = _support(zstring)
    inv = 1.0
    for q in support:
        inv /= _gamma_z_checked(q, model)
    terms = []
    for r in range(len(support) + 1):
        for subset in combinations(support, r):
            coeff = inv
            for q in support:
                if q not in subset:
                    coeff *= -gamma("I", q, model)
            terms.append((coeff, {q: "Z" for q in subset}))
    return PauliSum(terms)


def forward_noisy_operator(zstring: Mapping[int, str] | Sequence[int],
                           model: ReadoutNoiseModel) -> PauliSum:
    """Operator whose exact expectation equals the noisy expectation of the
    given Z string: ``prod over support of (gamma(Z_q) Z_q + gamma(1_q) 1)``.

    This is the inverse map of :func:`correct_operator` and is what an
    unmitigated estimator converges to.
    """
    support = _support(zstring)
    terms = []
    for r in range(len(support) + 1):
        for subset in combinations(support, r):
            coeff = 1.0
            for q in support:
                coeff *= gamma("Z", q, model) if q in subset else gamma("I", q, model)
            terms.append((coeff, {q: "Z" for q in subset}))
    return PauliSum(terms)


def _check_diagonal_support(observable: PauliSum, num_qubits: int) -> None:
    if not observable.is_diagonal():
        raise ValueError("observable must be diagonal (Z/identity strings)")
    out_of_range = [q for q in observable.support() if q >= num_qubits]
    if out_of_range:
        raise ValueError(
            f"observable touches qubits {sorted(out_of_range)} beyond the "
            f"counts' width {num_qubits}"
        )


def _weighted_z(weights: Mapping[str, float], total: float,
                qubits: Sequence[int], num_qubits: int) -> float:
    value = 0.0
    for key, w in weights.items():
        sign = 1.0
        for q in qubits:
            if key[num_qubits - 1 - q] == "1":
                sign = -sign
        value += w * sign
    return value / total


def raw_expectation(counts: ShotCounts, observable: PauliSum) -> float:
    """Plain empirical mean of a diagonal observable over the counts."""
    _check_diagonal_support(observable, counts.num_qubits)
    value = 0.0
    for coeff, string in observable:
        value += coeff * _weighted_z(counts.counts, counts.shots,
                                     sorted(string), counts.num_qubits)
    return value


def mitigated_expectation_from_distribution(
    distribution: Mapping[str, float],
    observable: PauliSum,
    model: ReadoutNoiseModel,
    num_qubits: int,
) -> float:
    """Mitigated value when outcome weights are known exactly.

    The mitigated estimator is linear in the outcome frequencies, so its
    statistical expectation equals its value on the exact noisy outcome
    distribution; this entry point is what makes that property directly
    checkable.
    """
    _check_diagonal_support(observable, num_qubits)
    total = sum(distribution.values())
    value = 0.0
    for coeff, string in observable:
        corrected = correct_operator(string, model)
        for sub_coeff, sub in corrected:
            value += coeff * sub_coeff * _weighted_z(
                distribution, total, sorted(sub), num_qubits)
    return value


def mitigated_expectation(counts: ShotCounts, observable: PauliSum,
                          model: ReadoutNoiseModel) -> float:
    """Unbiased estimate of a diagonal observable from noisy counts.

    Applies :func:`correct_operator` termwise and evaluates every corrected
    substring on the same counts. Cost per k-local term is 2**k times the
    number of distinct outcomes.
    """
    return mitigated_expectation_from_distribution(
        counts.counts, observable, model, counts.num_qubits)


@dataclass(frozen=True)
class MitigatedOperator:
    """A measured diagonal operator with its bit-flip corrected expansion."""

    original: PauliSum
    corrected: PauliSum


def preprocess_hamiltonian(observable: PauliSum,
                           model: ReadoutNoiseModel) -> dict[str, MitigatedOperator]:
    """Corrected operators per measurement setting for a Z/X Hamiltonian.

    Terms must be pure Z strings or pure X strings. X strings are measured
    after rotating every qubit with a Hadamard, where they act as Z strings
    and are corrected identically. Returns a mapping from setting name
    ("z", "x") to the raw and corrected diagonal operators; a constant term
    is carried on the "z" setting. Passing the corrected operators to any
    expectation pipeline mitigates readout errors with no further changes.
    """
    groups = split_measurement_settings(observable)
    out: dict[str, MitigatedOperator] = {}
    for setting in ("z", "x"):
        if setting not in groups and not (setting == "z" and groups["constant"]):
            continue
        original_terms: list[tuple[float, dict[int, str]]] = []
        corrected_terms: list[tuple[float, dict[int, str]]] = []
        if setting == "z" and groups["constant"]:
            original_terms.append((groups["constant"], {}))
            corrected_terms.append((groups["constant"], {}))
        if setting in groups:
            for coeff, string in groups[setting]:
                original_terms.append((coeff, dict(string)))
                for sub_coeff, sub in correct_operator(string, model):
                    corrected_terms.append((coeff * sub_coeff, dict(sub)))
        out[setting] = MitigatedOperator(original=PauliSum(original_terms),
                                         corrected=PauliSum(corrected_terms))
    return out


# An executor prepares the circuit at the given parameters, measures in the
# computational basis, and returns counts. It is the boundary behind which
# real hardware (or any other backend) can be plugged in.
Executor = Callable[[ParametricCircuit, Sequence[float], int, int], ShotCounts]


def simulated_executor(model: ReadoutNoiseModel | None) -> Executor:
    """Executor backed by the statevector simulator plus readout flips."""

    def run(circuit: ParametricCircuit, params: Sequence[float], shots: int,
            seed: int) -> ShotCounts:
        state = evaluate_circuit(circuit, params)
        counts = sample_measurements(state, shots, child_seed(seed, 0))
        if model is not None:
            counts = apply_readout_noise(counts, model, child_seed(seed, 1))
        return counts

    return run


@dataclass(frozen=True)
class CalibrationRecord:
    """Estimated flip probabilities with their binomial standard errors."""

    model: ReadoutNoiseModel
    stderr0: Mapping[int, float]
    stderr1: Mapping[int, float]
    shots: int
    run_index: int = 0

    def to_dict(self) -> dict:
        return {
            "qubits": [
                {
                    "q": q,
                    "p0": self.model.p0(q),
                    "p1": self.model.p1(q),
                    "stderr0": self.stderr0[q],
                    "stderr1": self.stderr1[q],
                }
                for q in self.model.qubits
            ],
            "shots": int(self.shots),
            "run_index": int(self.run_index),
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "CalibrationRecord":
        model = ReadoutNoiseModel.from_dict(data)
        return cls(
            model=model,
            stderr0={int(e["q"]): float(e["stderr0"]) for e in data["qubits"]},
            stderr1={int(e["q"]): float(e["stderr1"]) for e in data["qubits"]},
            shots=int(data["shots"]),
            run_index=int(data.get("run_index", 0)),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def _bit_frequency(counts: ShotCounts, qubit: int, bit: str) -> float:
    n = counts.num_qubits
    hits = sum(c for key, c in counts.counts.items()
               if key[n - 1 - qubit] == bit)
    return hits / counts.shots


def calibrate(executor: Executor, qubits: Sequence[int], shots: int,
              seed: int, run_index: int = 0) -> CalibrationRecord:
    """Estimate per-qubit flip probabilities from two preparation circuits.

    Prepares |0...0> and (via an X on every qubit) |1...1>, measures each
    with ``shots`` shots, and reads off p(q,0) as the frequency of 1s on
    qubit q in the first run and p(q,1) as the frequency of 0s in the
    second. Uncorrelated flips make these two circuits sufficient for any
    number of qubits. Standard errors are binomial: sqrt(p(1-p)/shots).
    """
    if shots <= 0:
        raise ValueError("shots must be positive")
    qubits = sorted(int(q) for q in qubits)
    n = max(qubits) + 1
    ones_gates = tuple(GateSpec("x", (q,)) for q in range(n))
    zeros = ParametricCircuit(num_qubits=n, gates=())
    ones = ParametricCircuit(num_qubits=n, gates=ones_gates)
    counts0 = executor(zeros, (), shots, child_seed(seed, 0))
    counts1 = executor(ones, (), shots, child_seed(seed, 1))

    probs: dict[int, tuple[float, float]] = {}
    stderr0: dict[int, float] = {}
    stderr1: dict[int, float] = {}
    for q in qubits:
        p0 = _bit_frequency(counts0, q, "1")
        p1 = _bit_frequency(counts1, q, "0")
        probs[q] = (p0, p1)
        stderr0[q] = float(np.sqrt(p0 * (1.0 - p0) / shots))
        stderr1[q] = float(np.sqrt(p1 * (1.0 - p1) / shots))
    return CalibrationRecord(model=ReadoutNoiseModel(probs), stderr0=stderr0,
                             stderr1=stderr1, shots=shots,
                             run_index=run_index)


def mitigated_expectation_stderr(
    counts: ShotCounts,
    observable: PauliSum,
    record: CalibrationRecord,
) -> tuple[float, float]:
    """Mitigated value plus the calibration uncertainty it inherits.

    Propagates each estimated flip probability's standard error through the
    correction by first-order finite differences (step = one standard
    error) and combines the contributions in quadrature. Shot noise of the
    counts themselves is not included.
    """
    value = mitigated_expectation(counts, observable, record.model)
    variance = 0.0
    base = {q: record.model.probabilities[q] for q in record.model.qubits}
    for q in record.model.qubits:
        for direction, err in ((0, record.stderr0[q]), (1, record.stderr1[q])):
            if err == 0.0:
                continue
            shifted = []
            for sign in (1.0, -1.0):
                probs = dict(base)
                p = list(probs[q])
                p[direction] = min(max(p[direction] + sign * err, 0.0), 0.999999)
                probs[q] = (p[0], p[1])
                shifted.append(mitigated_expectation(
                    counts, observable, ReadoutNoiseModel(probs)))
            variance += ((shifted[0] - shifted[1]) / 2.0) ** 2
    return value, float(np.sqrt(variance))


def t1_correct(noisy_z_expectation: float, p_t: float) -> float:
    """Invert single-qubit relaxation damping of a Z expectation.

    ``p_t`` is the survival probability of |1> at readout time (for
    exponential relaxation, exp(-t/T1)). The forward map is
    noisy = p_t * exact + (1 - p_t); this returns the exact value.
    """
    if not 0.0 < p_t <= 1.0:
        raise ValueError(f"p_t must lie in (0, 1], got {p_t}")
    return noisy_z_expectation / p_t - (1.0 - p_t) / p_t
