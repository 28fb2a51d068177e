"""Pauli-string observables.

A Pauli string is a mapping from qubit index to one of 'X', 'Y', 'Z';
qubits not present act as the identity. A :class:`PauliSum` is a
real-weighted list of such strings and is the Hamiltonian/observable
representation used everywhere in this package.
"""

from __future__ import annotations

import math
from typing import Iterable, Mapping, Tuple

import numpy as np

PAULI_MATRICES = {
    "X": np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
    "Y": np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex),
    "Z": np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
}

_Key = Tuple[Tuple[int, str], ...]


def _canonical_key(string: Mapping[int, str]) -> _Key:
    items = []
    for q, p in dict(string).items():
        q = int(q)
        if q < 0:
            raise ValueError("qubit indices must be non-negative")
        if p not in PAULI_MATRICES:
            raise ValueError(f"unknown Pauli letter {p!r}")
        items.append((q, p))
    if len({q for q, _ in items}) != len(items):
        raise ValueError("repeated qubit in Pauli string")
    return tuple(sorted(items))


class PauliSum:
    """Real-weighted sum of Pauli strings with unique strings.

    Duplicate strings passed to the constructor are merged by summing their
    coefficients (a periodic two-site chain, for example, visits the same
    bond twice). Term order is the first-seen order, which keeps every
    downstream computation deterministic.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Iterable[tuple[float, Mapping[int, str]]]):
        merged: dict[_Key, float] = {}
        for coeff, string in terms:
            coeff = float(coeff)
            if not math.isfinite(coeff):
                raise ValueError("coefficients must be finite")
            key = _canonical_key(string)
            merged[key] = merged.get(key, 0.0) + coeff
        self._terms = tuple((c, dict(k)) for k, c in merged.items())

    @property
    def terms(self) -> tuple[tuple[float, dict[int, str]], ...]:
        return self._terms

    def __len__(self) -> int:
        return len(self._terms)

    def __iter__(self):
        return iter(self._terms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PauliSum):
            return NotImplemented
        mine = {_canonical_key(s): c for c, s in self._terms}
        theirs = {_canonical_key(s): c for c, s in other._terms}
        return mine == theirs

    def __repr__(self) -> str:
        return f"PauliSum({len(self._terms)} terms, {self.min_qubits()} qubits)"

    def min_qubits(self) -> int:
        """Smallest register size that can host every term."""
        qubits = [q for _, s in self._terms for q in s]
        return max(qubits) + 1 if qubits else 0

    def support(self) -> frozenset[int]:
        return frozenset(q for _, s in self._terms for q in s)

    def is_diagonal(self) -> bool:
        """True when every letter is Z (identity terms allowed)."""
        return all(p == "Z" for _, s in self._terms for p in s.values())

    def to_matrix(self, num_qubits: int | None = None) -> np.ndarray:
        """Dense matrix in the little-endian computational basis."""
        n = self.min_qubits() if num_qubits is None else int(num_qubits)
        if n < self.min_qubits():
            raise ValueError("num_qubits too small for the operator support")
        dim = 2**n
        out = np.zeros((dim, dim), dtype=complex)
        eye = np.eye(2, dtype=complex)
        for coeff, string in self._terms:
            op = np.array([[1.0 + 0.0j]])
            for q in reversed(range(n)):  # qubit 0 is the last kron factor
                op = np.kron(op, PAULI_MATRICES[string[q]] if q in string else eye)
            out += coeff * op
        return out

    def to_dict(self) -> dict:
        return {
            "terms": [
                {"coefficient": c, "paulis": {str(q): p for q, p in sorted(s.items())}}
                for c, s in self._terms
            ]
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "PauliSum":
        try:
            raw = data["terms"]
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed observable data: {exc}") from None
        terms = []
        for entry in raw:
            terms.append((
                float(entry["coefficient"]),
                {int(q): p for q, p in entry["paulis"].items()},
            ))
        return cls(terms)


def z_value(bitstring: str, qubits: Iterable[int]) -> int:
    """Eigenvalue of a Z string at a measured bitstring (+1 or -1).

    ``bitstring`` is written most-significant qubit first, so qubit q sits
    at position ``len(bitstring) - 1 - q``.
    """
    n = len(bitstring)
    sign = 1
    for q in qubits:
        if q >= n:
            raise ValueError(f"qubit {q} outside bitstring of width {n}")
        if bitstring[n - 1 - q] == "1":
            sign = -sign
    return sign


def diagonal_profile(observable: PauliSum, num_qubits: int) -> np.ndarray:
    """Vector of observable values over all basis states.

    Requires a diagonal (Z/identity) observable; entry ``i`` is the value
    the estimator assigns to basis outcome ``i``.
    """
    if not observable.is_diagonal():
        raise ValueError("observable must contain only Z letters")
    idx = np.arange(2**num_qubits)
    out = np.zeros(2**num_qubits)
    for coeff, string in observable:
        signs = np.ones(2**num_qubits)
        for q in string:
            if q >= num_qubits:
                raise ValueError(f"qubit {q} outside register of {num_qubits}")
            signs *= 1.0 - 2.0 * ((idx >> q) & 1)
        out += coeff * signs
    return out


def split_measurement_settings(observable: PauliSum) -> dict:
    """Group terms into the two settings we can measure: Z basis and the
    global X basis (every qubit Hadamard-rotated before readout).

    Returns ``{"constant": c, "z": PauliSum, "x": PauliSum}`` where the "x"
    entry holds the X strings rewritten as Z strings on the same supports,
    as they appear after the basis rotation. Empty settings are omitted.
    Mixed or Y-containing terms are unsupported.
    """
    constant = 0.0
    z_terms: list[tuple[float, dict[int, str]]] = []
    x_terms: list[tuple[float, dict[int, str]]] = []
    for coeff, string in observable:
        letters = set(string.values())
        if not string:
            constant += coeff
        elif letters == {"Z"}:
            z_terms.append((coeff, dict(string)))
        elif letters == {"X"}:
            x_terms.append((coeff, {q: "Z" for q in string}))
        else:
            raise ValueError(
                "only pure Z strings and pure X strings are supported, got "
                f"{string}"
            )
    out: dict = {"constant": constant}
    if z_terms:
        out["z"] = PauliSum(z_terms)
    if x_terms:
        out["x"] = PauliSum(x_terms)
    return out
