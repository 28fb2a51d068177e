"""Parametric quantum circuits: gate specs, validation, and JSON round trip.

Conventions used throughout the package:

* Qubit ordering is little-endian: qubit 0 is the least significant bit of
  the basis-state index, so bitstrings print as ``q(n-1) ... q1 q0``.
* Rotations implement ``exp(-i * angle * P / 2)`` for ``P`` in {X, Y, Z};
  controlled rotations act as the identity when the control is |0>.
* Parameters are referenced by name inside gates; ``parameter_order`` fixes
  the index each name gets (0-based in this API).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

ROTATION_GATES = frozenset({"rx", "ry", "rz"})
CONTROLLED_ROTATION_GATES = frozenset({"crx", "cry", "crz"})
PARAMETRIC_GATES = ROTATION_GATES | CONTROLLED_ROTATION_GATES
FIXED_GATES = frozenset({"cnot", "h", "x", "z"})
KNOWN_GATES = PARAMETRIC_GATES | FIXED_GATES

_GATE_ARITY = {
    "rx": 1, "ry": 1, "rz": 1, "h": 1, "x": 1, "z": 1,
    "crx": 2, "cry": 2, "crz": 2, "cnot": 2,
}


@dataclass(frozen=True)
class GateSpec:
    """One gate in a circuit.

    ``qubits`` lists (control, target) for two-qubit gates. Rotation gates
    carry either a parameter name in ``param`` or a fixed angle in ``value``,
    never both; fixed gates carry neither.
    """

    gate: str
    qubits: tuple[int, ...]
    param: str | None = None
    value: float | None = None

    def __post_init__(self):
        if self.gate not in KNOWN_GATES:
            raise ValueError(f"unknown gate {self.gate!r}")
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        if len(self.qubits) != _GATE_ARITY[self.gate]:
            raise ValueError(
                f"gate {self.gate!r} takes {_GATE_ARITY[self.gate]} qubit(s), "
                f"got {self.qubits}"
            )
        if len(set(self.qubits)) != len(self.qubits):
            raise ValueError(f"gate {self.gate!r} has repeated qubits {self.qubits}")
        if any(q < 0 for q in self.qubits):
            raise ValueError("qubit indices must be non-negative")
        if self.gate in PARAMETRIC_GATES:
            if (self.param is None) == (self.value is None):
                raise ValueError(
                    f"rotation gate {self.gate!r} needs exactly one of "
                    "param or value"
                )
            if self.value is not None:
                object.__setattr__(self, "value", float(self.value))
        elif self.param is not None or self.value is not None:
            raise ValueError(f"gate {self.gate!r} takes no parameter or angle")

    @property
    def is_parametric(self) -> bool:
        return self.param is not None


@dataclass(frozen=True)
class ParametricCircuit:
    """An ordered gate list over ``num_qubits`` qubits with named parameters.

    ``parameters`` defines the parameter indexing used by evaluation,
    tangent vectors and classification. A name may appear in several gates;
    all its occurrences share one angle.
    """

    num_qubits: int
    gates: tuple[GateSpec, ...]
    parameters: tuple[str, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "num_qubits", int(self.num_qubits))
        object.__setattr__(self, "gates", tuple(self.gates))
        object.__setattr__(self, "parameters", tuple(self.parameters))
        if self.num_qubits < 1:
            raise ValueError("num_qubits must be positive")
        used: list[str] = []
        for g in self.gates:
            if any(q >= self.num_qubits for q in g.qubits):
                raise ValueError(
                    f"gate {g.gate!r} on {g.qubits} exceeds {self.num_qubits} qubits"
                )
            if g.param is not None:
                used.append(g.param)
        if len(set(self.parameters)) != len(self.parameters):
            raise ValueError("duplicate names in parameter order")
        missing = set(used) - set(self.parameters)
        if missing:
            raise ValueError(f"gate parameters missing from order: {sorted(missing)}")
        unused = set(self.parameters) - set(used)
        if unused:
            raise ValueError(f"parameters not used by any gate: {sorted(unused)}")

    @property
    def num_parameters(self) -> int:
        return len(self.parameters)

    def parameter_index(self, name: str) -> int:
        try:
            return self.parameters.index(name)
        except ValueError:
            raise ValueError(f"unknown parameter {name!r}") from None

    def occurrences(self, index: int) -> tuple[int, ...]:
        """Gate positions where parameter ``index`` occurs."""
        name = self.parameters[index]
        return tuple(i for i, g in enumerate(self.gates) if g.param == name)

    def extended(self, prefix_gates: Sequence[GateSpec],
                 prefix_params: Sequence[str]) -> "ParametricCircuit":
        """New circuit with ``prefix_gates`` applied first and their fresh
        parameter names prepended to the parameter order."""
        clash = set(prefix_params) & set(self.parameters)
        if clash:
            raise ValueError(f"prefix parameter names already taken: {sorted(clash)}")
        return ParametricCircuit(
            num_qubits=self.num_qubits,
            gates=tuple(prefix_gates) + self.gates,
            parameters=tuple(prefix_params) + self.parameters,
        )


def circuit_to_dict(circuit: ParametricCircuit) -> dict:
    """JSON-ready dict. Little-endian qubit ordering is stated explicitly."""
    gates = []
    for g in circuit.gates:
        entry: dict = {"gate": g.gate, "qubits": list(g.qubits)}
        if g.param is not None:
            entry["param"] = g.param
        if g.value is not None:
            entry["value"] = g.value
        gates.append(entry)
    return {
        "num_qubits": circuit.num_qubits,
        "gates": gates,
        "parameter_order": list(circuit.parameters),
        "qubit_ordering": "little-endian",
    }


def circuit_from_dict(data: Mapping) -> ParametricCircuit:
    """Parse the circuit JSON schema. Unknown gate names are a hard error."""
    try:
        num_qubits = int(data["num_qubits"])
        raw_gates = data["gates"]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed circuit data: {exc}") from None
    gates = []
    for entry in raw_gates:
        name = entry.get("gate")
        if name not in KNOWN_GATES:
            raise ValueError(f"unknown gate name {name!r}")
        gates.append(GateSpec(
            gate=name,
            qubits=tuple(entry["qubits"]),
            param=entry.get("param"),
            value=entry.get("value"),
        ))
    order = data.get("parameter_order")
    if order is None:
        # preserve first-occurrence order when the field is omitted
        seen: list[str] = []
        for g in gates:
            if g.param is not None and g.param not in seen:
                seen.append(g.param)
        order = seen
    return ParametricCircuit(num_qubits=num_qubits, gates=tuple(gates),
                             parameters=tuple(order))


def save_circuit(circuit: ParametricCircuit, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(circuit_to_dict(circuit), fh, indent=2)
        fh.write("\n")


def load_circuit(path) -> ParametricCircuit:
    with open(path, encoding="utf-8") as fh:
        return circuit_from_dict(json.load(fh))


def single_qubit_euler_circuit(names: Iterable[str] = ("t1", "t2", "t3"),
                               qubit: int = 0,
                               num_qubits: int = 1) -> ParametricCircuit:
    """X-Z-Y Euler chain on one qubit: rx, rz, ry applied in that order.

    Three parameters suffice to reach every single-qubit state including its
    global phase, which makes this the base case of the inductive ansatz.
    """
    n1, n2, n3 = tuple(names)
    return ParametricCircuit(
        num_qubits=num_qubits,
        gates=(
            GateSpec("rx", (qubit,), param=n1),
            GateSpec("rz", (qubit,), param=n2),
            GateSpec("ry", (qubit,), param=n3),
        ),
        parameters=(n1, n2, n3),
    )
