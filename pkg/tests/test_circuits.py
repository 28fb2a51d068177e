import json

import pytest

from vqetools import (
    GateSpec,
    ParametricCircuit,
    circuit_from_dict,
    circuit_to_dict,
    load_circuit,
    save_circuit,
    single_qubit_euler_circuit,
)


class TestGateSpec:
    def test_unknown_gate(self):
        with pytest.raises(ValueError, match="unknown gate"):
            GateSpec("toffoli", (0, 1, 2))

    def test_wrong_arity(self):
        with pytest.raises(ValueError, match="takes 2 qubit"):
            GateSpec("cnot", (0,))
        with pytest.raises(ValueError, match="takes 1 qubit"):
            GateSpec("rx", (0, 1), param="a")

    def test_repeated_qubits(self):
        with pytest.raises(ValueError, match="repeated qubits"):
            GateSpec("cnot", (1, 1))

    def test_rotation_needs_param_or_value(self):
        with pytest.raises(ValueError, match="exactly one of"):
            GateSpec("rx", (0,))
        with pytest.raises(ValueError, match="exactly one of"):
            GateSpec("rx", (0,), param="a", value=1.0)

    def test_fixed_gate_takes_nothing(self):
        with pytest.raises(ValueError, match="takes no parameter"):
            GateSpec("h", (0,), param="a")

    def test_fixed_angle_rotation(self):
        g = GateSpec("rz", (0,), value=1.5)
        assert not g.is_parametric
        assert g.value == 1.5


class TestParametricCircuit:
    def test_qubit_out_of_range(self):
        with pytest.raises(ValueError, match="exceeds"):
            ParametricCircuit(1, (GateSpec("rx", (1,), param="a"),), ("a",))

    def test_unused_parameter(self):
        with pytest.raises(ValueError, match="not used"):
            ParametricCircuit(1, (GateSpec("rx", (0,), param="a"),), ("a", "b"))

    def test_missing_parameter(self):
        with pytest.raises(ValueError, match="missing from order"):
            ParametricCircuit(1, (GateSpec("rx", (0,), param="a"),), ())

    def test_duplicate_parameter_order(self):
        with pytest.raises(ValueError, match="duplicate"):
            ParametricCircuit(
                1,
                (GateSpec("rx", (0,), param="a"), GateSpec("ry", (0,), param="a")),
                ("a", "a"),
            )

    def test_occurrences_shared_parameter(self):
        circuit = ParametricCircuit(
            2,
            (
                GateSpec("rx", (0,), param="a"),
                GateSpec("cnot", (0, 1)),
                GateSpec("ry", (1,), param="a"),
            ),
            ("a",),
        )
        assert circuit.occurrences(0) == (0, 2)

    def test_extended_prepends(self):
        base = single_qubit_euler_circuit()
        ext = base.extended([GateSpec("rz", (0,), param="phi")], ["phi"])
        assert ext.parameters == ("phi", "t1", "t2", "t3")
        assert ext.gates[0].param == "phi"
        with pytest.raises(ValueError, match="already taken"):
            base.extended([GateSpec("rz", (0,), param="t1")], ["t1"])


class TestJson:
    def test_round_trip(self, tmp_path):
        circuit = ParametricCircuit(
            3,
            (
                GateSpec("ry", (0,), param="t1"),
                GateSpec("cnot", (0, 1)),
                GateSpec("rz", (2,), value=1.5707963267948966),
                GateSpec("crx", (1, 2), param="t2"),
            ),
            ("t1", "t2"),
        )
        path = tmp_path / "circ.json"
        save_circuit(circuit, path)
        assert load_circuit(path) == circuit

    def test_schema_fields(self):
        data = circuit_to_dict(single_qubit_euler_circuit())
        assert data["num_qubits"] == 1
        assert data["parameter_order"] == ["t1", "t2", "t3"]
        assert data["gates"][0] == {"gate": "rx", "qubits": [0], "param": "t1"}
        assert data["qubit_ordering"] == "little-endian"

    def test_unknown_gate_is_hard_error(self):
        data = {
            "num_qubits": 1,
            "gates": [{"gate": "sdg", "qubits": [0]}],
            "parameter_order": [],
        }
        with pytest.raises(ValueError, match="unknown gate name"):
            circuit_from_dict(data)

    def test_parses_spec_style_document(self):
        text = json.dumps({
            "num_qubits": 3,
            "gates": [
                {"gate": "ry", "qubits": [0], "param": "t1"},
                {"gate": "cnot", "qubits": [0, 1]},
                {"gate": "rz", "qubits": [2], "value": 1.5707963267948966},
            ],
            "parameter_order": ["t1"],
        })
        circuit = circuit_from_dict(json.loads(text))
        assert circuit.num_qubits == 3
        assert circuit.gates[2].value == pytest.approx(1.5707963267948966)

    def test_malformed_data(self):
        with pytest.raises(ValueError, match="malformed"):
            circuit_from_dict({"gates": []})
