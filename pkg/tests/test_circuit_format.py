import json

from libs.circuit_format import (build_json_report, dumps, format_float, gate_line, pauli_coefficient_text,
                                 render_comparison, render_counts, render_lcu, render_listing, render_mutation,
                                 render_pauli, render_verification)
from libs.circuit_ir import Circuit, GateKind, count, cx, global_phase, h, keyed_gate, x
from libs.operator_algebra import PauliString, Symbol


class TestGateLine:
    def test_keyed_phase(self):
        gate = keyed_gate(GateKind.KEYED_PHASE, 1, {0: 1}, -0.3)
        assert gate_line(gate) == "KeyedPhase targets=[1] key={0:1} theta=-0.29999999999999999"

    def test_plain_gates(self):
        assert gate_line(cx(0, 2)) == "CX targets=[0,2]"
        assert gate_line(global_phase(0.5)) == "GlobalPhase theta=0.5"

    def test_key_sorted_by_qubit(self):
        gate = keyed_gate(GateKind.KEYED_X, 0, {3: 0, 1: 1})
        assert gate_line(gate) == "KeyedX targets=[0] key={1:1,3:0}"

    def test_float_digits(self):
        assert format_float(0.1) == "0.10000000000000001"
        assert format_float(1e-10) == "1.0000000000000000e-10"


class TestListing:
    def test_header_and_lines(self):
        text = render_listing(Circuit(2, [h(0), cx(0, 1)]))
        assert text == "# qubits=2 gates=2\nH targets=[0]\nCX targets=[0,1]\n"

    def test_ancillas_in_header(self):
        assert render_listing(Circuit(3, [], (2,))).splitlines()[0] == "# qubits=3 gates=0 ancillas=2"

    def test_counts(self):
        text = render_counts(count(Circuit(2, [h(0), cx(0, 1), x(1)])))
        assert "total_gates: 3\n" in text
        assert "two_qubit_count: 1\n" in text
        assert "gate CX: 1\n" in text


class TestVerification:
    def test_pass_line(self):
        assert render_verification(0.0, 1e-10) == "phase_distance: 0 < 1.0000000000000000e-10: PASS\n"

    def test_fail_line(self):
        assert render_verification(0.5, 0.25) == "phase_distance: 0.5 >= 0.25: FAIL\n"

    def test_mutation_detected(self):
        text = render_mutation("drop gate 0", 0.5, 1e-10)
        assert text.startswith("mutation: drop gate 0\n")
        assert text.endswith("mutation_detected: yes\n")


class TestReports:
    def test_pauli(self):
        strings = [PauliString(0.5, ((0, Symbol.Z),)), PauliString(0.5 - 0.25j, ((1, Symbol.X),))]
        assert render_pauli(strings, 2) == "0.5 * ZI\n(0.5-0.25i) * IX\n"
        assert pauli_coefficient_text(-2) == "-2"

    def test_lcu(self):
        text = render_lcu([(1.0, Circuit(1, [x(0)])), (-0.5, Circuit(1))], 1.5, 0.0)
        assert text.splitlines() == [
            "# pairs=2 one_norm=1.5 reconstruction_error=0",
            "pair 0 coefficient=1",
            "  X targets=[0]",
            "pair 1 coefficient=-0.5",
        ]

    def test_lcu_without_error(self):
        assert render_lcu([], 0.0).splitlines() == ["# pairs=0 one_norm=0"]

    def test_comparison(self):
        rows = [{"order": 8, "direct": 632, "usual": 1538, "direct_wins": True}]
        text = render_comparison(rows, 2)
        assert text == "order 8: direct=632 usual=1538 direct_wins\ncrossover: 2\n"

    def test_json_report(self):
        counts = count(Circuit(2, [h(0), cx(0, 1)]))
        report = build_json_report(counts, {"distance": 1e-15, "tolerance": 1e-10}, command="synth")
        decoded = json.loads(dumps(report))
        assert decoded["verification"] == {"distance": 1e-15, "tolerance": 1e-10, "pass": True}
        assert decoded["depth"] == 2
        assert decoded["counts"]["two_qubit_count"] == 1
        assert decoded["command"] == "synth"

    def test_json_report_without_verification(self):
        report = build_json_report(count(Circuit(1)))
        assert "verification" not in report
        assert report["rotations"] == 0
