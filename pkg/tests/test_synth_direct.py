import numpy as np
import pytest

from libs.circuit_ir import GateKind
from libs.errors import ControlKeyError, NonHermitianError
from libs.operator_algebra import Symbol, Term, dense_of_term
from libs.sim_oracle import apply, basis_index, circuit_unitary, expm_hermitian, phase_distance
from libs.synth_direct import (DirectSynthesisOptions, central_rotation_count, classify, synthesize_direct,
                               trotter_error_of_split)


def exact_distance(term, options, num_qubits=None):
    width = num_qubits or max(term.max_index + 1, 1)
    circuit = synthesize_direct(term, options, width)
    return phase_distance(circuit_unitary(circuit), expm_hermitian(dense_of_term(term, width), options.theta))


class TestClassify:
    def test_flagship_families(self, flagship_term):
        partition = classify(flagship_term)
        assert dict(partition.pauli) == {3: Symbol.X, 4: Symbol.Y, 11: Symbol.Y, 12: Symbol.Z}
        assert dict(partition.number) == {0: 1, 1: 0, 2: 0, 6: 1}
        assert dict(partition.transition) == {5: 1, 7: 0, 8: 0, 9: 0, 10: 1, 13: 1, 14: 0}
        assert partition.partner_state.label() == "0111001"


class TestExactness:
    def test_random_real_terms(self, make_term, rng):
        """2〜8 量子ビットの実係数項 500 個がすべてオラクルと一致する"""
        for case in range(500):
            num_qubits = int(rng.integers(2, 9))
            term = make_term(num_qubits)
            options = DirectSynthesisOptions(float(rng.uniform(-1.0, 1.0)), ("chain", "tree")[case % 2])
            assert exact_distance(term, options) < 1e-10, term

    @pytest.mark.parametrize("topology", ["chain", "tree"])
    def test_complex_coefficients_exact_axis(self, make_term, topology):
        for num_qubits in range(1, 7):
            term = make_term(num_qubits, complex_coefficient=True)
            assert exact_distance(term, DirectSynthesisOptions(0.43, topology, "exact")) < 1e-10

    def test_single_central_rotation(self, make_term):
        term = make_term(5, complex_coefficient=True)
        circuit = synthesize_direct(term, DirectSynthesisOptions(0.2))
        assert central_rotation_count(circuit) == 1

    def test_split_mode_is_approximate(self):
        term = Term(complex(0.8, 0.6), {0: "s", 1: "n", 2: "sd"}, hermitized=True)
        split = synthesize_direct(term, DirectSynthesisOptions(0.2, complex_mode="split"))
        assert central_rotation_count(split) == 2
        small, large = trotter_error_of_split(term, 0.05), trotter_error_of_split(term, 0.2)
        assert 0.0 < small < large

    def test_split_error_scales_quadratically(self):
        """θ を半分にすると誤差は約 1/4"""
        term = Term(complex(0.8, 0.6), {0: "s", 1: "n", 2: "sd"}, hermitized=True)
        errors = [trotter_error_of_split(term, theta) for theta in (0.2, 0.1, 0.05)]
        for coarse, fine in zip(errors, errors[1:]):
            assert fine / coarse == pytest.approx(0.25, abs=0.1)

    @pytest.mark.parametrize("factors", [
        {0: "X", 2: "Y"},
        {0: "Z"},
        {0: "n", 1: "o"},
        {1: "n"},
        {0: "n", 1: "X"},
        {0: "s", 1: "Z", 2: "sd"},
    ])
    def test_one_central_gate_for_every_family(self, factors):
        circuit = synthesize_direct(Term(0.7, factors, hermitized=True), DirectSynthesisOptions(0.3))
        assert central_rotation_count(circuit) == 1

    def test_split_mode_exact_for_real_coefficient(self):
        term = Term(0.8, {0: "s", 1: "sd"}, hermitized=True)
        assert exact_distance(term, DirectSynthesisOptions(0.3, complex_mode="split")) < 1e-10

    def test_wider_register(self):
        term = Term(0.5, {1: "n", 2: "s", 3: "X"}, hermitized=True)
        assert exact_distance(term, DirectSynthesisOptions(0.7), num_qubits=5) < 1e-10


class TestStructure:
    def test_number_pair_is_single_keyed_phase(self):
        circuit = synthesize_direct(Term(1.0, {0: "n", 1: "n"}), DirectSynthesisOptions(0.3))
        assert len(circuit) == 1
        gate = circuit.gates[0]
        assert gate.kind is GateKind.KEYED_PHASE
        assert gate.targets == (1,)
        assert gate.key.bit_map == {0: 1}
        assert gate.theta == pytest.approx(-0.3)

    def test_single_number_is_phase(self):
        circuit = synthesize_direct(Term(2.0, {0: "n"}), DirectSynthesisOptions(0.25))
        assert [(g.kind, g.theta) for g in circuit.gates] == [(GateKind.PHASE, pytest.approx(-0.5))]

    def test_identity_is_global_phase(self):
        circuit = synthesize_direct(Term(1.5, {0: "I"}), DirectSynthesisOptions(0.2))
        assert [(g.kind, g.theta) for g in circuit.gates] == [(GateKind.GLOBAL_PHASE, pytest.approx(-0.3))]

    def test_pauli_only_is_rz(self):
        circuit = synthesize_direct(Term(1.0, {0: "Z"}), DirectSynthesisOptions(0.4))
        assert [(g.kind, g.theta) for g in circuit.gates] == [(GateKind.RZ, pytest.approx(0.8))]

    def test_transition_rotation_on_lowest_qubit(self):
        circuit = synthesize_direct(Term(0.5, {2: "sd", 4: "s", 1: "n"}, hermitized=True),
                                    DirectSynthesisOptions(0.1))
        central = [g for g in circuit.gates if g.kind is GateKind.KEYED_RX]
        assert len(central) == 1
        assert central[0].targets == (2,)
        assert 1 in central[0].key.qubits

    def test_bare_rejected(self):
        with pytest.raises(NonHermitianError):
            synthesize_direct(Term.bare_product(1.0, {0: "s"}))

    def test_complex_without_transition_rejected(self):
        with pytest.raises(NonHermitianError):
            synthesize_direct(Term(1j, {0: "Z"}, hermitized=True))


class TestSignControl:
    @pytest.mark.parametrize("factors", [
        {0: "s", 1: "sd", 2: "n"},
        {0: "X", 1: "n"},
        {0: "n", 1: "o"},
        {0: "Y", 1: "Z"},
        {0: "I"},
    ])
    def test_control_flips_direction(self, factors):
        hermitized = any(symbol in ("s", "sd") for symbol in factors.values())
        term = Term(0.6, factors, hermitized=hermitized)
        control = 3
        circuit = synthesize_direct(term, DirectSynthesisOptions(0.35), num_qubits=4, sign_control=control)
        dense = dense_of_term(term, 3)
        forward, backward = expm_hermitian(dense, 0.35), expm_hermitian(dense, -0.35)
        expected = np.kron(forward, np.diag([1, 0])) + np.kron(backward, np.diag([0, 1]))
        assert phase_distance(circuit_unitary(circuit), expected) < 1e-10

    def test_control_inside_support_rejected(self):
        with pytest.raises(ControlKeyError):
            synthesize_direct(Term(1.0, {0: "Z"}), sign_control=0)


class TestFlagship:
    """15 量子ビットの項を状態ベクトルで確認する"""

    @staticmethod
    def _partner(term, bits):
        """A|bits⟩ = amplitude·|partner⟩ となる基底状態を記号行列から求める"""
        factor_map = term.factor_map
        amplitude = 1 + 0j
        partner = {}
        for qubit in range(15):
            matrix = factor_map.get(qubit, Symbol.ID).matrix
            column = matrix[:, bits[qubit]]
            row = int(np.argmax(np.abs(column)))
            amplitude *= column[row]
            partner[qubit] = row
        return amplitude, partner

    @pytest.mark.parametrize("topology", ["chain", "tree"])
    def test_key_pair_rotates(self, flagship_term, topology):
        theta = 0.2
        circuit = synthesize_direct(flagship_term, DirectSynthesisOptions(theta, topology))
        bits = {q: 0 for q in range(15)}
        bits.update({0: 1, 1: 0, 2: 0, 6: 1})
        bits.update(dict(zip((5, 7, 8, 9, 10, 13, 14), (0, 1, 1, 1, 0, 0, 1))))
        amplitude, partner = self._partner(flagship_term, bits)
        coupling = flagship_term.coefficient * amplitude
        block = np.array([[0, np.conj(coupling)], [coupling, 0]])
        expected = expm_hermitian(block, theta)[:, 0]

        psi = np.zeros(2 ** 15, dtype=complex)
        source, target = basis_index(bits, 15), basis_index(partner, 15)
        psi[source] = 1.0
        out = apply(circuit, psi)
        assert abs(out[source] - expected[0]) < 1e-10
        assert abs(out[target] - expected[1]) < 1e-10
        assert abs(abs(out[source]) - np.cos(theta * abs(coupling))) < 1e-10
        assert np.linalg.norm(out) ** 2 - abs(out[source]) ** 2 - abs(out[target]) ** 2 < 1e-10

    def test_off_key_states_fixed(self, flagship_term, rng):
        circuit = synthesize_direct(flagship_term, DirectSynthesisOptions(0.2, "tree"))
        side = (1, 0, 0, 0, 1, 1, 0)
        partner = tuple(1 - b for b in side)
        checked = 0
        while checked < 64:
            bits = dict(enumerate(int(b) for b in rng.integers(0, 2, size=15)))
            numbers_match = (bits[0], bits[1], bits[2], bits[6]) == (1, 0, 0, 1)
            transitions = tuple(bits[q] for q in (5, 7, 8, 9, 10, 13, 14))
            if numbers_match and transitions in (side, partner):
                continue
            psi = np.zeros(2 ** 15, dtype=complex)
            psi[basis_index(bits, 15)] = 1.0
            assert np.max(np.abs(apply(circuit, psi) - psi)) < 1e-12
            checked += 1
