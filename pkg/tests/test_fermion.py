import numpy as np
import pytest

from libs.errors import ParseError, TermStructureError
from libs.fermion import (FermionKind, FermionTerm, block_parity_split, fermion_expression, fswap,
                          jordan_wigner, jw_dense, one_body_term, pair_gate_B, pair_terms,
                          parse_fermion_terms, sign_controlled_evolution, two_body_term)
from libs.operator_algebra import HamiltonianExpr, Symbol, Term, dense_of_expr, dense_of_term
from libs.sim_oracle import circuit_unitary, expm_hermitian, phase_distance
from libs.synth_direct import DirectSynthesisOptions, synthesize_direct
from libs.synth_usual import Strategy, TrotterPlan, trotter_product


def hermitian_pair(operator, h):
    return h / 2 * (operator + operator.conj().T)


class TestJordanWigner:
    @pytest.mark.parametrize("mode", range(4))
    def test_symbolic_matches_dense(self, mode):
        assert np.allclose(dense_of_term(jordan_wigner(mode, 4), 4), jw_dense(mode, 4))

    def test_anticommutation(self):
        n = 3
        eye = np.eye(2 ** n)
        for i in range(n):
            for j in range(n):
                a_i, a_j_dag = jw_dense(i, n), jw_dense(j, n, creation=True)
                assert np.allclose(a_i @ a_j_dag + a_j_dag @ a_i, eye if i == j else 0 * eye)
                assert np.allclose(a_i @ jw_dense(j, n) + jw_dense(j, n) @ a_i, 0 * eye)

    def test_mode_range(self):
        with pytest.raises(TermStructureError):
            jordan_wigner(3, 3)


class TestBodyTerms:
    @pytest.mark.parametrize("i, j", [(0, 1), (0, 3), (3, 1), (2, 0)])
    def test_one_body(self, i, j):
        n = max(i, j) + 1
        expected = hermitian_pair(jw_dense(i, n, creation=True) @ jw_dense(j, n), 0.8)
        assert np.allclose(dense_of_term(one_body_term(i, j, 0.8), n), expected)

    def test_one_body_z_string(self):
        term = one_body_term(0, 3, 2.0)
        assert term.coefficient == pytest.approx(1.0)
        assert term.factor_map == {0: Symbol.RAISE, 1: Symbol.Z, 2: Symbol.Z, 3: Symbol.LOWER}
        assert one_body_term(0, 1, 2.0).factor_map == {0: Symbol.RAISE, 1: Symbol.LOWER}

    def test_one_body_needs_distinct_modes(self):
        with pytest.raises(TermStructureError):
            one_body_term(1, 1, 1.0)

    @pytest.mark.parametrize("modes", [(0, 1, 2, 3), (3, 1, 0, 2), (1, 4, 3, 0)])
    def test_two_body(self, modes):
        i, j, k, l = modes
        n = max(modes) + 1
        operator = (jw_dense(i, n, creation=True) @ jw_dense(j, n, creation=True)
                    @ jw_dense(k, n) @ jw_dense(l, n))
        assert np.allclose(dense_of_term(two_body_term(i, j, k, l, -0.6), n), hermitian_pair(operator, -0.6))

    def test_two_body_couples_one_state_pair(self):
        dense = dense_of_term(two_body_term(0, 1, 2, 3, 2.0), 4)
        assert np.count_nonzero(np.abs(dense) > 1e-12) == 2
        assert abs(dense[0b1100, 0b0011]) == pytest.approx(1.0)

    @pytest.mark.parametrize("make", [
        lambda: one_body_term(0, 3, 0.7),
        lambda: one_body_term(1, 4, -1.3),
        lambda: two_body_term(0, 2, 1, 3, 0.9),
        lambda: two_body_term(4, 1, 0, 5, -0.4),
    ])
    def test_direct_evolution_is_exact(self, make):
        term = make()
        width = term.max_index + 1
        circuit = synthesize_direct(term, DirectSynthesisOptions(0.6), width)
        exact = expm_hermitian(dense_of_term(term, width), 0.6)
        assert phase_distance(circuit_unitary(circuit), exact) < 1e-10

    def test_a1_exponential_entries(self):
        """e^{itÂ₁}: 結合した 2 状態に cos t と i sin t"""
        t = 0.37
        a1 = Term(1.0, [(0, Symbol.RAISE), (1, Symbol.LOWER)], hermitized=True)
        u = circuit_unitary(synthesize_direct(a1, DirectSynthesisOptions(-t)))
        u = u / u[0, 0]
        assert abs(u[0b10, 0b10] - np.cos(t)) < 1e-12
        assert abs(u[0b10, 0b01] - 1j * np.sin(t)) < 1e-12
        assert abs(u[0b11, 0b11] - 1.0) < 1e-12

    def test_two_body_index_clash(self):
        with pytest.raises(TermStructureError):
            two_body_term(0, 1, 1, 2, 1.0)

    def test_single_term_usual_strategy_is_exact(self):
        expr = HamiltonianExpr(3, (one_body_term(0, 2, 0.9),))
        circuit = trotter_product(expr, TrotterPlan(1, 1, 0.4), Strategy.USUAL)
        exact = expm_hermitian(dense_of_expr(expr), 0.4)
        assert phase_distance(circuit_unitary(circuit), exact) < 1e-10


class TestPairGate:
    @pytest.mark.parametrize("alpha, beta", [(1.0, 2.0), (0.3, 0.0), (0.0, -0.7)])
    def test_matches_exponential(self, alpha, beta):
        t = 0.45
        dense = sum((dense_of_term(term, 2) for term in pair_terms(0, 1, alpha, beta)), np.zeros((4, 4)))
        circuit = pair_gate_B(alpha, beta, t)
        assert phase_distance(circuit_unitary(circuit), expm_hermitian(dense, t)) < 1e-10

    def test_zero_couplings_are_identity(self):
        assert np.allclose(circuit_unitary(pair_gate_B(0.0, 0.0, 0.8)), np.eye(4))

    def test_alpha_only_matches_direct_synthesis(self):
        a1 = Term(1.0, [(0, Symbol.RAISE), (1, Symbol.LOWER)], hermitized=True)
        direct = synthesize_direct(a1, DirectSynthesisOptions(0.3 * 0.45))
        assert phase_distance(circuit_unitary(pair_gate_B(0.3, 0.0, 0.45)), circuit_unitary(direct)) < 1e-10

    def test_uses_two_cx(self):
        kinds = [g.kind.value for g in pair_gate_B(1.0, 1.0, 0.1).gates]
        assert kinds.count("CX") == 2

    def test_same_qubit_rejected(self):
        with pytest.raises(TermStructureError):
            pair_gate_B(1.0, 1.0, 0.1, (1, 1))


class TestSignControl:
    def test_flips_direction(self):
        term = one_body_term(0, 2, 1.2)
        circuit = sign_controlled_evolution(term, 0.3, control=3, num_qubits=4)
        dense = dense_of_term(term, 3)
        expected = (np.kron(expm_hermitian(dense, 0.3), np.diag([1, 0]))
                    + np.kron(expm_hermitian(dense, -0.3), np.diag([0, 1])))
        assert phase_distance(circuit_unitary(circuit), expected) < 1e-10


class TestFswap:
    def test_decomposed_equals_native(self):
        assert np.allclose(circuit_unitary(fswap(0, 1)), circuit_unitary(fswap(0, 1, decompose=False)))

    def test_involution_and_sign(self):
        u = circuit_unitary(fswap(0, 1))
        assert np.allclose(u @ u, np.eye(4))
        assert u[0b11, 0b11] == pytest.approx(-1.0)

    def test_exchanges_modes(self):
        u = circuit_unitary(fswap(0, 1))
        assert np.allclose(u @ jw_dense(0, 2) @ u.conj().T, jw_dense(1, 2))

    def test_same_qubit_rejected(self):
        with pytest.raises(TermStructureError):
            fswap(2, 2)


class TestBlockParity:
    @pytest.mark.parametrize("num_middle", range(4))
    def test_signs_follow_middle_parity(self, num_middle):
        signs = block_parity_split(num_middle)
        assert signs == {m: (-1) ** bin(m).count("1") for m in range(2 ** num_middle)}


class TestFermionFile:
    TEXT = "# sample\nmodes 4\n1B 0 1 0.5\n2B 0 1 2 3 0.25\nB 0 1 1.0 2.0\n"

    def test_parse(self):
        terms, num_modes = parse_fermion_terms(self.TEXT)
        assert num_modes == 4
        assert [t.kind for t in terms] == [FermionKind.ONE_BODY, FermionKind.TWO_BODY, FermionKind.PAIR]
        assert terms[2] == FermionTerm("B", (0, 1), 1.0, 2.0)

    def test_expression_width(self):
        terms, num_modes = parse_fermion_terms(self.TEXT)
        assert fermion_expression(terms, num_modes).num_qubits == 4
        assert fermion_expression(terms[:1]).num_qubits == 2
        with pytest.raises(TermStructureError):
            fermion_expression(terms, 3)

    @pytest.mark.parametrize("text, line", [
        ("modes 2\n1B 0 x 0.5\n", 2),
        ("modes 2\n\n1B 0 0 0.5\n", 3),
        ("3B 0 1\n", 1),
    ])
    def test_errors_carry_line(self, text, line):
        with pytest.raises(ParseError) as info:
            parse_fermion_terms(text)
        assert info.value.line == line
