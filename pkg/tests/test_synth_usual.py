import itertools

import numpy as np
import pytest

from libs.circuit_ir import GateKind
from libs.errors import TermStructureError
from libs.operator_algebra import (HamiltonianExpr, PauliString, Symbol, Term, dense_of_expr, dense_of_pauli,
                                   dense_of_term)
from libs.sim_oracle import circuit_unitary, expm_hermitian, phase_distance
from libs.synth_direct import DirectSynthesisOptions
from libs.synth_usual import (Strategy, TrotterPlan, synthesize_pauli_rotation, synthesize_pauli_term,
                              trotter_fragments, trotter_product)


def trotter_distance(expr, plan, strategy=Strategy.DIRECT):
    circuit = trotter_product(expr, plan, strategy)
    return phase_distance(circuit_unitary(circuit), expm_hermitian(dense_of_expr(expr), plan.time))


class TestPauliRotation:
    def test_single_z(self):
        circuit = synthesize_pauli_rotation([(0, Symbol.Z)], 0.3)
        assert [(g.kind, g.theta) for g in circuit.gates] == [(GateKind.RZ, pytest.approx(0.6))]

    @pytest.mark.parametrize("topology", ["chain", "tree"])
    def test_mixed_string_matches_oracle(self, topology):
        letters = ((0, Symbol.X), (2, Symbol.Y), (3, Symbol.Z), (4, Symbol.Y))
        circuit = synthesize_pauli_rotation(letters, 0.41, 5, topology)
        exact = expm_hermitian(dense_of_pauli(PauliString(1.0, letters), 5), 0.41)
        assert phase_distance(circuit_unitary(circuit), exact) < 1e-10

    def test_identity_string_rejected(self):
        with pytest.raises(TermStructureError):
            synthesize_pauli_rotation([], 0.1)

    def test_identity_term_is_global_phase(self):
        circuit = synthesize_pauli_term(PauliString(0.5, ()), 0.2, 2)
        assert [(g.kind, g.theta) for g in circuit.gates] == [(GateKind.GLOBAL_PHASE, pytest.approx(-0.1))]


class TestTrotter:
    def test_plan_validation(self):
        with pytest.raises(TermStructureError):
            TrotterPlan(order=3)
        with pytest.raises(TermStructureError):
            TrotterPlan(steps=0)

    def test_single_term_is_exact_for_both_strategies(self):
        expr = HamiltonianExpr(4, (Term(0.5, {0: "n", 1: "s", 2: "sd", 3: "X"}, hermitized=True),))
        plan = TrotterPlan(1, 1, 0.37)
        assert trotter_distance(expr, plan, Strategy.DIRECT) < 1e-10
        assert trotter_distance(expr, plan, Strategy.USUAL) < 1e-10

    def test_commuting_terms_are_exact(self):
        expr = HamiltonianExpr(3, (Term(0.7, {0: "Z", 1: "Z"}), Term(-0.2, {1: "n", 2: "n"}), Term(1.1, {0: "o"})))
        assert trotter_distance(expr, TrotterPlan(1, 1, 0.9)) < 1e-10

    def test_error_scaling(self):
        """1 次は 1/r, 2 次は 1/r² で誤差が減る"""
        expr = HamiltonianExpr(2, (Term(1.0, {0: "X"}), Term(0.7, {0: "Z", 1: "Z"}),
                                   Term(0.5, {0: "s", 1: "sd"}, hermitized=True)))
        first = [trotter_distance(expr, TrotterPlan(1, steps, 0.5)) for steps in (4, 8)]
        second = [trotter_distance(expr, TrotterPlan(2, steps, 0.5)) for steps in (4, 8)]
        assert 0.4 < first[1] / first[0] < 0.6
        assert 0.2 < second[1] / second[0] < 0.3
        assert second[0] < first[0]

    def test_first_order_scaling_on_random_expressions(self, make_term):
        """‖H‖t = 1/2 のランダムな 3 量子ビット非可換式で誤差比 err(2p)/err(p) ≈ 1/2"""
        checked = 0
        for _ in range(50):
            terms = tuple(make_term(3) for _ in range(3))
            parts = [dense_of_term(term, 3) for term in terms]
            if max(np.linalg.norm(a @ b - b @ a) for a, b in itertools.combinations(parts, 2)) < 0.1:
                continue
            expr = HamiltonianExpr(3, terms)
            time = 0.5 / np.linalg.norm(dense_of_expr(expr), 2)
            errors = [trotter_distance(expr, TrotterPlan(1, steps, time)) for steps in (4, 8, 16)]
            for coarse, fine in zip(errors, errors[1:]):
                assert 0.35 <= fine / coarse <= 0.65
            checked += 1
            if checked == 5:
                break
        assert checked == 5

    def test_usual_fragments_are_merged_strings(self):
        expr = HamiltonianExpr(2, (Term(1.0, {0: "n"}), Term(1.0, {0: "Z"})))
        fragments = trotter_fragments(expr, "usual")
        assert sorted(ps.label(2) for ps in fragments) == ["II", "ZI"]
        assert len(trotter_fragments(expr, Strategy.DIRECT)) == 2

    def test_options_topology_reaches_fragments(self):
        expr = HamiltonianExpr(3, (Term(0.3, {0: "s", 1: "s", 2: "sd"}, hermitized=True),))
        chain = trotter_product(expr, TrotterPlan(1, 1, 0.2), options=DirectSynthesisOptions(parity_topology="chain"))
        tree = trotter_product(expr, TrotterPlan(1, 1, 0.2), options=DirectSynthesisOptions(parity_topology="tree"))
        exact = expm_hermitian(dense_of_expr(expr), 0.2)
        for circuit in (chain, tree):
            assert phase_distance(circuit_unitary(circuit), exact) < 1e-10
