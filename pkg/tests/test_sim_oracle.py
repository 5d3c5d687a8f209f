import numpy as np
import pytest
from scipy import sparse

from libs.circuit_ir import Circuit, GateKind, cx, global_phase, h, keyed_gate, rx, rz
from libs.errors import NonHermitianError, SizeLimitError, TermStructureError
from libs.operator_algebra import HamiltonianExpr, dense_of_expr, sparse_of_expr
from libs.sim_oracle import (apply, basis_index, basis_state, circuit_unitary, expm_hermitian, expm_multiply_hermitian,
                             is_unitary, sample_states, state_phase_distance,
                             pauli_basis_action, phase_distance)

X = np.array([[0, 1], [1, 0]], dtype=complex)
Z = np.diag([1.0, -1.0]).astype(complex)


class TestExpm:
    def test_diagonal(self):
        theta = 0.37
        assert np.allclose(expm_hermitian(Z, theta), np.diag([np.exp(-1j * theta), np.exp(1j * theta)]))

    def test_random_hermitian_is_unitary(self, rng):
        a = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
        hamiltonian = a + a.conj().T
        u = expm_hermitian(hamiltonian, 0.2)
        assert is_unitary(u)
        assert np.allclose(expm_hermitian(hamiltonian, -0.2), u.conj().T)

    def test_rejects_non_hermitian(self):
        with pytest.raises(NonHermitianError):
            expm_hermitian(np.array([[0, 1], [0, 0]]), 0.1)


class TestCircuitUnitary:
    def test_rotations_match_exponentials(self):
        assert np.allclose(circuit_unitary(Circuit(1, [rx(0, 0.6)])), expm_hermitian(X, 0.3))
        assert np.allclose(circuit_unitary(Circuit(1, [rz(0, 0.6)])), expm_hermitian(Z, 0.3))

    def test_cx_control_is_first_target(self):
        u = circuit_unitary(Circuit(2, [cx(0, 1)]))
        assert np.allclose(u @ basis_state({0: 1, 1: 0}, 2), basis_state({0: 1, 1: 1}, 2))

    def test_keyed_rotation_block(self):
        u = circuit_unitary(Circuit(2, [keyed_gate(GateKind.KEYED_RX, 1, {0: 1}, 0.8)]))
        assert np.allclose(u[:2, :2], np.eye(2))
        assert np.allclose(u[2:, 2:], expm_hermitian(X, 0.4))

    def test_global_phase(self):
        assert np.allclose(circuit_unitary(Circuit(1, [global_phase(0.5)])), np.exp(0.5j) * np.eye(2))

    def test_size_limit(self):
        with pytest.raises(SizeLimitError):
            circuit_unitary(Circuit(13))

    def test_apply_matches_unitary(self, rng):
        circuit = Circuit(3, [h(0), cx(0, 2), keyed_gate(GateKind.KEYED_RY, 1, {0: 1, 2: 0}, 0.9), rz(2, 0.3)])
        psi = rng.normal(size=8) + 1j * rng.normal(size=8)
        assert np.allclose(apply(circuit, psi), circuit_unitary(circuit) @ psi)

    def test_apply_dimension_mismatch(self):
        with pytest.raises(TermStructureError):
            apply(Circuit(2), np.ones(8))

    def test_apply_size_limit(self):
        with pytest.raises(SizeLimitError):
            apply(Circuit(21), np.ones(2))


class TestPhaseDistance:
    def test_ignores_global_phase(self, rng):
        u = expm_hermitian(np.diag(rng.normal(size=4)), 1.0)
        assert phase_distance(u, np.exp(0.7j) * u) < 1e-12

    def test_detects_relative_phase(self):
        assert phase_distance(np.diag([1, 1j]), np.eye(2)) > 0.1

    def test_rejects_non_unitary(self):
        with pytest.raises(TermStructureError):
            phase_distance(np.eye(2), 2 * np.eye(2))


class TestBasis:
    def test_qubit_zero_is_msb(self):
        assert basis_index({0: 1}, 3) == 4
        assert basis_index({2: 1}, 3) == 1

    def test_pauli_action(self):
        amplitude, bits = pauli_basis_action(((0, "Y"), (1, "Z")), {0: 0, 1: 1})
        assert amplitude == pytest.approx(-1j)
        assert bits == {0: 1, 1: 1}


class TestStateOracle:
    def test_expm_multiply_matches_dense(self, make_term):
        expr = HamiltonianExpr(4, (make_term(4), make_term(4, complex_coefficient=True)))
        h_sparse = sparse_of_expr(expr)
        assert np.allclose(h_sparse.toarray(), dense_of_expr(expr))
        states = sample_states(h_sparse, 4, np.random.default_rng(3))
        expected = expm_hermitian(dense_of_expr(expr), 0.35) @ states
        assert np.allclose(expm_multiply_hermitian(h_sparse, 0.35, states), expected)

    def test_expm_multiply_rejects_non_hermitian(self):
        with pytest.raises(NonHermitianError):
            expm_multiply_hermitian(sparse.csr_matrix(np.array([[0, 1], [0, 0]])), 0.1, np.eye(2))

    def test_sample_states_are_normalized(self, make_term):
        h_sparse = sparse_of_expr(HamiltonianExpr(5, (make_term(5),)))
        states = sample_states(h_sparse, 5, np.random.default_rng(4), random_count=3)
        assert states.shape[0] == 32
        assert np.allclose(np.linalg.norm(states, axis=0), 1.0)

    def test_batch_apply_matches_columns(self, rng):
        circuit = Circuit(3, [h(0), cx(0, 2), rz(1, 0.4)])
        states = rng.normal(size=(8, 3)) + 1j * rng.normal(size=(8, 3))
        assert np.allclose(apply(circuit, states), circuit_unitary(circuit) @ states)

    def test_state_distance_uses_one_phase(self):
        states = np.eye(2, dtype=complex)
        assert state_phase_distance(np.exp(0.7j) * states, states) < 1e-12
        relative = states @ np.diag([1.0, -1.0])
        assert state_phase_distance(relative, states) > 0.5
