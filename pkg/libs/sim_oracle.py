"""
厳密な数値オラクル

エルミート行列の指数関数、回路のユニタリ化・状態ベクトルへの適用、
大域位相を無視した距離を提供する。回路合成の検証はすべてここを基準にする。
"""
import logging
from typing import Iterable, Mapping, Tuple

import numpy as np
from scipy import linalg, sparse
from scipy.sparse import linalg as sparse_linalg

from libs.circuit_ir import Circuit, Gate, GateKind
from libs.errors import NonHermitianError, SizeLimitError, TermStructureError

logger = logging.getLogger("scb_synth.oracle")

MAX_UNITARY_QUBITS = 12
MAX_STATE_QUBITS = 20
HERMITIAN_TOLERANCE = 1e-10
UNITARY_TOLERANCE = 1e-9


def _as_square(matrix: np.ndarray) -> np.ndarray:
    matrix = np.asarray(matrix, dtype=complex)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise TermStructureError(f"正方行列が必要です: shape={matrix.shape}")
    return matrix


def expm_hermitian(h: np.ndarray, theta: float) -> np.ndarray:
    """exp(−iθH) を固有値分解で計算（固有値は昇順）"""
    h = _as_square(h)
    if h.shape[0] > 2 ** MAX_UNITARY_QUBITS:
        raise SizeLimitError(f"次元 {h.shape[0]} は上限 2^{MAX_UNITARY_QUBITS} を超えています")
    asymmetry = float(np.max(np.abs(h - h.conj().T))) if h.size else 0.0
    if asymmetry >= HERMITIAN_TOLERANCE:
        raise NonHermitianError(f"エルミートではありません: ‖H − H†‖_max = {asymmetry:.3e}")
    eigenvalues, vectors = linalg.eigh((h + h.conj().T) / 2)
    return (vectors * np.exp(-1j * theta * eigenvalues)) @ vectors.conj().T


def _apply_gate(tensor: np.ndarray, gate: Gate, num_qubits: int) -> np.ndarray:
    """形状 (2,)*n + (batch,) のテンソルにゲートを作用させる"""
    if gate.kind is GateKind.GLOBAL_PHASE:
        tensor *= np.exp(1j * gate.theta)
        return tensor

    key_map = gate.key.bit_map if gate.key else {}
    index = [slice(None)] * (num_qubits + 1)
    for qubit, bit in key_map.items():
        index[qubit] = bit
    view = tensor[tuple(index)]

    remaining = [q for q in range(num_qubits) if q not in key_map]
    axes = [remaining.index(t) for t in gate.targets]
    width = len(gate.targets)
    matrix = gate.base_matrix().reshape((2,) * (2 * width))
    updated = np.tensordot(matrix, view, axes=(list(range(width, 2 * width)), axes))
    view[...] = np.moveaxis(updated, list(range(width)), axes)
    return tensor


def circuit_unitary(circuit: Circuit, max_qubits: int = MAX_UNITARY_QUBITS) -> np.ndarray:
    """回路全体のユニタリ（先頭のゲートが最初に作用）"""
    n = circuit.num_qubits
    if n > max_qubits:
        raise SizeLimitError(f"ユニタリ化は {max_qubits} 量子ビットまでです: {n}")
    dim = 2 ** n
    tensor = np.eye(dim, dtype=complex).reshape((2,) * n + (dim,))
    for gate in circuit.gates:
        tensor = _apply_gate(tensor, gate, n)
    return tensor.reshape(dim, dim)


def apply(circuit: Circuit, psi: np.ndarray, max_qubits: int = MAX_STATE_QUBITS) -> np.ndarray:
    """状態ベクトル（または列ごとの状態の束）へゲートを順に適用する"""
    n = circuit.num_qubits
    if n > max_qubits:
        raise SizeLimitError(f"状態ベクトル適用は {max_qubits} 量子ビットまでです: {n}")
    psi = np.asarray(psi, dtype=complex)
    if psi.ndim not in (1, 2) or psi.shape[0] != 2 ** n:
        raise TermStructureError(f"次元が一致しません: 状態 {psi.shape} / 回路 {n} 量子ビット")
    batch = psi.shape[1] if psi.ndim == 2 else 1
    tensor = psi.reshape((2,) * n + (batch,)).copy()
    for gate in circuit.gates:
        tensor = _apply_gate(tensor, gate, n)
    return tensor.reshape(psi.shape)


def expm_multiply_hermitian(h: sparse.spmatrix, theta: float, states: np.ndarray) -> np.ndarray:
    """exp(−iθH)·states を行列指数を組み立てずに計算する"""
    h = sparse.csr_matrix(h, dtype=complex)
    if h.shape[0] != h.shape[1]:
        raise TermStructureError(f"正方行列が必要です: shape={h.shape}")
    asymmetry = h - h.conj().T
    if asymmetry.nnz and float(abs(asymmetry).max()) >= HERMITIAN_TOLERANCE:
        raise NonHermitianError("エルミートではありません")
    return sparse_linalg.expm_multiply(-1j * theta * h, np.asarray(states, dtype=complex))


def sample_states(h: sparse.spmatrix, num_qubits: int, rng: np.random.Generator,
                 support_count: int = 32, basis_count: int = 16, random_count: int = 2) -> np.ndarray:
    """H が作用する基底状態・ランダム基底状態・ランダム状態を列に並べる"""
    dim = 2 ** num_qubits
    support = np.unique(sparse.csr_matrix(h).nonzero()[1])
    if len(support) > support_count:
        support = rng.choice(support, size=support_count, replace=False)
    indices = np.unique(np.concatenate([support, rng.integers(0, dim, size=basis_count)]))

    states = np.zeros((dim, len(indices) + random_count), dtype=complex)
    states[indices, np.arange(len(indices))] = 1.0
    for column in range(len(indices), states.shape[1]):
        vector = rng.normal(size=dim) + 1j * rng.normal(size=dim)
        states[:, column] = vector / np.linalg.norm(vector)
    return states


def state_phase_distance(actual: np.ndarray, expected: np.ndarray) -> float:
    """すべての列に共通の大域位相を除いた最大誤差"""
    actual, expected = np.asarray(actual, dtype=complex), np.asarray(expected, dtype=complex)
    if actual.shape != expected.shape:
        raise TermStructureError(f"次元が一致しません: {actual.shape} / {expected.shape}")
    overlap = np.vdot(expected, actual)
    angle = float(np.angle(overlap)) if abs(overlap) > 0 else 0.0
    return float(np.max(np.abs(actual - np.exp(1j * angle) * expected)))


def is_unitary(u: np.ndarray, tolerance: float = UNITARY_TOLERANCE) -> bool:
    u = _as_square(u)
    return float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0])))) < tolerance


def phase_distance(u: np.ndarray, v: np.ndarray) -> float:
    """‖U − e^{iφ*}V‖_max, φ* = arg Tr(V†U)"""
    u, v = _as_square(u), _as_square(v)
    if u.shape != v.shape:
        raise TermStructureError(f"次元が一致しません: {u.shape} / {v.shape}")
    if not (is_unitary(u) and is_unitary(v)):
        raise TermStructureError("ユニタリでない行列は比較できません")
    overlap = np.vdot(v, u)
    angle = float(np.angle(overlap)) if abs(overlap) > 0 else 0.0
    return float(np.max(np.abs(u - np.exp(1j * angle) * v)))


def basis_index(bits: Mapping[int, int], num_qubits: int) -> int:
    """量子ビット 0 を最上位とする基底インデックス"""
    return sum(int(bit) << (num_qubits - 1 - qubit) for qubit, bit in bits.items())


def basis_state(bits: Mapping[int, int], num_qubits: int) -> np.ndarray:
    state = np.zeros(2 ** num_qubits, dtype=complex)
    state[basis_index(bits, num_qubits)] = 1.0
    return state


def pauli_basis_action(letters: Iterable[Tuple[int, object]], bits: Mapping[int, int]) -> Tuple[complex, dict]:
    """P|bits⟩ = phase·|bits'⟩ を解析的に返す"""
    result = dict(bits)
    amplitude = 1 + 0j
    for qubit, letter in letters:
        name = getattr(letter, "value", letter)
        bit = result.get(qubit, 0)
        if name == "X":
            result[qubit] = 1 - bit
        elif name == "Y":
            amplitude *= 1j if bit == 0 else -1j
            result[qubit] = 1 - bit
        elif name == "Z":
            amplitude *= -1 if bit else 1
    return amplitude, result
