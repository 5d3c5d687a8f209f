"""
ブロック符号化（LCU 分解）

hermitized 項を高々 6 個の (実係数, ユニタリ回路) の組で表す。
"""
import logging
import math
from dataclasses import dataclass, field, replace
from typing import Optional, Tuple, Union

import numpy as np

from libs.circuit_ir import (Circuit, ControlKey, KeyLike, ParityTopology, complementary_pair, global_phase,
                             keyed_double_z, keyed_x_between, pattern_sign_flip, pauli_string_circuit, s, sdg)
from libs.errors import ControlKeyError, NonHermitianError
from libs.operator_algebra import MAX_DENSE_QUBITS, Symbol, Term, dense_of_term
from libs.sim_oracle import circuit_unitary
from libs.synth_direct import REAL_TOLERANCE, classify

logger = logging.getLogger("scb_synth.lcu")

MAX_PAIRS = 6


@dataclass(frozen=True)
class LcuDecomposition:
    pairs: Tuple[Tuple[float, Circuit], ...]
    target_dense: Optional[np.ndarray] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        pairs = tuple((float(coefficient), circuit) for coefficient, circuit in self.pairs)
        if not pairs:
            raise ValueError("LCU 分解には 1 組以上が必要です")
        object.__setattr__(self, "pairs", pairs)

    def __len__(self):
        return len(self.pairs)

    @property
    def num_qubits(self) -> int:
        return max(circuit.num_qubits for _, circuit in self.pairs)

    def one_norm(self) -> float:
        return float(sum(abs(coefficient) for coefficient, _ in self.pairs))

    def dense_sum(self) -> np.ndarray:
        width = self.num_qubits
        total = np.zeros((2 ** width, 2 ** width), dtype=complex)
        for coefficient, circuit in self.pairs:
            total += coefficient * circuit_unitary(circuit.widened(width))
        return total

    def reconstruction_error(self) -> float:
        if self.target_dense is None:
            raise ValueError("比較対象の密行列がありません")
        return float(np.max(np.abs(self.dense_sum() - self.target_dense)))


def _identity(width: int) -> Circuit:
    return Circuit(width)


def be_number_family(key: KeyLike, num_qubits: Optional[int] = None) -> LcuDecomposition:
    """|key⟩⟨key| = ½I − ½(I − 2|key⟩⟨key|)"""
    key = ControlKey.coerce(key)
    if not key:
        raise ControlKeyError("数族のブロック符号化には空でないキーが必要です")
    width = max(key.qubits) + 1 if num_qubits is None else num_qubits
    projector = Term(1.0, [(q, Symbol.NUM if bit else Symbol.HOLE) for q, bit in key.bits])
    target = dense_of_term(projector, width) if width <= MAX_DENSE_QUBITS else None
    return LcuDecomposition(((0.5, _identity(width)), (-0.5, pattern_sign_flip(key, width))), target)


def be_transition_family(a: KeyLike, b: KeyLike, num_qubits: Optional[int] = None,
                         topology: Union[ParityTopology, str] = ParityTopology.CHAIN) -> LcuDecomposition:
    """|a⟩⟨b| + |b⟩⟨a| = X{a;b} − ½I − ½(I − 2(|a⟩⟨a| + |b⟩⟨b|))"""
    a, b = complementary_pair(a, b)
    width = max(a.qubits) + 1 if num_qubits is None else num_qubits
    swap = keyed_x_between(a, b, topology, width)
    if len(a) == 1:
        minus = Circuit(width, [global_phase(math.pi)])
    else:
        minus = keyed_double_z(a, b, topology, width)
    target = None
    if width <= MAX_DENSE_QUBITS:
        ladder = [(q, Symbol.RAISE if bit else Symbol.LOWER) for q, bit in a.bits]
        target = dense_of_term(Term(1.0, ladder, hermitized=True), width)
    return LcuDecomposition(((1.0, swap), (-0.5, _identity(width)), (-0.5, minus)), target)


def be_term(term: Term, num_qubits: Optional[int] = None,
            topology: Union[ParityTopology, str] = ParityTopology.CHAIN) -> LcuDecomposition:
    """遷移族(≤3) × 数族(≤2) × パウリ因子(1) で ≤6 組を作る"""
    if term.bare:
        raise NonHermitianError("bare な演算子積はブロック符号化できません")
    partition = classify(term)
    if partition.transition and abs(term.coefficient.imag) > REAL_TOLERANCE:
        raise NonHermitianError("複素係数の項は be_complex_term で実部・虚部に分けてください")
    width = max(term.max_index + 1, 1) if num_qubits is None else num_qubits

    if partition.transition:
        weight = term.coefficient.real
        transition_pairs = be_transition_family(partition.side_state, partition.partner_state, width,
                                                topology).pairs
    else:
        weight = term.effective_weight
        transition_pairs = ((1.0, _identity(width)),)
    if partition.number:
        number_pairs = be_number_family(partition.number_key, width).pairs
    else:
        number_pairs = ((1.0, _identity(width)),)
    pauli = pauli_string_circuit(partition.pauli, width)

    pairs = tuple((weight * ct * cn, ut.then(un).then(pauli))
                  for ct, ut in transition_pairs for cn, un in number_pairs)
    target = dense_of_term(term, width) if width <= MAX_DENSE_QUBITS else None
    logger.debug(f"ブロック符号化: {len(pairs)} 組")
    return LcuDecomposition(pairs, target)


def be_complex_term(term: Term, num_qubits: Optional[int] = None,
                    topology: Union[ParityTopology, str] = ParityTopology.CHAIN) -> Tuple[LcuDecomposition, ...]:
    """zA + z̄A† を Re z·(A + A†) と Im z·i(A − A†) に分けて符号化する"""
    partition = classify(term)
    z = term.coefficient
    if not partition.transition:
        return (be_term(replace(term, coefficient=z.real), num_qubits, topology),)
    width = max(term.max_index + 1, 1) if num_qubits is None else num_qubits
    unit = be_term(replace(term, coefficient=1.0), width, topology)

    decompositions = []
    if z.real != 0.0:
        target = unit.target_dense * z.real if unit.target_dense is not None else None
        decompositions.append(LcuDecomposition(
            tuple((z.real * c, u) for c, u in unit.pairs), target))
    if z.imag != 0.0:
        # S を根に掛けると A + A† が ±i(A − A†) に写る
        root, root_side = partition.transition[0]
        orientation = 1.0 if root_side == 1 else -1.0
        conjugated = tuple((z.imag * orientation * c, Circuit(width, [sdg(root)]).then(u).then([s(root)]))
                           for c, u in unit.pairs)
        target = None
        if width <= MAX_DENSE_QUBITS:
            target = dense_of_term(replace(term, coefficient=complex(0.0, z.imag)), width)
        decompositions.append(LcuDecomposition(conjugated, target))
    return tuple(decompositions)
