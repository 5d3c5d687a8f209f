"""
直接法による単一項の厳密ハミルトニアンシミュレーション

項の因子を 4 つの族（恒等・パウリ・数・遷移）に分類し、exp(−iθH) を
基底変換 + キー付き中心回転 + 逆計算として組み立てる。
"""
import enum
import logging
import math
from dataclasses import dataclass, replace
from typing import List, Optional, Tuple, Union

import numpy as np

from libs.circuit_ir import (PARAMETRIC_KINDS, Circuit, ControlKey, Gate, GateKind, ParityTopology, cz,
                             difference_network, global_phase, h, keyed_gate, network_pattern, parity_network,
                             phase, rz, sdg, x)
from libs.errors import ControlKeyError, NonHermitianError, TermStructureError
from libs.operator_algebra import Symbol, Term, dense_of_term
from libs.sim_oracle import circuit_unitary, expm_hermitian, phase_distance

logger = logging.getLogger("scb_synth.direct")

REAL_TOLERANCE = 1e-15


class ComplexMode(str, enum.Enum):
    EXACT = "exact"
    SPLIT = "split"


@dataclass(frozen=True)
class DirectSynthesisOptions:
    theta: float = 0.1
    parity_topology: ParityTopology = ParityTopology.CHAIN
    complex_mode: ComplexMode = ComplexMode.EXACT

    def __post_init__(self):
        if not math.isfinite(self.theta):
            raise TermStructureError(f"θ は有限である必要があります: {self.theta}")
        object.__setattr__(self, "theta", float(self.theta))
        object.__setattr__(self, "parity_topology", ParityTopology(self.parity_topology))
        object.__setattr__(self, "complex_mode", ComplexMode(self.complex_mode))

    def with_theta(self, theta: float) -> "DirectSynthesisOptions":
        return replace(self, theta=theta)


@dataclass(frozen=True)
class FamilyPartition:
    identity_qubits: Tuple[int, ...] = ()
    pauli: Tuple[Tuple[int, Symbol], ...] = ()
    number: Tuple[Tuple[int, int], ...] = ()
    transition: Tuple[Tuple[int, int], ...] = ()

    @property
    def number_key(self) -> ControlKey:
        return ControlKey(self.number)

    @property
    def side_state(self) -> ControlKey:
        """遷移族の状態 |v⟩（σ̂† → 1, σ̂ → 0）"""
        return ControlKey(self.transition)

    @property
    def partner_state(self) -> ControlKey:
        return self.side_state.complement()

    @property
    def pauli_qubits(self) -> Tuple[int, ...]:
        return tuple(q for q, _ in self.pauli)

    @property
    def transition_qubits(self) -> Tuple[int, ...]:
        return tuple(q for q, _ in self.transition)


def classify(term: Term) -> FamilyPartition:
    """因子を恒等・パウリ・数・遷移の 4 族に分ける"""
    identity, pauli, number, transition = [], [], [], []
    for index, symbol in term.factors:
        if symbol is Symbol.ID:
            identity.append(index)
        elif symbol.is_pauli:
            pauli.append((index, symbol))
        elif symbol.is_number:
            number.append((index, 1 if symbol is Symbol.NUM else 0))
        else:
            transition.append((index, 1 if symbol is Symbol.RAISE else 0))
    return FamilyPartition(tuple(identity), tuple(pauli), tuple(number), tuple(transition))


def pattern_phase(bits: ControlKey, angle: float) -> List[Gate]:
    """パターン |bits⟩ にだけ位相 e^{i·angle} を付ける"""
    ones = [q for q, bit in bits.bits if bit == 1]
    if ones:
        target, wrap = ones[-1], []
    else:
        target = bits.qubits[-1]
        wrap = [x(target)]
    return wrap + [keyed_gate(GateKind.KEYED_PHASE, target, bits.without(target), angle)] + wrap


def _pauli_reduction(partition: FamilyPartition, topology: ParityTopology, width: int) -> Tuple[Circuit, int]:
    """パウリ族を Z に揃え、パリティを最小添字の量子ビットへ集める"""
    gates: List[Gate] = []
    for qubit, letter in partition.pauli:
        if letter is Symbol.X:
            gates.append(h(qubit))
        elif letter is Symbol.Y:
            gates.extend([sdg(qubit), h(qubit)])
    network, root = parity_network(partition.pauli_qubits, topology, width)
    return Circuit(width, gates).then(network), root


def synthesize_direct(term: Term, opts: Optional[DirectSynthesisOptions] = None,
                      num_qubits: Optional[int] = None, sign_control: Optional[int] = None) -> Circuit:
    """exp(−iθH) を 1 つの中心回転で厳密に実現する回路

    sign_control を与えると、その量子ビットが 1 の分岐で回転の符号が反転する。
    """
    opts = opts or DirectSynthesisOptions()
    if term.bare:
        raise NonHermitianError("bare な演算子積は合成できません（'+ h.c.' が必要）")
    if sign_control is not None and sign_control in term.support:
        raise ControlKeyError(f"符号制御量子ビット {sign_control} が項の台と重なっています")
    width = max(term.max_index + 1, 1 if sign_control is None else sign_control + 1)
    if num_qubits is not None:
        if num_qubits < width:
            raise TermStructureError(f"回路幅 {num_qubits} が項に対して不足しています")
        width = num_qubits

    partition = classify(term)
    if partition.transition:
        circuit = _transition_circuit(term, partition, opts, width, sign_control)
    else:
        circuit = _transition_free_circuit(term, partition, opts, width, sign_control)
    logger.debug(f"直接合成: 因子 {len(term.factors)} → ゲート {len(circuit)}")
    return circuit


def _transition_free_circuit(term: Term, partition: FamilyPartition, opts: DirectSynthesisOptions,
                             width: int, sign_control: Optional[int]) -> Circuit:
    if term.hermitized and abs(term.coefficient.imag) > REAL_TOLERANCE:
        raise NonHermitianError(f"遷移を含まない項の複素係数はエルミートになりません: {term.coefficient}")
    weight = term.effective_weight
    angle = -opts.theta * weight
    number = partition.number_key

    if not partition.pauli:
        if not number:
            gates = [global_phase(angle)]
            if sign_control is not None:
                gates.append(phase(sign_control, -2 * angle))
            return Circuit(width, gates)
        if sign_control is None:
            return Circuit(width, pattern_phase(number, angle))
        return Circuit(width, pattern_phase(number.union({sign_control: 0}), angle)
                       + pattern_phase(number.union({sign_control: 1}), -angle))

    reduction, root = _pauli_reduction(partition, opts.parity_topology, width)
    rotation = 2 * opts.theta * weight
    if not number and sign_control is None:
        center = [rz(root, rotation)]
    else:
        sandwich = [cz(sign_control, root)] if sign_control is not None else []
        center = [h(root)] + sandwich + [keyed_gate(GateKind.KEYED_RX, root, number, rotation)] + sandwich + [h(root)]
    return reduction.then(center).then(reduction.inverse())


def _transition_circuit(term: Term, partition: FamilyPartition, opts: DirectSynthesisOptions,
                        width: int, sign_control: Optional[int]) -> Circuit:
    side = partition.side_state
    network, root = difference_network(side.qubits, opts.parity_topology, width)
    pattern = network_pattern(side.bit_map, network)
    root_side = pattern.pop(root)
    key = partition.number_key.union(pattern)

    reduction = network
    sandwich: List[Gate] = []
    if partition.pauli:
        pauli_reduction, pauli_root = _pauli_reduction(partition, opts.parity_topology, width)
        reduction = pauli_reduction.then(network)
        sandwich.append(cz(pauli_root, root))
    if sign_control is not None:
        sandwich.append(cz(sign_control, root))

    z = term.coefficient
    orientation = 1.0 if root_side == 1 else -1.0
    before: List[Gate] = []
    after: List[Gate] = []
    if abs(z.imag) <= REAL_TOLERANCE:
        rotations = [keyed_gate(GateKind.KEYED_RX, root, key, 2 * opts.theta * z.real)]
    elif opts.complex_mode is ComplexMode.EXACT:
        axis = orientation * float(np.angle(z))
        before, after = [rz(root, -axis)], [rz(root, axis)]
        rotations = [keyed_gate(GateKind.KEYED_RX, root, key, 2 * opts.theta * abs(z))]
    else:
        rotations = []
        if z.real != 0.0:
            rotations.append(keyed_gate(GateKind.KEYED_RX, root, key, 2 * opts.theta * z.real))
        rotations.append(keyed_gate(GateKind.KEYED_RY, root, key, 2 * opts.theta * orientation * z.imag))

    center = before + sandwich + rotations + sandwich + after
    return reduction.then(center).then(reduction.inverse())


def central_rotation_count(circuit: Circuit) -> int:
    """中心回転の個数（RX/RY/RZ/Phase 系。互いに打ち消す軸の共役対は除く）"""
    pending: List[Gate] = []
    count = 0
    for gate in circuit.gates:
        if gate.kind not in PARAMETRIC_KINDS:
            continue
        inverse = gate.inverse()
        if inverse in pending:
            pending.remove(inverse)
            count -= 1
        else:
            pending.append(gate)
            count += 1
    return count


def trotter_error_of_split(term: Term, theta: float,
                           topology: Union[ParityTopology, str] = ParityTopology.CHAIN) -> float:
    """複素係数を実部・虚部に分けた近似回路の厳密解からの距離"""
    width = max(term.max_index + 1, 1)
    split = synthesize_direct(term, DirectSynthesisOptions(theta, topology, ComplexMode.SPLIT), width)
    exact = expm_hermitian(dense_of_term(term, width), theta)
    return phase_distance(circuit_unitary(split), exact)
