"""
通常法（パウリ文字列の指数関数）とトロッター積
"""
import enum
import logging
from dataclasses import dataclass
from typing import Iterable, List, Optional, Tuple, Union

from libs.circuit_ir import Circuit, Gate, ParityTopology, global_phase, h, parity_network, rz, sdg
from libs.errors import TermStructureError
from libs.operator_algebra import HamiltonianExpr, PauliString, Symbol, expr_to_pauli_sum
from libs.synth_direct import DirectSynthesisOptions, synthesize_direct

logger = logging.getLogger("scb_synth.usual")


class Strategy(str, enum.Enum):
    DIRECT = "direct"
    USUAL = "usual"


@dataclass(frozen=True)
class TrotterPlan:
    order: int = 1
    steps: int = 1
    time: float = 1.0

    def __post_init__(self):
        if self.order not in (1, 2):
            raise TermStructureError(f"トロッター次数は 1 か 2 です: {self.order}")
        if self.steps < 1:
            raise TermStructureError(f"ステップ数は 1 以上です: {self.steps}")


def synthesize_pauli_rotation(letters: Iterable[Tuple[int, Symbol]], theta: float,
                              num_qubits: Optional[int] = None,
                              topology: Union[ParityTopology, str] = ParityTopology.CHAIN) -> Circuit:
    """exp(−iθP) : 基底変換 + パリティネットワーク + RZ(2θ)"""
    letters = PauliString(1.0, tuple(letters)).letters
    if not letters:
        raise TermStructureError("恒等でない文字を少なくとも 1 つ含む必要があります")
    width = letters[-1][0] + 1 if num_qubits is None else num_qubits

    basis: List[Gate] = []
    for qubit, letter in letters:
        if letter is Symbol.X:
            basis.append(h(qubit))
        elif letter is Symbol.Y:
            basis.extend([sdg(qubit), h(qubit)])
    network, root = parity_network([q for q, _ in letters], topology, width)
    reduction = Circuit(width, basis).then(network)
    return reduction.then([rz(root, 2 * theta)]).then(reduction.inverse())


def synthesize_pauli_term(ps: PauliString, theta: float, num_qubits: Optional[int] = None,
                          topology: Union[ParityTopology, str] = ParityTopology.CHAIN) -> Circuit:
    """係数込みの exp(−iθ·c·P)"""
    weight = ps.coefficient.real
    width = max(ps.max_index + 1, 1) if num_qubits is None else num_qubits
    if not ps.letters:
        return Circuit(width, [global_phase(-theta * weight)])
    return synthesize_pauli_rotation(ps.letters, theta * weight, width, topology)


def trotter_fragments(expr: HamiltonianExpr, strategy: Union[Strategy, str]) -> list:
    """断片列（直接法は項そのまま、通常法は合算済みパウリ文字列）"""
    if Strategy(strategy) is Strategy.DIRECT:
        return list(expr.terms)
    return expr_to_pauli_sum(expr)


def _fragment_circuit(fragment, theta: float, width: int, strategy: Strategy,
                      options: DirectSynthesisOptions) -> Circuit:
    if strategy is Strategy.DIRECT:
        return synthesize_direct(fragment, options.with_theta(theta), width)
    return synthesize_pauli_term(fragment, theta, width, options.parity_topology)


def trotter_product(expr: HamiltonianExpr, plan: TrotterPlan, strategy: Union[Strategy, str] = Strategy.DIRECT,
                    options: Optional[DirectSynthesisOptions] = None) -> Circuit:
    """exp(−itH) の 1 次 / 2 次（対称）トロッター積"""
    strategy = Strategy(strategy)
    options = options or DirectSynthesisOptions()
    width = max(expr.num_qubits, 1)
    fragments = trotter_fragments(expr, strategy)
    dt = plan.time / plan.steps

    if plan.order == 1:
        step = [_fragment_circuit(f, dt, width, strategy, options) for f in fragments]
    else:
        half = [_fragment_circuit(f, dt / 2, width, strategy, options) for f in fragments]
        step = half + half[::-1]

    circuit = Circuit(width)
    for _ in range(plan.steps):
        for fragment_circuit in step:
            circuit = circuit.then(fragment_circuit)
    logger.debug(f"トロッター積: 断片 {len(fragments)}, ステップ {plan.steps}, 次数 {plan.order}")
    return circuit
