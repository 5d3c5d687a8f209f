"""
フェルミオン系のフロントエンド

Jordan-Wigner 変換、1 体・2 体の hermitized 項、対ゲート B、
符号制御付き時間発展、FSWAP を提供する。符号はすべて密行列の JW 積で決まる。

フェルミオン項ファイル形式:
    # コメント
    modes 4
    1B 0 1 0.5
    2B 0 1 2 3 0.25
    B 0 1 1.0 2.0
"""
import enum
import functools
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from libs.circuit_ir import Circuit, Gate, GateKind, cx, cz, keyed_gate
from libs.errors import ParseError, TermStructureError
from libs.operator_algebra import HamiltonianExpr, Symbol, Term, dense_of_term, multiply_terms
from libs.synth_direct import DirectSynthesisOptions, synthesize_direct

logger = logging.getLogger("scb_synth.fermion")


class FermionKind(str, enum.Enum):
    ONE_BODY = "1B"
    TWO_BODY = "2B"
    PAIR = "B"


@dataclass(frozen=True)
class FermionTerm:
    """1 体 (i, j, h)・2 体 (i, j, k, l, h)・対 B (q0, q1, α, β)"""
    kind: FermionKind
    modes: Tuple[int, ...]
    coefficient: float
    beta: float = 0.0

    def __post_init__(self):
        kind = FermionKind(self.kind)
        object.__setattr__(self, "kind", kind)
        modes = tuple(int(m) for m in self.modes)
        expected = {FermionKind.ONE_BODY: 2, FermionKind.TWO_BODY: 4, FermionKind.PAIR: 2}[kind]
        if len(modes) != expected:
            raise TermStructureError(f"{kind.value} のモード数は {expected} です: {modes}")
        if len(set(modes)) != len(modes) or min(modes) < 0:
            raise TermStructureError(f"モード添字が不正です: {modes}")
        object.__setattr__(self, "modes", modes)
        object.__setattr__(self, "coefficient", float(self.coefficient))
        object.__setattr__(self, "beta", float(self.beta))

    def to_terms(self) -> Tuple[Term, ...]:
        if self.kind is FermionKind.ONE_BODY:
            return (one_body_term(*self.modes, self.coefficient),)
        if self.kind is FermionKind.TWO_BODY:
            return (two_body_term(*self.modes, self.coefficient),)
        return pair_terms(*self.modes, self.coefficient, self.beta)


def jordan_wigner(mode: int, num_modes: int) -> Term:
    """âᵢ = Z₀…Z_{i−1} σ̂ᵢ （bare な演算子積）"""
    if not 0 <= mode < num_modes:
        raise TermStructureError(f"モード {mode} が範囲 0..{num_modes - 1} の外です")
    factors = [(j, Symbol.Z) for j in range(mode)] + [(mode, Symbol.LOWER)]
    return Term.bare_product(1.0, factors)


def jw_dense(mode: int, num_modes: int, creation: bool = False) -> np.ndarray:
    """記号表を使わない独立な JW 密行列"""
    if not 0 <= mode < num_modes:
        raise TermStructureError(f"モード {mode} が範囲 0..{num_modes - 1} の外です")
    z = np.diag([1.0, -1.0]).astype(complex)
    lower = np.array([[0, 1], [0, 0]], dtype=complex)
    eye = np.eye(2, dtype=complex)
    matrices = [z] * mode + [lower] + [eye] * (num_modes - mode - 1)
    operator = functools.reduce(np.kron, matrices)
    return operator.conj().T if creation else operator


def _ladder_product(creations: Sequence[int], annihilations: Sequence[int], num_modes: int) -> Term:
    product: Optional[Term] = None
    operators = [jordan_wigner(m, num_modes).adjoint() for m in creations]
    operators += [jordan_wigner(m, num_modes) for m in annihilations]
    for operator in operators:
        product = operator if product is None else multiply_terms(product, operator)
        if product is None:
            raise TermStructureError(f"演算子積がゼロになります: {creations} / {annihilations}")
    return product


def one_body_term(i: int, j: int, h: float) -> Term:
    """(h/2)(a†ᵢaⱼ + h.c.) = (h/2)(σ̂†ᵢ Z… σ̂ⱼ + h.c.)"""
    if i == j:
        raise TermStructureError(f"1 体項は i ≠ j が必要です: {i}")
    if i > j:
        i, j = j, i
    product = _ladder_product([i], [j], j + 1)
    return Term(product.coefficient * h / 2, product.factors, hermitized=True)


def two_body_term(i: int, j: int, k: int, l: int, h: float) -> Term:
    """(h/2)(a†ᵢa†ⱼaₖaₗ + h.c.)"""
    if i == j or k == l or {i, j} & {k, l}:
        raise TermStructureError(f"2 体項の添字が衝突しています: {(i, j, k, l)}")
    num_modes = max(i, j, k, l) + 1
    product = _ladder_product([i, j], [k, l], num_modes)
    return Term(product.coefficient * h / 2, product.factors, hermitized=True)


def pair_terms(q0: int, q1: int, alpha: float, beta: float) -> Tuple[Term, ...]:
    """B = α(|01⟩⟨10| + h.c.) + β(|00⟩⟨11| + h.c.)"""
    terms = []
    if alpha != 0.0:
        terms.append(Term(alpha, [(q0, Symbol.LOWER), (q1, Symbol.RAISE)], hermitized=True))
    if beta != 0.0:
        terms.append(Term(beta, [(q0, Symbol.LOWER), (q1, Symbol.LOWER)], hermitized=True))
    return tuple(terms)


def fermion_expression(terms: Iterable[FermionTerm], num_modes: Optional[int] = None) -> HamiltonianExpr:
    terms = list(terms)
    qubit_terms = [t for term in terms for t in term.to_terms()]
    width = max([max(term.modes) + 1 for term in terms] + [1])
    if num_modes is not None:
        if num_modes < width:
            raise TermStructureError(f"モード数 {num_modes} が項に対して不足しています")
        width = num_modes
    return HamiltonianExpr(width, tuple(qubit_terms)).merged()


def pair_gate_B(alpha: float, beta: float, t: float, qubits: Tuple[int, int] = (0, 1),
                num_qubits: Optional[int] = None) -> Circuit:
    """exp(−itB)。1 つの CX で 2 つの状態対を同時に 1 量子ビット回転へ落とす"""
    q0, q1 = qubits
    if q0 == q1:
        raise TermStructureError(f"2 つの異なる量子ビットが必要です: {qubits}")
    width = max(q0, q1) + 1 if num_qubits is None else num_qubits
    gates = [
        cx(q0, q1),
        keyed_gate(GateKind.KEYED_RX, q0, {q1: 0}, 2 * t * beta),
        keyed_gate(GateKind.KEYED_RX, q0, {q1: 1}, 2 * t * alpha),
        cx(q0, q1),
    ]
    return Circuit(width, gates)


def sign_controlled_evolution(term: Term, t: float, control: int, num_qubits: Optional[int] = None,
                              options: Optional[DirectSynthesisOptions] = None) -> Circuit:
    """制御が |0⟩ なら exp(−itH)、|1⟩ なら exp(+itH)"""
    options = (options or DirectSynthesisOptions()).with_theta(t)
    return synthesize_direct(term, options, num_qubits, sign_control=control)


def fswap(i: int, j: int, num_qubits: Optional[int] = None, decompose: bool = True) -> Circuit:
    """フェルミオン SWAP（|11⟩ に −1）"""
    if i == j:
        raise TermStructureError(f"FSWAP には異なる 2 量子ビットが必要です: {i}")
    width = max(i, j) + 1 if num_qubits is None else num_qubits
    if decompose:
        return Circuit(width, [Gate(GateKind.SWAP, (i, j)), cz(i, j)])
    return Circuit(width, [Gate(GateKind.FSWAP, (i, j))])


def block_parity_split(num_middle: int, tolerance: float = 1e-12) -> Dict[int, int]:
    """H₁ = a†₀a_{m+1} + h.c. を中間レジスタの基底ごとに ±A₁ へ分解する

    戻り値は中間パターン（整数）→ 符号。
    """
    if num_middle < 0:
        raise TermStructureError(f"中間モード数が不正です: {num_middle}")
    width = num_middle + 2
    dense = dense_of_term(one_body_term(0, width - 1, 2.0), width)
    a1 = dense_of_term(Term(1.0, [(0, Symbol.RAISE), (1, Symbol.LOWER)], hermitized=True), 2)

    signs: Dict[int, int] = {}
    for middle in range(2 ** num_middle):
        indices = [(a << (width - 1)) | (middle << 1) | b for a in (0, 1) for b in (0, 1)]
        block = dense[np.ix_(indices, indices)]
        if np.allclose(block, a1, atol=tolerance):
            signs[middle] = 1
        elif np.allclose(block, -a1, atol=tolerance):
            signs[middle] = -1
        else:
            raise TermStructureError(f"中間パターン {middle} のブロックが ±A₁ になりません")
    return signs


def parse_fermion_terms(text: str) -> Tuple[List[FermionTerm], Optional[int]]:
    num_modes: Optional[int] = None
    terms: List[FermionTerm] = []
    for line_number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        column = raw.index(line[0]) + 1
        fields = line.split()
        try:
            if fields[0] == "modes" and len(fields) == 2:
                num_modes = int(fields[1])
            elif fields[0] == FermionKind.ONE_BODY.value and len(fields) == 4:
                terms.append(FermionTerm(FermionKind.ONE_BODY, tuple(map(int, fields[1:3])), float(fields[3])))
            elif fields[0] == FermionKind.TWO_BODY.value and len(fields) == 6:
                terms.append(FermionTerm(FermionKind.TWO_BODY, tuple(map(int, fields[1:5])), float(fields[5])))
            elif fields[0] == FermionKind.PAIR.value and len(fields) == 5:
                terms.append(FermionTerm(FermionKind.PAIR, tuple(map(int, fields[1:3])),
                                         float(fields[3]), float(fields[4])))
            else:
                raise ValueError(f"解釈できない行です: {line}")
        except ValueError as e:
            raise ParseError(f"フェルミオン項ファイルの {line_number} 行目: {e}", line_number, column) from e
    return terms, num_modes


def load_fermion_expression(path: Union[str, Path]) -> HamiltonianExpr:
    terms, num_modes = parse_fermion_terms(Path(path).read_text(encoding="utf-8"))
    expr = fermion_expression(terms, num_modes)
    logger.info(f"フェルミオン項読み込み: {path} (モード {expr.num_qubits}, 項 {len(expr)})")
    return expr
