"""
Single Component Basis の演算子代数

記号・項・式のデータモデル、パウリ文字列への展開、n̂/Ẑ 形式変換、
非エルミート演算子のエルミート化を提供する。

規約:
  - 量子ビット 0 がテンソル積の左端（状態インデックスの最上位ビット）
  - σ̂ (LOWER) = |0⟩⟨1| = (X + iY)/2, σ̂† (RAISE) = |1⟩⟨0|
"""
import enum
import functools
import itertools
import logging
from dataclasses import dataclass, replace
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import sparse

from libs.errors import NonHermitianError, SizeLimitError, TermStructureError, UnsupportedFormalismError

logger = logging.getLogger("scb_synth.algebra")

MAX_DENSE_QUBITS = 12
MAX_HERMITIZE_SIDE = 2 ** 11
MERGE_TOLERANCE = 1e-15


class Symbol(enum.Enum):
    """1量子ビット演算子の記号（値は文法上のトークン）"""
    ID = "I"
    X = "X"
    Y = "Y"
    Z = "Z"
    NUM = "n"
    HOLE = "o"
    LOWER = "s"
    RAISE = "sd"

    @property
    def matrix(self) -> np.ndarray:
        return _SYMBOL_MATRICES[self]

    @property
    def adjoint(self) -> "Symbol":
        if self is Symbol.LOWER:
            return Symbol.RAISE
        if self is Symbol.RAISE:
            return Symbol.LOWER
        return self

    @property
    def is_pauli(self) -> bool:
        return self in (Symbol.X, Symbol.Y, Symbol.Z)

    @property
    def is_diagonal(self) -> bool:
        return self in (Symbol.ID, Symbol.Z, Symbol.NUM, Symbol.HOLE)

    @property
    def is_transition(self) -> bool:
        return self in (Symbol.LOWER, Symbol.RAISE)

    @property
    def is_number(self) -> bool:
        return self in (Symbol.NUM, Symbol.HOLE)


def _frozen(values) -> np.ndarray:
    matrix = np.array(values, dtype=complex)
    matrix.setflags(write=False)
    return matrix


_SYMBOL_MATRICES: Dict[Symbol, np.ndarray] = {
    Symbol.ID: _frozen([[1, 0], [0, 1]]),
    Symbol.X: _frozen([[0, 1], [1, 0]]),
    Symbol.Y: _frozen([[0, -1j], [1j, 0]]),
    Symbol.Z: _frozen([[1, 0], [0, -1]]),
    Symbol.NUM: _frozen([[0, 0], [0, 1]]),
    Symbol.HOLE: _frozen([[1, 0], [0, 0]]),
    Symbol.LOWER: _frozen([[0, 1], [0, 0]]),
    Symbol.RAISE: _frozen([[0, 0], [1, 0]]),
}

# 各記号のパウリ展開（記号, 振幅）
_PAULI_EXPANSION: Dict[Symbol, Tuple[Tuple[Symbol, complex], ...]] = {
    Symbol.ID: ((Symbol.ID, 1.0),),
    Symbol.X: ((Symbol.X, 1.0),),
    Symbol.Y: ((Symbol.Y, 1.0),),
    Symbol.Z: ((Symbol.Z, 1.0),),
    Symbol.NUM: ((Symbol.ID, 0.5), (Symbol.Z, -0.5)),
    Symbol.HOLE: ((Symbol.ID, 0.5), (Symbol.Z, 0.5)),
    Symbol.LOWER: ((Symbol.X, 0.5), (Symbol.Y, 0.5j)),
    Symbol.RAISE: ((Symbol.X, 0.5), (Symbol.Y, -0.5j)),
}

FactorItems = Tuple[Tuple[int, Symbol], ...]
FactorsLike = Union[Mapping[int, Union[Symbol, str]], Iterable[Tuple[int, Union[Symbol, str]]]]


def _normalize_factors(factors: FactorsLike) -> FactorItems:
    items = factors.items() if isinstance(factors, Mapping) else factors
    normalized = []
    seen = set()
    for index, symbol in items:
        if isinstance(index, bool) or not isinstance(index, (int, np.integer)) or index < 0:
            raise TermStructureError(f"量子ビット添字が不正です: {index!r}")
        index = int(index)
        if index in seen:
            raise TermStructureError(f"量子ビット添字が重複しています: {index}")
        seen.add(index)
        normalized.append((index, symbol if isinstance(symbol, Symbol) else Symbol(symbol)))
    return tuple(sorted(normalized, key=lambda item: item[0]))


@dataclass(frozen=True)
class Term:
    """係数 × 記号のテンソル積。hermitized なら zA + z̄A† を表す"""
    coefficient: complex
    factors: FactorItems = ()
    hermitized: bool = False
    bare: bool = False

    def __post_init__(self):
        object.__setattr__(self, "factors", _normalize_factors(self.factors))
        coefficient = complex(self.coefficient)
        if not np.isfinite(coefficient):
            raise TermStructureError(f"係数が有限ではありません: {coefficient}")
        if self.hermitized and self.bare:
            raise TermStructureError("bare 項は hermitized にできません")
        if not self.hermitized and not self.bare:
            if self.has_transitions:
                raise NonHermitianError("σ̂/σ̂† を含む項は '+ h.c.' が必要です")
            if abs(coefficient.imag) > MERGE_TOLERANCE:
                raise NonHermitianError(f"エルミート項の係数は実数である必要があります: {coefficient}")
            coefficient = complex(coefficient.real, 0.0)
        object.__setattr__(self, "coefficient", coefficient)

    @classmethod
    def bare_product(cls, coefficient: complex, factors: FactorsLike) -> "Term":
        """非エルミートでもよい演算子積（Jordan-Wigner 演算子など）"""
        return cls(coefficient, factors, hermitized=False, bare=True)

    @property
    def factor_map(self) -> Dict[int, Symbol]:
        return dict(self.factors)

    @property
    def support(self) -> Tuple[int, ...]:
        return tuple(index for index, _ in self.factors)

    @property
    def max_index(self) -> int:
        return self.factors[-1][0] if self.factors else -1

    @property
    def has_transitions(self) -> bool:
        return any(symbol.is_transition for _, symbol in self.factors)

    @property
    def is_diagonal(self) -> bool:
        return all(symbol.is_diagonal for _, symbol in self.factors)

    @property
    def is_identity(self) -> bool:
        return all(symbol is Symbol.ID for _, symbol in self.factors)

    @property
    def merge_key(self):
        active = tuple((index, symbol) for index, symbol in self.factors if symbol is not Symbol.ID)
        return active, self.hermitized, self.bare

    @property
    def effective_weight(self) -> float:
        """遷移を含まない項の実効的な実係数（hermitized なら 2Re z）"""
        if self.hermitized:
            return 2.0 * self.coefficient.real
        return self.coefficient.real

    def adjoint(self) -> "Term":
        if not self.bare:
            return self
        return Term.bare_product(
            self.coefficient.conjugate(),
            [(index, symbol.adjoint) for index, symbol in self.factors],
        )

    def scaled(self, factor: complex) -> "Term":
        return replace(self, coefficient=self.coefficient * factor)

    def shifted(self, offset: int) -> "Term":
        return replace(self, factors=tuple((index + offset, symbol) for index, symbol in self.factors))


@dataclass(frozen=True)
class HamiltonianExpr:
    """項の和 Ĥ = Σ Term"""
    num_qubits: int
    terms: Tuple[Term, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        if self.num_qubits < 0:
            raise TermStructureError(f"量子ビット数が不正です: {self.num_qubits}")
        for term in self.terms:
            if term.max_index >= self.num_qubits:
                raise TermStructureError(
                    f"項の添字 {term.max_index} が量子ビット数 {self.num_qubits} を超えています")

    @classmethod
    def from_terms(cls, terms: Iterable[Term], num_qubits: Optional[int] = None) -> "HamiltonianExpr":
        terms = tuple(terms)
        if num_qubits is None:
            num_qubits = max([term.max_index + 1 for term in terms] + [1])
        return cls(num_qubits, terms)

    def __len__(self):
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)

    def __add__(self, other: "HamiltonianExpr") -> "HamiltonianExpr":
        return HamiltonianExpr(max(self.num_qubits, other.num_qubits), self.terms + other.terms)

    @property
    def is_diagonal(self) -> bool:
        return all(term.is_diagonal for term in self.terms)

    def merged(self, tolerance: float = MERGE_TOLERANCE) -> "HamiltonianExpr":
        """同一因子の項を合算し、係数がほぼゼロの項を落とす"""
        representatives: Dict[tuple, Term] = {}
        sums: Dict[tuple, complex] = {}
        for term in self.terms:
            key = term.merge_key
            if key not in representatives:
                representatives[key] = term
                sums[key] = 0j
            sums[key] += term.coefficient
        terms = [replace(representatives[key], coefficient=total)
                 for key, total in sums.items() if abs(total) >= tolerance]
        if len(terms) != len(self.terms):
            logger.debug(f"項を統合: {len(self.terms)} → {len(terms)}")
        return HamiltonianExpr(self.num_qubits, tuple(terms))


@dataclass(frozen=True)
class PauliString:
    """係数 × パウリ文字列"""
    coefficient: complex
    letters: FactorItems = ()

    def __post_init__(self):
        letters = tuple(item for item in _normalize_factors(self.letters) if item[1] is not Symbol.ID)
        for index, symbol in letters:
            if not symbol.is_pauli:
                raise TermStructureError(f"パウリ文字ではありません: {symbol.value}{index}")
        object.__setattr__(self, "letters", letters)
        object.__setattr__(self, "coefficient", complex(self.coefficient))

    @property
    def weight(self) -> int:
        return len(self.letters)

    @property
    def max_index(self) -> int:
        return self.letters[-1][0] if self.letters else -1

    def label(self, num_qubits: Optional[int] = None) -> str:
        width = self.max_index + 1 if num_qubits is None else num_qubits
        letter_map = dict(self.letters)
        return "".join(letter_map.get(index, Symbol.ID).value for index in range(max(width, 1)))


def _check_dense_size(num_qubits: int):
    if num_qubits > MAX_DENSE_QUBITS:
        raise SizeLimitError(f"密行列は {MAX_DENSE_QUBITS} 量子ビットまでです: {num_qubits}")


def _kron_factors(factor_map: Mapping[int, Symbol], num_qubits: int) -> np.ndarray:
    matrices = [factor_map.get(index, Symbol.ID).matrix for index in range(num_qubits)]
    return functools.reduce(np.kron, matrices, np.ones((1, 1), dtype=complex))


def dense_of_term(term: Term, num_qubits: Optional[int] = None) -> np.ndarray:
    """項の密行列 z·(⊗因子) (+ 随伴)"""
    num_qubits = term.max_index + 1 if num_qubits is None else num_qubits
    _check_dense_size(num_qubits)
    if term.max_index >= num_qubits:
        raise TermStructureError(f"添字 {term.max_index} が量子ビット数 {num_qubits} を超えています")
    operator = term.coefficient * _kron_factors(term.factor_map, num_qubits)
    if term.hermitized:
        operator = operator + operator.conj().T
    return operator


def dense_of_expr(expr: HamiltonianExpr) -> np.ndarray:
    _check_dense_size(expr.num_qubits)
    dim = 2 ** expr.num_qubits
    total = np.zeros((dim, dim), dtype=complex)
    for term in expr.terms:
        total += dense_of_term(term, expr.num_qubits)
    return total


def _sparse_kron_factors(factor_map: Mapping[int, Symbol], num_qubits: int) -> sparse.csr_matrix:
    matrices = [sparse.csr_matrix(factor_map.get(index, Symbol.ID).matrix) for index in range(num_qubits)]
    return functools.reduce(lambda left, right: sparse.kron(left, right, format="csr"), matrices,
                            sparse.identity(1, dtype=complex, format="csr"))


def sparse_of_term(term: Term, num_qubits: Optional[int] = None) -> sparse.csr_matrix:
    """dense_of_term の疎行列版（密行列の上限を超える検証用）"""
    num_qubits = term.max_index + 1 if num_qubits is None else num_qubits
    if term.max_index >= num_qubits:
        raise TermStructureError(f"添字 {term.max_index} が量子ビット数 {num_qubits} を超えています")
    operator = term.coefficient * _sparse_kron_factors(term.factor_map, num_qubits)
    if term.hermitized:
        operator = operator + operator.conj().T
    return sparse.csr_matrix(operator)


def sparse_of_expr(expr: HamiltonianExpr) -> sparse.csr_matrix:
    dim = 2 ** expr.num_qubits
    total = sparse.csr_matrix((dim, dim), dtype=complex)
    for term in expr.terms:
        total = total + sparse_of_term(term, expr.num_qubits)
    return sparse.csr_matrix(total)


def dense_of_pauli(ps: PauliString, num_qubits: int) -> np.ndarray:
    _check_dense_size(num_qubits)
    return ps.coefficient * _kron_factors(dict(ps.letters), num_qubits)


def dense_of_pauli_sum(strings: Sequence[PauliString], num_qubits: int) -> np.ndarray:
    dim = 2 ** num_qubits
    total = np.zeros((dim, dim), dtype=complex)
    for ps in strings:
        total += dense_of_pauli(ps, num_qubits)
    return total


def expansion_size(term: Term) -> int:
    """h.c. を合わせる前の z·A のパウリ展開項数"""
    size = 1
    for _, symbol in term.factors:
        size *= len(_PAULI_EXPANSION[symbol])
    return size


def to_pauli_sum(term: Term, tolerance: float = MERGE_TOLERANCE) -> List[PauliString]:
    """項をパウリ文字列の和へ展開する"""
    choices = [[(index, letter, amplitude) for letter, amplitude in _PAULI_EXPANSION[symbol]]
               for index, symbol in term.factors]
    accumulated: Dict[FactorItems, complex] = {}
    for choice in itertools.product(*choices):
        amplitude = term.coefficient
        letters = []
        for index, letter, factor in choice:
            amplitude *= factor
            if letter is not Symbol.ID:
                letters.append((index, letter))
        key = tuple(letters)
        accumulated[key] = accumulated.get(key, 0j) + amplitude

    if term.hermitized:
        # パウリ文字列はエルミートなので c·P + h.c. = 2Re(c)·P
        accumulated = {key: complex(2.0 * value.real, 0.0) for key, value in accumulated.items()}

    strings = [PauliString(value, key) for key, value in accumulated.items() if abs(value) >= tolerance]
    logger.debug(f"パウリ展開: 因子数 {len(term.factors)} → 文字列 {len(strings)}")
    return strings


def expr_to_pauli_sum(expr: HamiltonianExpr, tolerance: float = MERGE_TOLERANCE) -> List[PauliString]:
    """式全体をパウリ展開し、同じ文字列を合算する"""
    accumulated: Dict[FactorItems, complex] = {}
    for term in expr.terms:
        for ps in to_pauli_sum(term, tolerance=0.0):
            accumulated[ps.letters] = accumulated.get(ps.letters, 0j) + ps.coefficient
    return [PauliString(value, key) for key, value in accumulated.items() if abs(value) >= tolerance]


def pauli_coefficient(h: np.ndarray, letters: FactorsLike, num_qubits: int) -> complex:
    """正規化パウリ射影 Tr[P·H]/2^N"""
    pauli = _kron_factors(dict(_normalize_factors(letters)), num_qubits)
    return complex(np.trace(pauli @ h) / (2 ** num_qubits))


class Formalism(str, enum.Enum):
    Z_FORM = "Z"
    N_FORM = "n"


_TO_N_FORM = {
    Symbol.ID: ((Symbol.ID, 1.0),),
    Symbol.Z: ((Symbol.ID, 1.0), (Symbol.NUM, -2.0)),
    Symbol.NUM: ((Symbol.NUM, 1.0),),
    Symbol.HOLE: ((Symbol.ID, 1.0), (Symbol.NUM, -1.0)),
}

_TO_Z_FORM = {
    Symbol.ID: ((Symbol.ID, 1.0),),
    Symbol.Z: ((Symbol.Z, 1.0),),
    Symbol.NUM: ((Symbol.ID, 0.5), (Symbol.Z, -0.5)),
    Symbol.HOLE: ((Symbol.ID, 0.5), (Symbol.Z, 0.5)),
}


def convert_formalism(expr: HamiltonianExpr, target: Union[Formalism, str],
                      tolerance: float = MERGE_TOLERANCE) -> HamiltonianExpr:
    """対角な式を Ẑ 形式と n̂ 形式の間で変換する"""
    target = Formalism(target)
    table = _TO_N_FORM if target is Formalism.N_FORM else _TO_Z_FORM
    accumulated: Dict[FactorItems, float] = {}
    for term in expr.terms:
        if not term.is_diagonal or term.bare:
            raise UnsupportedFormalismError("形式変換は対角な項 (I/Z/n/o) のみ対応しています")
        weight = term.effective_weight
        choices = [[(index, symbol, factor) for symbol, factor in table[original]]
                   for index, original in term.factors]
        for choice in itertools.product(*choices):
            amplitude = weight
            factors = []
            for index, symbol, factor in choice:
                amplitude *= factor
                if symbol is not Symbol.ID:
                    factors.append((index, symbol))
            key = tuple(factors)
            accumulated[key] = accumulated.get(key, 0.0) + amplitude

    ordered = sorted(accumulated.items(), key=lambda item: (len(item[0]), [index for index, _ in item[0]]))
    terms = tuple(Term(value, key) for key, value in ordered if abs(value) >= tolerance)
    return HamiltonianExpr(expr.num_qubits, terms)


def multiply_terms(left: Term, right: Term) -> Optional[Term]:
    """演算子積 left·right を記号ごとに計算する（ゼロなら None）"""
    left_map, right_map = left.factor_map, right.factor_map
    coefficient = left.coefficient * right.coefficient
    factors = []
    for index in sorted(set(left_map) | set(right_map)):
        product = left_map.get(index, Symbol.ID).matrix @ right_map.get(index, Symbol.ID).matrix
        if not np.any(np.abs(product) > 1e-14):
            return None
        symbol, scale = _match_symbol(product)
        coefficient *= scale
        if symbol is not Symbol.ID:
            factors.append((index, symbol))
    return Term.bare_product(coefficient, factors)


def _match_symbol(product: np.ndarray) -> Tuple[Symbol, complex]:
    for symbol in Symbol:
        basis = symbol.matrix
        scale = np.vdot(basis, product) / np.vdot(basis, basis)
        if abs(scale) > 1e-14 and np.allclose(product, scale * basis, atol=1e-14):
            return symbol, complex(scale)
    raise TermStructureError("記号の積が Single Component Basis に収まりません")


def hermitize_nonhermitian(a: np.ndarray) -> Tuple[np.ndarray, Callable[[np.ndarray], np.ndarray]]:
    """A を σ̂₀†⊗A + h.c. に埋め込み、(H, 埋め込み規則) を返す"""
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise TermStructureError(f"正方行列が必要です: shape={a.shape}")
    if a.shape[0] > MAX_HERMITIZE_SIDE:
        raise SizeLimitError(f"行列サイズが上限 {MAX_HERMITIZE_SIDE} を超えています: {a.shape[0]}")
    lifted = np.kron(Symbol.RAISE.matrix, a)
    return lifted + lifted.conj().T, embed_solution


def embed_solution(vector: np.ndarray) -> np.ndarray:
    """|a⟩ → |0⟩⊗|a⟩"""
    return np.kron(np.array([1.0, 0.0], dtype=complex), np.asarray(vector, dtype=complex))


def extract_solution(state: np.ndarray) -> np.ndarray:
    """|1⟩⊗|b⟩ 成分から |b⟩ を取り出す"""
    state = np.asarray(state)
    return state[state.shape[0] // 2:]


def hermitize_term(term: Term) -> Term:
    """積形式の A を σ̂₀†⊗A + h.c. の hermitized 項へ持ち上げる"""
    shifted = [(index + 1, symbol) for index, symbol in term.factors]
    return Term(term.coefficient, [(0, Symbol.RAISE)] + shifted, hermitized=True)
