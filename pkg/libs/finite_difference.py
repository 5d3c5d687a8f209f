"""
有限差分フロントエンド

1/2/3 次元の直交格子（第一近傍ステンシル）の演算子式を組み立てる。

量子ビット配置（上位から）:
    [層セレクタ (layer_qubits)] [線セレクタ (line_qubits)] [線内ノード (q)]
線の通し番号 p = 層 · 2^line_qubits + 線。各線の選択は ô/n̂ の接頭キーで行う。

格子ファイル形式:
    dim 3
    q 2
    a laplacian
    a diagonal -6 -6 -6 -5
    override second_neighbor line=0 value=0.5
    override periodic_wrap value=1.0
    override component_set line=1 node=0 partner=1 value=2.0
"""
import enum
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from libs.errors import ParseError, TermStructureError
from libs.operator_algebra import HamiltonianExpr, Symbol, Term

logger = logging.getLogger("scb_synth.fd")

ELEMENT_TOLERANCE = 1e-15
_DEFAULT_SELECTORS = {1: (0, 0), 2: (1, 0), 3: (1, 1)}


class OverrideKind(str, enum.Enum):
    SECOND_NEIGHBOR = "second_neighbor"
    PERIODIC_WRAP = "periodic_wrap"
    COMPONENT_SET = "component_set"


def _as_values(values) -> Tuple[float, ...]:
    if isinstance(values, (int, float)):
        values = (values,)
    values = tuple(float(v) for v in values)
    if not values or not all(np.isfinite(values)):
        raise TermStructureError(f"係数は有限の実数列です: {values}")
    return values


@dataclass(frozen=True)
class CoefficientTable:
    """長さ 1 の列は全線（全層）共通の値として扱う"""
    diagonal: Tuple[float, ...] = (0.0,)
    neighbor: Tuple[float, ...] = (0.0,)
    inter_line: Tuple[float, ...] = (0.0,)
    inter_layer: Tuple[float, ...] = (0.0,)

    def __post_init__(self):
        for name in ("diagonal", "neighbor", "inter_line", "inter_layer"):
            object.__setattr__(self, name, _as_values(getattr(self, name)))

    @classmethod
    def uniform(cls, diagonal: float, neighbor: float, inter_line: float = 0.0,
                inter_layer: float = 0.0) -> "CoefficientTable":
        return cls((diagonal,), (neighbor,), (inter_line,), (inter_layer,))


@dataclass(frozen=True)
class BoundaryOverride:
    kind: OverrideKind
    value: float
    line: Optional[int] = None
    node: Optional[int] = None
    partner: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "kind", OverrideKind(self.kind))
        object.__setattr__(self, "value", float(self.value))
        if self.kind is OverrideKind.COMPONENT_SET:
            if self.node is None:
                raise TermStructureError("component_set には node が必要です")
            if self.partner is None:
                object.__setattr__(self, "partner", self.node)


@dataclass(frozen=True)
class GridSpec:
    dimension: int
    q: int
    coefficients: CoefficientTable = field(default_factory=CoefficientTable)
    overrides: Tuple[BoundaryOverride, ...] = ()
    line_qubits: Optional[int] = None
    layer_qubits: Optional[int] = None

    def __post_init__(self):
        if self.dimension not in _DEFAULT_SELECTORS:
            raise TermStructureError(f"対応していない次元です: {self.dimension}")
        if self.q < 1:
            raise TermStructureError(f"線内ノードの量子ビット数は 1 以上です: {self.q}")
        default_line, default_layer = _DEFAULT_SELECTORS[self.dimension]
        line = default_line if self.line_qubits is None else int(self.line_qubits)
        layer = default_layer if self.layer_qubits is None else int(self.layer_qubits)
        if (line > 0) != (self.dimension >= 2) or (layer > 0) != (self.dimension == 3):
            raise TermStructureError(f"{self.dimension} 次元のセレクタ量子ビット数が不正です: 線 {line}, 層 {layer}")
        object.__setattr__(self, "line_qubits", line)
        object.__setattr__(self, "layer_qubits", layer)
        object.__setattr__(self, "overrides", tuple(self.overrides))

        c = self.coefficients
        for name, values, count in (("diagonal", c.diagonal, self.num_lines),
                                    ("neighbor", c.neighbor, self.num_lines),
                                    ("inter_line", c.inter_line, self.num_layers),
                                    ("inter_layer", c.inter_layer, self.lines_per_layer)):
            if len(values) not in (1, count):
                raise TermStructureError(f"{name} の長さは 1 か {count} です: {len(values)}")
        for override in self.overrides:
            self._check_override(override)

    def _check_override(self, override: BoundaryOverride):
        if override.line is not None and not 0 <= override.line < self.num_lines:
            raise TermStructureError(f"線 {override.line} が範囲 0..{self.num_lines - 1} の外です")
        if override.kind is OverrideKind.SECOND_NEIGHBOR and self.q < 2:
            raise TermStructureError("第二近傍には q ≥ 2 が必要です")
        if override.kind is OverrideKind.COMPONENT_SET:
            for node in (override.node, override.partner):
                if not 0 <= node < self.nodes_per_line:
                    raise TermStructureError(f"ノード {node} が範囲 0..{self.nodes_per_line - 1} の外です")

    @property
    def nodes_per_line(self) -> int:
        return 2 ** self.q

    @property
    def lines_per_layer(self) -> int:
        return 2 ** self.line_qubits

    @property
    def num_layers(self) -> int:
        return 2 ** self.layer_qubits

    @property
    def num_lines(self) -> int:
        return self.lines_per_layer * self.num_layers

    @property
    def node_offset(self) -> int:
        return self.layer_qubits + self.line_qubits

    @property
    def num_qubits(self) -> int:
        return self.node_offset + self.q

    def values(self, name: str) -> List[float]:
        count = {"diagonal": self.num_lines, "neighbor": self.num_lines,
                 "inter_line": self.num_layers, "inter_layer": self.lines_per_layer}[name]
        values = getattr(self.coefficients, name)
        return list(values) * count if len(values) == 1 else list(values)


@dataclass(frozen=True)
class BoundaryCoefficients:
    b11: float = 0.0
    b12: float = 0.0
    b21: float = 0.0
    b22: float = 0.0
    b_i1: float = 0.0
    b_i2: float = 0.0
    b_j12: float = 0.0
    b_124: float = 0.0
    b_ii: float = 0.0


def shift_operator(q: int) -> Tuple[Term, ...]:
    """第一近傍の隣接行列を q 項で表す（項 1 は最下位ビットの X）

    S_q = I ⊗ S_{q−1} + (σ̂† ⊗ σ̂^{⊗(q−1)} + h.c.)
    """
    if q < 1:
        raise TermStructureError(f"シフト演算子には q ≥ 1 が必要です: {q}")
    terms = [Term(1.0, [(q - 1, Symbol.X)])]
    for m in range(2, q + 1):
        top = q - m
        factors = [(top, Symbol.RAISE)] + [(k, Symbol.LOWER) for k in range(top + 1, q)]
        terms.append(Term(1.0, factors, hermitized=True))
    return tuple(terms)


def second_neighbor_terms(q: int) -> Tuple[Term, ...]:
    """距離 2 の隣接: 最下位ビットを除いた shift_operator(q − 1)"""
    if q < 2:
        raise TermStructureError(f"第二近傍には q ≥ 2 が必要です: {q}")
    return shift_operator(q - 1)


def shift_gate_costs(q: int) -> List[int]:
    """各シフト項の中心ゲートが触れる量子ビット数（合計 (q² + q)/2）"""
    return [len(term.factors) for term in shift_operator(q)]


def laplacian_coefficients(dimension: int, step: float = 1.0) -> CoefficientTable:
    if dimension not in _DEFAULT_SELECTORS:
        raise TermStructureError(f"対応していない次元です: {dimension}")
    inverse = 1.0 / step ** 2
    return CoefficientTable.uniform(-2.0 * dimension * inverse, inverse,
                                    inverse if dimension >= 2 else 0.0,
                                    inverse if dimension == 3 else 0.0)


def _prefix(pattern: int, qubits: Sequence[int]) -> List[Tuple[int, Symbol]]:
    width = len(qubits)
    return [(qubit, Symbol.NUM if (pattern >> (width - 1 - k)) & 1 else Symbol.HOLE)
            for k, qubit in enumerate(qubits)]


def _keyed(term: Term, prefix: Sequence[Tuple[int, Symbol]], coefficient: float) -> Term:
    return Term(coefficient * term.coefficient, list(prefix) + list(term.factors), hermitized=term.hermitized)


def _emit(block: Sequence[Term], values: Sequence[float], selector: Sequence[int], compact: bool) -> List[Term]:
    """values[p] × block をセレクタのパターン p ごとに置く"""
    if compact and len(set(values)) == 1:
        return [_keyed(term, [], values[0]) for term in block] if values[0] != 0.0 else []
    return [_keyed(term, _prefix(p, selector), value)
            for p, value in enumerate(values) if value != 0.0 for term in block]


def _bits(index: int, width: int) -> List[int]:
    return [(index >> (width - 1 - k)) & 1 for k in range(width)]


def _matrix_element(terms: Sequence[Term], row: int, col: int, width: int) -> float:
    """⟨row|Σ terms|col⟩ を密行列なしで計算する"""
    row_bits, col_bits = _bits(row, width), _bits(col, width)

    def amplitude(term: Term, r: List[int], c: List[int]) -> complex:
        factor_map = term.factor_map
        value = term.coefficient
        for qubit in range(width):
            symbol = factor_map.get(qubit, Symbol.ID)
            value *= symbol.matrix[r[qubit], c[qubit]]
            if value == 0:
                return 0j
        return value

    total = 0j
    for term in terms:
        total += amplitude(term, row_bits, col_bits)
        if term.hermitized:
            total += np.conj(amplitude(term, col_bits, row_bits))
    return float(total.real)


def _node_pair_factors(node: int, partner: int, q: int, offset: int) -> List[Tuple[int, Symbol]]:
    """|node⟩⟨partner| を記号の積で表す"""
    factors = []
    for k, (a, b) in enumerate(zip(_bits(node, q), _bits(partner, q))):
        if a == b:
            symbol = Symbol.NUM if a else Symbol.HOLE
        else:
            symbol = Symbol.RAISE if a else Symbol.LOWER
        factors.append((offset + k, symbol))
    return factors


def _override_terms(grid: GridSpec, override: BoundaryOverride, current: List[Term]) -> List[Term]:
    selector = tuple(range(grid.node_offset))
    offset = grid.node_offset
    if override.value == 0.0 and override.kind is not OverrideKind.COMPONENT_SET:
        return []

    if override.kind is not OverrideKind.COMPONENT_SET:
        if override.kind is OverrideKind.SECOND_NEIGHBOR:
            block = [term.shifted(offset) for term in second_neighbor_terms(grid.q)]
        else:
            block = [Term(1.0, [(offset + k, Symbol.LOWER) for k in range(grid.q)], hermitized=True)]
        prefix = [] if override.line is None else _prefix(override.line, selector)
        return [_keyed(term, prefix, override.value) for term in block]

    terms: List[Term] = []
    lines = range(grid.num_lines) if override.line is None else [override.line]
    node, partner = override.node, override.partner
    for p in lines:
        row, col = (p << grid.q) | node, (p << grid.q) | partner
        delta = override.value - _matrix_element(current + terms, row, col, grid.num_qubits)
        if abs(delta) < ELEMENT_TOLERANCE:
            continue
        factors = _prefix(p, selector) + _node_pair_factors(node, partner, grid.q, offset)
        if node == partner:
            terms.append(Term(delta, factors))
        else:
            terms.append(Term(delta, factors, hermitized=True))
    return terms


def assemble(grid: GridSpec, compact: bool = True) -> HamiltonianExpr:
    """格子の演算子式。compact なら一様な係数はキーなしの 1 項にまとめる"""
    selector = tuple(range(grid.node_offset))
    layer_register = tuple(range(grid.layer_qubits))
    line_register = tuple(range(grid.layer_qubits, grid.node_offset))
    shifts = [term.shifted(grid.node_offset) for term in shift_operator(grid.q)]

    terms: List[Term] = []
    terms += _emit([Term(1.0, ())], grid.values("diagonal"), selector, compact)
    terms += _emit(shifts, grid.values("neighbor"), selector, compact)
    if grid.line_qubits:
        line_shifts = [term.shifted(grid.layer_qubits) for term in shift_operator(grid.line_qubits)]
        terms += _emit(line_shifts, grid.values("inter_line"), layer_register, compact)
    if grid.layer_qubits:
        terms += _emit(shift_operator(grid.layer_qubits), grid.values("inter_layer"), line_register, compact)
    for override in grid.overrides:
        terms += _override_terms(grid, override, terms)

    logger.debug(f"格子組み立て: 次元 {grid.dimension}, 量子ビット {grid.num_qubits}, 項 {len(terms)}")
    return HamiltonianExpr(grid.num_qubits, tuple(terms))


def stencil_dense(grid: GridSpec) -> np.ndarray:
    """ノードを直接走査する独立な密行列"""
    n = grid.nodes_per_line
    size = grid.num_lines * n
    matrix = np.zeros((size, size))
    diagonal, neighbor = grid.values("diagonal"), grid.values("neighbor")
    inter_line, inter_layer = grid.values("inter_line"), grid.values("inter_layer")

    def couple(r: int, c: int, value: float):
        matrix[r, c] += value
        matrix[c, r] += value

    for p in range(grid.num_lines):
        layer, line = divmod(p, grid.lines_per_layer)
        for i in range(n):
            r = p * n + i
            matrix[r, r] += diagonal[p]
            if i + 1 < n:
                couple(r, r + 1, neighbor[p])
            if line + 1 < grid.lines_per_layer:
                couple(r, (p + 1) * n + i, inter_line[layer])
            if layer + 1 < grid.num_layers:
                couple(r, (p + grid.lines_per_layer) * n + i, inter_layer[line])

    for override in grid.overrides:
        lines = range(grid.num_lines) if override.line is None else [override.line]
        for p in lines:
            base = p * n
            if override.kind is OverrideKind.SECOND_NEIGHBOR:
                for i in range(n - 2):
                    couple(base + i, base + i + 2, override.value)
            elif override.kind is OverrideKind.PERIODIC_WRAP:
                couple(base, base + n - 1, override.value)
            else:
                r, c = base + override.node, base + override.partner
                matrix[r, c] = override.value
                matrix[c, r] = override.value
    return matrix


def boundary_matrix_B(coeffs: BoundaryCoefficients) -> HamiltonianExpr:
    """3 量子ビットの境界行列 B（構造的非ゼロ 16 成分）"""
    o, n, s, x = Symbol.HOLE, Symbol.NUM, Symbol.LOWER, Symbol.X
    layout = [
        (coeffs.b11, (o, o, o), False),
        (coeffs.b12, (o, n, n), False),
        (coeffs.b21, (n, o, o), False),
        (coeffs.b22, (n, n, n), False),
        (coeffs.b_i1, (o, s, s), True),
        (coeffs.b_i2, (n, s, s), True),
        (coeffs.b_j12, (s, s, s), True),
        (coeffs.b_124, (o, x, n), False),
        (coeffs.b_ii, (n, x, Symbol.ID), False),
    ]
    terms = [Term(value, list(enumerate(symbols)), hermitized=hermitized)
             for value, symbols, hermitized in layout if value != 0.0]
    return HamiltonianExpr(3, tuple(terms))


def _parse_override(fields: Sequence[str]) -> BoundaryOverride:
    kind = OverrideKind(fields[0])
    options: Dict[str, str] = {}
    for item in fields[1:]:
        name, sep, value = item.partition("=")
        if not sep or name not in ("line", "value", "node", "partner"):
            raise ValueError(f"override の指定が不正です: {item}")
        options[name] = value
    if "value" not in options:
        raise ValueError("override には value= が必要です")
    integer = {name: int(options[name]) for name in ("line", "node", "partner") if name in options}
    return BoundaryOverride(kind, float(options["value"]), **integer)


def parse_grid(text: str) -> GridSpec:
    settings: Dict[str, object] = {"dimension": None, "q": None, "line_qubits": None, "layer_qubits": None}
    coefficients: Dict[str, Tuple[float, ...]] = {}
    overrides: List[BoundaryOverride] = []
    for line_number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        column = raw.index(line[0]) + 1
        fields = line.split()
        try:
            if fields[0] == "dim" and len(fields) == 2:
                settings["dimension"] = int(fields[1])
            elif fields[0] in ("q", "line_qubits", "layer_qubits") and len(fields) == 2:
                settings[fields[0]] = int(fields[1])
            elif fields[0] == "a" and len(fields) >= 2 and fields[1] == "laplacian":
                if settings["dimension"] is None:
                    raise ValueError("'a laplacian' の前に 'dim' が必要です")
                step = float(fields[2]) if len(fields) > 2 else 1.0
                table = laplacian_coefficients(settings["dimension"], step)
                coefficients.update(diagonal=table.diagonal, neighbor=table.neighbor,
                                    inter_line=table.inter_line, inter_layer=table.inter_layer)
            elif fields[0] == "a" and len(fields) >= 3 and fields[1] in CoefficientTable.__dataclass_fields__:
                coefficients[fields[1]] = tuple(float(v) for v in fields[2:])
            elif fields[0] == "override" and len(fields) >= 2:
                overrides.append(_parse_override(fields[1:]))
            else:
                raise ValueError(f"解釈できない行です: {line}")
        except ValueError as e:
            raise ParseError(f"格子ファイルの {line_number} 行目: {e}", line_number, column) from e
    if settings["dimension"] is None or settings["q"] is None:
        raise ParseError("格子ファイルには 'dim' と 'q' が必要です", 1, 1)
    try:
        return GridSpec(settings["dimension"], settings["q"], CoefficientTable(**coefficients), tuple(overrides),
                        settings["line_qubits"], settings["layer_qubits"])
    except TermStructureError as e:
        raise ParseError(f"格子ファイルが不正です: {e}", 1, 1) from e


def load_grid(path: Union[str, Path]) -> GridSpec:
    grid = parse_grid(Path(path).read_text(encoding="utf-8"))
    logger.info(f"格子読み込み: {path} (次元 {grid.dimension}, q = {grid.q}, 量子ビット {grid.num_qubits})")
    return grid
