"""
HUBO（高次制約なし二値最適化）のフロントエンド

部分集合ごとの重みから Ẑ 形式 / n̂ 形式の対角ハミルトニアンを作り、
位相分離回路の合成、ゲート一覧、2 量子ビットゲート数モデルを提供する。

HUBO ファイル形式:
    # コメント
    vars 4
    form n
    0,1 : 1.5
    2,3,0 : -0.25
"""
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from libs.circuit_ir import Circuit, GateKind, ParityTopology
from libs.errors import ParseError, TermStructureError
from libs.operator_algebra import (Formalism, HamiltonianExpr, Symbol, Term, convert_formalism,
                                   expr_to_pauli_sum)
from libs.synth_direct import DirectSynthesisOptions, synthesize_direct
from libs.synth_usual import Strategy, synthesize_pauli_term

logger = logging.getLogger("scb_synth.hubo")

Subset = Tuple[int, ...]


@dataclass(frozen=True)
class HuboProblem:
    """num_vars 変数の HUBO。weights は (部分集合, 重み) の組"""
    num_vars: int
    formalism: Formalism = Formalism.N_FORM
    weights: Tuple[Tuple[Subset, float], ...] = ()

    def __post_init__(self):
        if self.num_vars < 1:
            raise TermStructureError(f"変数の数は 1 以上です: {self.num_vars}")
        object.__setattr__(self, "formalism", Formalism(self.formalism))
        items = self.weights.items() if isinstance(self.weights, Mapping) else self.weights
        merged: Dict[Subset, float] = {}
        for subset, weight in items:
            normalized = tuple(sorted(int(v) for v in subset))
            if not normalized:
                raise TermStructureError("空の部分集合には重みを付けられません")
            if len(set(normalized)) != len(normalized):
                raise TermStructureError(f"部分集合に重複があります: {subset}")
            if normalized[0] < 0 or normalized[-1] >= self.num_vars:
                raise TermStructureError(f"部分集合 {normalized} が変数範囲 0..{self.num_vars - 1} の外です")
            weight = float(weight)
            if not math.isfinite(weight):
                raise TermStructureError(f"重みが有限ではありません: {weight}")
            merged[normalized] = merged.get(normalized, 0.0) + weight
        ordered = sorted(merged.items(), key=lambda item: (len(item[0]), item[0]))
        object.__setattr__(self, "weights", tuple(ordered))

    @property
    def order(self) -> int:
        return max((len(subset) for subset, _ in self.weights), default=0)


def build_expr(p: HuboProblem) -> HamiltonianExpr:
    """部分集合ごとに 1 つの対角項（Z 文字または n̂ 記号）"""
    symbol = Symbol.Z if p.formalism is Formalism.Z_FORM else Symbol.NUM
    terms = [Term(weight, [(v, symbol) for v in subset]) for subset, weight in p.weights]
    return HamiltonianExpr(p.num_vars, tuple(terms))


def cost_of(p: HuboProblem, assignment: Sequence[int]) -> float:
    """総当たり用の目的関数値（Z 因子 = 1 − 2xᵢ, n̂ 因子 = xᵢ）"""
    if len(assignment) != p.num_vars:
        raise TermStructureError(f"割り当ての長さ {len(assignment)} が変数の数 {p.num_vars} と一致しません")
    total = 0.0
    for subset, weight in p.weights:
        value = weight
        for v in subset:
            bit = int(assignment[v])
            value *= (1 - 2 * bit) if p.formalism is Formalism.Z_FORM else bit
        total += value
    return total


def hubo_fragments(p: HuboProblem, strategy: Union[Strategy, str]) -> list:
    """直接法は n̂ 形式の項、通常法は Ẑ 形式のパウリ文字列"""
    expr = build_expr(p)
    if Strategy(strategy) is Strategy.DIRECT:
        return list(convert_formalism(expr, Formalism.N_FORM).terms)
    return expr_to_pauli_sum(convert_formalism(expr, Formalism.Z_FORM))


def synthesize_hubo(p: HuboProblem, t: float, strategy: Union[Strategy, str] = Strategy.DIRECT,
                    topology: Union[ParityTopology, str] = ParityTopology.CHAIN) -> Circuit:
    """位相分離回路 exp(−itH)。項は可換なのでトロッター誤差はない"""
    strategy = Strategy(strategy)
    options = DirectSynthesisOptions(t, topology)
    circuit = Circuit(p.num_vars)
    for fragment in hubo_fragments(p, strategy):
        if strategy is Strategy.DIRECT:
            circuit = circuit.then(synthesize_direct(fragment, options, p.num_vars))
        else:
            circuit = circuit.then(synthesize_pauli_term(fragment, t, p.num_vars, topology))
    logger.debug(f"HUBO 合成 ({strategy.value}): 変数 {p.num_vars}, ゲート {len(circuit)}")
    return circuit


def _phase_label(key_length: int) -> str:
    if key_length == 0:
        return "P"
    if key_length <= 2:
        return "C" * key_length + "P"
    return f"C^{key_length}P"


def gate_inventory(p: HuboProblem, strategy: Union[Strategy, str], theta: float) -> List[Tuple[str, float]]:
    """(ラベル, 角度) の一覧。通常法は R_Z…, 直接法は P / CP / CCP / C^kP"""
    strategy = Strategy(strategy)
    inventory: List[Tuple[str, float]] = []
    if strategy is Strategy.USUAL:
        for ps in hubo_fragments(p, strategy):
            if ps.letters:
                inventory.append(("R_" + "Z" * ps.weight, 2 * theta * ps.coefficient.real))
        return inventory

    circuit = synthesize_hubo(p, theta, strategy)
    for gate in circuit.gates:
        if gate.kind is GateKind.GLOBAL_PHASE:
            continue
        if gate.kind in (GateKind.PHASE, GateKind.KEYED_PHASE):
            inventory.append((_phase_label(len(gate.key) if gate.key else 0), gate.theta))
        else:
            inventory.append((gate.kind.value, gate.theta))
    return inventory


@dataclass(frozen=True)
class CountModel:
    """2 量子ビットゲート数のモデル

    keyed_phase(n) は n 量子ビットに触れる C^{n−1}P の数。n > 5 では補助量子ビット
    1 つの線形構成、それ以下（または quadratic_only）では補助なしの二次構成。
    """
    quadratic_only: bool = False
    horizon: int = 64

    def rz_string(self, n: int) -> int:
        return 2 * (n - 1) if n >= 1 else 0

    def keyed_phase(self, n: int) -> int:
        if n <= 5 or self.quadratic_only:
            k = max(n - 1, 0)
            return k * (3 * k - 1) // 2
        return 2 * (6 * 8 * (n - 5) + 48 * n - 212)

    def direct_cost(self, n: int) -> int:
        """n̂ 形式の単一の次数 n 項（C^{n−1}P 1 個）"""
        return self.keyed_phase(n)

    def usual_cost(self, n: int) -> int:
        """同じ項を Ẑ 形式に展開した全文字列 Σ 2(h−1)C(n,h)"""
        return sum(self.rz_string(h) * math.comb(n, h) for h in range(1, n + 1))


def crossover_threshold(model: Optional[CountModel] = None, lowest: int = 1) -> int:
    """n₀ ≤ n ≤ horizon のすべてで直接法が安くなる最小の n₀（lowest 未満の次数は見ない）"""
    model = model or CountModel()
    threshold = None
    for n in range(model.horizon, max(lowest, 1) - 1, -1):
        if model.direct_cost(n) < model.usual_cost(n):
            threshold = n
        else:
            break
    if threshold is None:
        raise TermStructureError(f"n ≤ {model.horizon} では直接法が安くなりません")
    logger.debug(f"交差点: n = {threshold}")
    return threshold


def compare_dense_costs(model: Optional[CountModel] = None, orders: Iterable[int] = range(1, 11)) -> List[dict]:
    model = model or CountModel()
    rows = []
    for n in orders:
        direct, usual = model.direct_cost(n), model.usual_cost(n)
        rows.append({"order": n, "direct": direct, "usual": usual, "direct_wins": direct < usual})
    return rows


def problem_costs(p: HuboProblem, model: Optional[CountModel] = None) -> Dict[str, int]:
    """問題全体の 2 量子ビットゲート数（直接法 / 通常法）"""
    model = model or CountModel()
    direct = sum(model.direct_cost(len(term.factors)) for term in hubo_fragments(p, Strategy.DIRECT))
    usual = sum(model.rz_string(ps.weight) for ps in hubo_fragments(p, Strategy.USUAL) if ps.letters)
    return {"direct": direct, "usual": usual}


def parse_hubo(text: str) -> HuboProblem:
    num_vars: Optional[int] = None
    formalism = Formalism.N_FORM
    weights: List[Tuple[Subset, float]] = []
    for line_number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        column = raw.index(line[0]) + 1
        head = line.split()
        try:
            if head[0] == "vars" and len(head) == 2:
                num_vars = int(head[1])
            elif head[0] == "form" and len(head) == 2:
                formalism = Formalism(head[1])
            elif ":" in line:
                subset_text, weight_text = line.split(":", 1)
                subset = tuple(int(v) for v in subset_text.split(",") if v.strip())
                weights.append((subset, float(weight_text)))
            else:
                raise ValueError(f"解釈できない行です: {line}")
        except ValueError as e:
            raise ParseError(f"HUBO ファイルの {line_number} 行目: {e}", line_number, column) from e
    if num_vars is None:
        raise ParseError("HUBO ファイルに 'vars N' がありません", 1, 1)
    try:
        return HuboProblem(num_vars, formalism, tuple(weights))
    except TermStructureError as e:
        raise ParseError(f"HUBO ファイルが不正です: {e}", 1, 1) from e


def format_hubo(p: HuboProblem) -> str:
    lines = [f"vars {p.num_vars}", f"form {p.formalism.value}"]
    lines.extend(f"{','.join(str(v) for v in subset)} : {weight!r}" for subset, weight in p.weights)
    return "\n".join(lines) + "\n"


def load_hubo(path: Union[str, Path]) -> HuboProblem:
    problem = parse_hubo(Path(path).read_text(encoding="utf-8"))
    logger.info(f"HUBO 読み込み: {path} (変数 {problem.num_vars}, 項 {len(problem.weights)})")
    return problem


def write_hubo(p: HuboProblem, path: Union[str, Path]) -> None:
    Path(path).write_text(format_hubo(p), encoding="utf-8")
