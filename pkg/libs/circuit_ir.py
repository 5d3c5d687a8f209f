"""
量子回路の中間表現

任意パターンの多重制御キーを持つゲート語彙、回路、ゲート数・深さの集計、
パリティネットワーク（chain / tree）と、キー付き多重制御構成を提供する。
"""
import enum
import logging
import math
from collections import Counter
from dataclasses import dataclass, field, replace
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from libs.errors import ControlKeyError, TermStructureError

logger = logging.getLogger("scb_synth.circuit")


class GateKind(str, enum.Enum):
    X = "X"
    H = "H"
    S = "S"
    SDG = "Sdg"
    RX = "RX"
    RY = "RY"
    RZ = "RZ"
    PHASE = "Phase"
    CX = "CX"
    CZ = "CZ"
    GLOBAL_PHASE = "GlobalPhase"
    KEYED_X = "KeyedX"
    KEYED_Z = "KeyedZ"
    KEYED_PHASE = "KeyedPhase"
    KEYED_RX = "KeyedRX"
    KEYED_RY = "KeyedRY"
    SWAP = "SWAP"
    FSWAP = "FSWAP"


TWO_TARGET_KINDS = frozenset({GateKind.CX, GateKind.CZ, GateKind.SWAP, GateKind.FSWAP})
PARAMETRIC_KINDS = frozenset({GateKind.RX, GateKind.RY, GateKind.RZ, GateKind.PHASE, GateKind.GLOBAL_PHASE,
                              GateKind.KEYED_PHASE, GateKind.KEYED_RX, GateKind.KEYED_RY})
ROTATION_KINDS = PARAMETRIC_KINDS - {GateKind.GLOBAL_PHASE}
KEYED_KINDS = frozenset({GateKind.KEYED_X, GateKind.KEYED_Z, GateKind.KEYED_PHASE,
                         GateKind.KEYED_RX, GateKind.KEYED_RY})
SELF_INVERSE_KINDS = frozenset({GateKind.X, GateKind.H, GateKind.CX, GateKind.CZ, GateKind.SWAP,
                                GateKind.FSWAP, GateKind.KEYED_X, GateKind.KEYED_Z})

# キーが空になったときの素のゲート
_PLAIN_OF_KEYED = {
    GateKind.KEYED_X: GateKind.X,
    GateKind.KEYED_Z: GateKind.PHASE,
    GateKind.KEYED_PHASE: GateKind.PHASE,
    GateKind.KEYED_RX: GateKind.RX,
    GateKind.KEYED_RY: GateKind.RY,
}


class ParityTopology(str, enum.Enum):
    CHAIN = "chain"
    TREE = "tree"


KeyLike = Union["ControlKey", Mapping[int, int], Iterable[Tuple[int, int]]]


@dataclass(frozen=True)
class ControlKey:
    """制御キー（量子ビット → 0/1 のパターン）"""
    bits: Tuple[Tuple[int, int], ...] = ()

    def __post_init__(self):
        items = self.bits.items() if isinstance(self.bits, Mapping) else self.bits
        normalized = {}
        for qubit, bit in items:
            if isinstance(qubit, bool) or not isinstance(qubit, (int, np.integer)) or qubit < 0:
                raise ControlKeyError(f"制御キーの量子ビットが不正です: {qubit!r}")
            if int(qubit) in normalized:
                raise ControlKeyError(f"制御キーの量子ビットが重複しています: {qubit}")
            if bit not in (0, 1):
                raise ControlKeyError(f"制御キーのビットは 0/1 です: {bit!r}")
            normalized[int(qubit)] = int(bit)
        object.__setattr__(self, "bits", tuple(sorted(normalized.items())))

    @classmethod
    def coerce(cls, key: Optional[KeyLike]) -> "ControlKey":
        if key is None:
            return cls()
        return key if isinstance(key, ControlKey) else cls(key)

    def __len__(self):
        return len(self.bits)

    @property
    def qubits(self) -> Tuple[int, ...]:
        return tuple(qubit for qubit, _ in self.bits)

    @property
    def bit_map(self) -> Dict[int, int]:
        return dict(self.bits)

    def label(self) -> str:
        return "".join(str(bit) for _, bit in self.bits)

    def complement(self) -> "ControlKey":
        return ControlKey([(qubit, 1 - bit) for qubit, bit in self.bits])

    def without(self, qubit: int) -> "ControlKey":
        return ControlKey([(q, b) for q, b in self.bits if q != qubit])

    def union(self, other: KeyLike) -> "ControlKey":
        other = ControlKey.coerce(other)
        overlap = set(self.qubits) & set(other.qubits)
        if overlap:
            raise ControlKeyError(f"制御キーが重なっています: {sorted(overlap)}")
        return ControlKey(self.bits + other.bits)


def _rotation_matrix(kind: GateKind, theta: float) -> np.ndarray:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    if kind is GateKind.RX:
        return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)
    if kind is GateKind.RY:
        return np.array([[c, -s], [s, c]], dtype=complex)
    return np.array([[np.exp(-0.5j * theta), 0], [0, np.exp(0.5j * theta)]], dtype=complex)


_FIXED_MATRICES = {
    GateKind.X: np.array([[0, 1], [1, 0]], dtype=complex),
    GateKind.H: np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2),
    GateKind.S: np.diag([1, 1j]).astype(complex),
    GateKind.SDG: np.diag([1, -1j]).astype(complex),
    GateKind.CX: np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex),
    GateKind.CZ: np.diag([1, 1, 1, -1]).astype(complex),
    GateKind.SWAP: np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex),
    GateKind.FSWAP: np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, -1]], dtype=complex),
    GateKind.KEYED_X: np.array([[0, 1], [1, 0]], dtype=complex),
    GateKind.KEYED_Z: np.diag([1, -1]).astype(complex),
}


@dataclass(frozen=True)
class Gate:
    """ゲート。Keyed* はキーのパターン上でのみターゲットに作用する"""
    kind: GateKind
    targets: Tuple[int, ...]
    theta: Optional[float] = None
    key: Optional[ControlKey] = None

    def __post_init__(self):
        kind = GateKind(self.kind)
        object.__setattr__(self, "kind", kind)
        targets = tuple(int(t) for t in self.targets)
        expected = 0 if kind is GateKind.GLOBAL_PHASE else 2 if kind in TWO_TARGET_KINDS else 1
        if len(targets) != expected:
            raise TermStructureError(f"{kind.value} のターゲット数は {expected} です: {targets}")
        if len(set(targets)) != len(targets) or any(t < 0 for t in targets):
            raise TermStructureError(f"ターゲットが不正です: {targets}")
        object.__setattr__(self, "targets", targets)

        if kind in PARAMETRIC_KINDS:
            if self.theta is None or not math.isfinite(self.theta):
                raise TermStructureError(f"{kind.value} には有限の角度が必要です")
            object.__setattr__(self, "theta", float(self.theta))
        elif self.theta is not None:
            raise TermStructureError(f"{kind.value} は角度を取りません")

        if kind in KEYED_KINDS:
            key = ControlKey.coerce(self.key)
            if not key:
                raise ControlKeyError(f"{kind.value} には空でない制御キーが必要です")
            if set(key.qubits) & set(targets):
                raise ControlKeyError(f"制御キーとターゲットが重なっています: {key.qubits} / {targets}")
            object.__setattr__(self, "key", key)
        elif self.key is not None:
            raise ControlKeyError(f"{kind.value} は制御キーを取りません")

    @property
    def qubits(self) -> Tuple[int, ...]:
        return self.targets + (self.key.qubits if self.key else ())

    @property
    def is_keyed(self) -> bool:
        return self.kind in KEYED_KINDS

    @property
    def is_rotation(self) -> bool:
        return self.kind in ROTATION_KINDS

    def base_matrix(self) -> np.ndarray:
        """ターゲット上の行列（先頭ターゲットが上位ビット）"""
        if self.kind in _FIXED_MATRICES:
            return _FIXED_MATRICES[self.kind]
        if self.kind is GateKind.GLOBAL_PHASE:
            return np.array([[np.exp(1j * self.theta)]], dtype=complex)
        if self.kind in (GateKind.PHASE, GateKind.KEYED_PHASE):
            return np.diag([1, np.exp(1j * self.theta)]).astype(complex)
        base = {GateKind.KEYED_RX: GateKind.RX, GateKind.KEYED_RY: GateKind.RY}.get(self.kind, self.kind)
        return _rotation_matrix(base, self.theta)

    def inverse(self) -> "Gate":
        if self.kind in SELF_INVERSE_KINDS:
            return self
        if self.kind is GateKind.S:
            return replace(self, kind=GateKind.SDG)
        if self.kind is GateKind.SDG:
            return replace(self, kind=GateKind.S)
        return replace(self, theta=-self.theta)


def x(qubit: int) -> Gate:
    return Gate(GateKind.X, (qubit,))


def h(qubit: int) -> Gate:
    return Gate(GateKind.H, (qubit,))


def s(qubit: int) -> Gate:
    return Gate(GateKind.S, (qubit,))


def sdg(qubit: int) -> Gate:
    return Gate(GateKind.SDG, (qubit,))


def rx(qubit: int, theta: float) -> Gate:
    return Gate(GateKind.RX, (qubit,), theta)


def ry(qubit: int, theta: float) -> Gate:
    return Gate(GateKind.RY, (qubit,), theta)


def rz(qubit: int, theta: float) -> Gate:
    return Gate(GateKind.RZ, (qubit,), theta)


def phase(qubit: int, theta: float) -> Gate:
    return Gate(GateKind.PHASE, (qubit,), theta)


def cx(control: int, target: int) -> Gate:
    return Gate(GateKind.CX, (control, target))


def cz(first: int, second: int) -> Gate:
    return Gate(GateKind.CZ, (first, second))


def global_phase(theta: float) -> Gate:
    return Gate(GateKind.GLOBAL_PHASE, (), theta)


def keyed_gate(kind: GateKind, target: int, key: KeyLike, theta: Optional[float] = None) -> Gate:
    """キー付きゲート。キーが空なら素のゲートに縮退する"""
    kind = GateKind(kind)
    key = ControlKey.coerce(key)
    if key:
        return Gate(kind, (target,), theta, key)
    if kind is GateKind.KEYED_Z:
        return phase(target, math.pi)
    return Gate(_PLAIN_OF_KEYED[kind], (target,), theta)


@dataclass(frozen=True)
class Circuit:
    """順序付きゲート列（先頭のゲートが最初に作用する）"""
    num_qubits: int
    gates: Tuple[Gate, ...] = ()
    ancilla_qubits: Tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        object.__setattr__(self, "ancilla_qubits", tuple(self.ancilla_qubits))
        for gate in self.gates:
            for qubit in gate.qubits:
                if qubit >= self.num_qubits:
                    raise TermStructureError(
                        f"{gate.kind.value} の量子ビット {qubit} が回路幅 {self.num_qubits} を超えています")

    def __len__(self):
        return len(self.gates)

    def __iter__(self):
        return iter(self.gates)

    def then(self, other: Union["Circuit", Sequence[Gate]]) -> "Circuit":
        if isinstance(other, Circuit):
            width = max(self.num_qubits, other.num_qubits)
            ancillas = tuple(sorted(set(self.ancilla_qubits) | set(other.ancilla_qubits)))
            return Circuit(width, self.gates + other.gates, ancillas)
        return Circuit(self.num_qubits, self.gates + tuple(other), self.ancilla_qubits)

    def __add__(self, other):
        return self.then(other)

    def inverse(self) -> "Circuit":
        return Circuit(self.num_qubits, tuple(gate.inverse() for gate in reversed(self.gates)),
                       self.ancilla_qubits)

    def widened(self, num_qubits: int) -> "Circuit":
        return Circuit(max(num_qubits, self.num_qubits), self.gates, self.ancilla_qubits)


@dataclass(frozen=True)
class CountReport:
    per_kind: Dict[str, int] = field(default_factory=dict)
    per_arity: Dict[str, int] = field(default_factory=dict)
    two_qubit_count: int = 0
    multi_qubit_count: int = 0
    depth: int = 0
    rotation_count: int = 0
    ancilla_count: int = 0
    total_gates: int = 0

    def to_dict(self) -> dict:
        return {
            "per_kind": dict(sorted(self.per_kind.items())),
            "per_arity": dict(sorted(self.per_arity.items())),
            "two_qubit_count": self.two_qubit_count,
            "multi_qubit_count": self.multi_qubit_count,
            "depth": self.depth,
            "rotation_count": self.rotation_count,
            "ancilla_count": self.ancilla_count,
            "total_gates": self.total_gates,
        }


def count(circuit: Circuit) -> CountReport:
    """ゲート数・深さ（互いに素な量子ビット集合は同じ層）を集計"""
    per_kind: Counter = Counter()
    per_arity: Counter = Counter()
    levels = [0] * circuit.num_qubits
    depth = two_qubit = multi_qubit = rotations = 0
    for gate in circuit.gates:
        per_kind[gate.kind.value] += 1
        arity_label = f"{gate.kind.value}:{len(gate.key)}" if gate.is_keyed else gate.kind.value
        per_arity[arity_label] += 1
        width = len(gate.qubits)
        if width == 2:
            two_qubit += 1
        elif width >= 3:
            multi_qubit += 1
        if gate.is_rotation:
            rotations += 1
        if width:
            layer = max(levels[q] for q in gate.qubits) + 1
            for q in gate.qubits:
                levels[q] = layer
            depth = max(depth, layer)
    return CountReport(dict(per_kind), dict(per_arity), two_qubit, multi_qubit, depth, rotations,
                       len(circuit.ancilla_qubits), len(circuit.gates))


def _validate_qubits(qubits: Sequence[int]) -> Tuple[int, ...]:
    qubits = tuple(int(q) for q in qubits)
    if not qubits:
        raise TermStructureError("パリティネットワークには 1 つ以上の量子ビットが必要です")
    if len(set(qubits)) != len(qubits):
        raise TermStructureError(f"量子ビットが重複しています: {qubits}")
    return qubits


def _tree_layers(k: int) -> List[List[Tuple[int, int]]]:
    """ピラミッド構造の (親, 子) 位置ペアを層ごとに返す"""
    layers = []
    stride = 1
    while stride < k:
        layers.append([(i, i + stride) for i in range(0, k, 2 * stride) if i + stride < k])
        stride *= 2
    return layers


def parity_network(qubits: Sequence[int], topology: Union[ParityTopology, str] = ParityTopology.CHAIN,
                   num_qubits: Optional[int] = None) -> Tuple[Circuit, int]:
    """全入力の XOR を根（先頭の量子ビット）に集める CX ネットワーク"""
    qubits = _validate_qubits(qubits)
    topology = ParityTopology(topology)
    width = max(qubits) + 1 if num_qubits is None else num_qubits
    k = len(qubits)
    if topology is ParityTopology.CHAIN:
        gates = [cx(qubits[i], qubits[i - 1]) for i in range(k - 1, 0, -1)]
    else:
        gates = [cx(qubits[child], qubits[parent])
                 for layer in _tree_layers(k) for parent, child in layer]
    return Circuit(width, gates), qubits[0]


def difference_network(qubits: Sequence[int], topology: Union[ParityTopology, str] = ParityTopology.CHAIN,
                       num_qubits: Optional[int] = None) -> Tuple[Circuit, int]:
    """相補な状態対を根だけが異なる状態対へ写す CX ネットワーク

    根以外の各量子ビットには自身と親のビットの XOR が残る。
    """
    qubits = _validate_qubits(qubits)
    topology = ParityTopology(topology)
    width = max(qubits) + 1 if num_qubits is None else num_qubits
    k = len(qubits)
    if topology is ParityTopology.CHAIN:
        gates = [cx(qubits[i], qubits[i + 1]) for i in range(k - 2, -1, -1)]
    else:
        gates = [cx(qubits[parent], qubits[child])
                 for layer in _tree_layers(k) for parent, child in layer]
    return Circuit(width, gates), qubits[0]


def network_pattern(bits: Mapping[int, int], network: Circuit) -> Dict[int, int]:
    """計算基底のビットを CX ネットワークに通した結果"""
    state = dict(bits)
    for gate in network.gates:
        if gate.kind is not GateKind.CX:
            raise TermStructureError(f"CX 以外のゲートは追跡できません: {gate.kind.value}")
        control, target = gate.targets
        state[target] = state.get(target, 0) ^ state.get(control, 0)
    return state


def keyed_z(key: KeyLike, target: int, num_qubits: Optional[int] = None) -> Circuit:
    """I − 2|key,1⟩⟨key,1| : 0 のキー線を X で挟んだ全 1 制御 Z"""
    key = ControlKey.coerce(key)
    if not key:
        raise ControlKeyError("keyed_z には空でないキーが必要です")
    if target in key.qubits:
        raise ControlKeyError(f"ターゲット {target} が制御キーと重なっています")
    width = max(key.qubits + (target,)) + 1 if num_qubits is None else num_qubits
    flips = [x(q) for q, bit in key.bits if bit == 0]
    if len(key) == 1:
        core = cz(key.qubits[0], target)
    else:
        core = Gate(GateKind.KEYED_Z, (target,), key=ControlKey({q: 1 for q in key.qubits}))
    return Circuit(width, flips + [core] + flips)


def pattern_sign_flip(bits: KeyLike, num_qubits: Optional[int] = None) -> Circuit:
    """I − 2|bits⟩⟨bits| （指定した量子ビットだけに作用）"""
    bits = ControlKey.coerce(bits)
    if not bits:
        raise ControlKeyError("符号反転には空でないパターンが必要です")
    width = max(bits.qubits) + 1 if num_qubits is None else num_qubits
    target, target_bit = bits.bits[-1]
    rest = bits.without(target)
    wrap = [x(target)] if target_bit == 0 else []
    core = list(keyed_z(rest, target).gates) if rest else [phase(target, math.pi)]
    return Circuit(width, wrap + core + wrap)


def complementary_pair(a: KeyLike, b: KeyLike) -> Tuple[ControlKey, ControlKey]:
    a, b = ControlKey.coerce(a), ControlKey.coerce(b)
    if not a or a.qubits != b.qubits:
        raise ControlKeyError(f"状態対は同じ量子ビット集合上に必要です: {a.qubits} / {b.qubits}")
    if b != a.complement():
        raise ControlKeyError(f"状態対が相補ではありません: |{a.label()}⟩ / |{b.label()}⟩")
    return a, b


def _reduce_pair(a: ControlKey, topology, width: int) -> Tuple[Circuit, int, Dict[int, int]]:
    network, root = difference_network(a.qubits, topology, width)
    pattern = network_pattern(a.bit_map, network)
    pattern.pop(root)
    return network, root, pattern


def keyed_double_z(a: KeyLike, b: KeyLike, topology: Union[ParityTopology, str] = ParityTopology.CHAIN,
                   num_qubits: Optional[int] = None) -> Circuit:
    """I − 2(|a⟩⟨a| + |b⟩⟨b|) : 差分ネットワーク + 単一のキー付き Z + 逆計算"""
    a, b = complementary_pair(a, b)
    if len(a) == 1:
        raise ControlKeyError("1 量子ビットの状態対では縮約後のキーが空になります")
    width = max(a.qubits) + 1 if num_qubits is None else num_qubits
    network, _, pattern = _reduce_pair(a, topology, width)
    return network.then(pattern_sign_flip(pattern, width)).then(network.inverse())


def keyed_x_between(a: KeyLike, b: KeyLike, topology: Union[ParityTopology, str] = ParityTopology.CHAIN,
                     num_qubits: Optional[int] = None) -> Circuit:
    """|a⟩ と |b⟩ を入れ替え、他の状態は固定する"""
    a, b = complementary_pair(a, b)
    width = max(a.qubits) + 1 if num_qubits is None else num_qubits
    network, root, pattern = _reduce_pair(a, topology, width)
    center = Circuit(width, [keyed_gate(GateKind.KEYED_X, root, pattern)])
    return network.then(center).then(network.inverse())


def pauli_string_circuit(letters: Iterable[Tuple[int, object]], num_qubits: int) -> Circuit:
    """パウリ文字列そのもののユニタリ（Y = S·X·S†）"""
    gates: List[Gate] = []
    for qubit, letter in letters:
        name = getattr(letter, "value", letter)
        if name == "X":
            gates.append(x(qubit))
        elif name == "Y":
            gates.extend([sdg(qubit), x(qubit), s(qubit)])
        elif name == "Z":
            gates.append(phase(qubit, math.pi))
        elif name != "I":
            raise TermStructureError(f"パウリ文字ではありません: {name}")
    return Circuit(num_qubits, gates)
