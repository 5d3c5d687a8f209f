"""
回路リストとレポートの整形（jinja2 テンプレート）

回路リストは 1 行 1 ゲート:
    KIND targets=[…] key={q:b,…} theta=<17 桁>
（存在する項目だけを出力する）
"""
import json
import logging
from typing import Iterable, List, Optional, Sequence, Tuple

from jinja2 import DictLoader, Environment, StrictUndefined

from libs.circuit_ir import Circuit, CountReport, Gate
from libs.operator_algebra import PauliString

logger = logging.getLogger("scb_synth.format")

TEMPLATES = {
    "listing.txt": (
        "# qubits={{ num_qubits }} gates={{ gates|length }}"
        "{% if ancillas %} ancillas={{ ancillas|join(',') }}{% endif %}\n"
        "{% for line in gates %}{{ line }}\n{% endfor %}"
    ),
    "counts.txt": (
        "total_gates: {{ counts.total_gates }}\n"
        "two_qubit_count: {{ counts.two_qubit_count }}\n"
        "multi_qubit_count: {{ counts.multi_qubit_count }}\n"
        "depth: {{ counts.depth }}\n"
        "rotation_count: {{ counts.rotation_count }}\n"
        "ancilla_count: {{ counts.ancilla_count }}\n"
        "{% for kind, n in counts.per_arity|dictsort %}gate {{ kind }}: {{ n }}\n{% endfor %}"
    ),
    "verification.txt": (
        "phase_distance: {{ distance|g17 }} {{ '<' if passed else '>=' }} {{ tolerance|g17 }}: "
        "{{ 'PASS' if passed else 'FAIL' }}\n"
    ),
    "mutation.txt": (
        "mutation: {{ description }}\n"
        "phase_distance: {{ distance|g17 }} {{ '<' if passed else '>=' }} {{ tolerance|g17 }}: "
        "{{ 'PASS' if passed else 'FAIL' }}\n"
        "mutation_detected: {{ 'no' if passed else 'yes' }}\n"
    ),
    "pauli.txt": "{% for coefficient, label in strings %}{{ coefficient }} * {{ label }}\n{% endfor %}",
    "lcu.txt": (
        "# pairs={{ pairs|length }} one_norm={{ one_norm|g17 }}"
        "{% if error is not none %} reconstruction_error={{ error|g17 }}{% endif %}\n"
        "{% for coefficient, lines in pairs %}"
        "pair {{ loop.index0 }} coefficient={{ coefficient|g17 }}\n"
        "{% for line in lines %}  {{ line }}\n{% endfor %}"
        "{% endfor %}"
    ),
    "comparison.txt": (
        "{% for row in rows %}"
        "order {{ row.order }}: direct={{ row.direct }} usual={{ row.usual }}"
        "{% if row.direct_wins %} direct_wins{% endif %}\n"
        "{% endfor %}"
        "crossover: {{ crossover }}\n"
    ),
}


def format_float(value: float) -> str:
    return format(float(value), ".17g")


_environment = Environment(loader=DictLoader(TEMPLATES), keep_trailing_newline=True,
                           undefined=StrictUndefined, autoescape=False)
_environment.filters["g17"] = format_float


def render(template: str, **context) -> str:
    return _environment.get_template(template).render(**context)


def gate_line(gate: Gate) -> str:
    parts = [gate.kind.value]
    if gate.targets:
        parts.append("targets=[" + ",".join(str(t) for t in gate.targets) + "]")
    if gate.key:
        parts.append("key={" + ",".join(f"{q}:{b}" for q, b in gate.key.bits) + "}")
    if gate.theta is not None:
        parts.append(f"theta={format_float(gate.theta)}")
    return " ".join(parts)


def render_listing(circuit: Circuit) -> str:
    return render("listing.txt", num_qubits=circuit.num_qubits, ancillas=circuit.ancilla_qubits,
                  gates=[gate_line(gate) for gate in circuit.gates])


def render_counts(counts: CountReport) -> str:
    return render("counts.txt", counts=counts)


def render_verification(distance: float, tolerance: float) -> str:
    return render("verification.txt", distance=distance, tolerance=tolerance, passed=distance < tolerance)


def render_mutation(description: str, distance: float, tolerance: float) -> str:
    return render("mutation.txt", description=description, distance=distance, tolerance=tolerance,
                  passed=distance < tolerance)


def pauli_coefficient_text(value: complex) -> str:
    value = complex(value)
    if value.imag == 0.0:
        return format_float(value.real)
    sign = "-" if value.imag < 0 else "+"
    return f"({format_float(value.real)}{sign}{format_float(abs(value.imag))}i)"


def render_pauli(strings: Sequence[PauliString], num_qubits: int) -> str:
    rows = [(pauli_coefficient_text(ps.coefficient), ps.label(num_qubits)) for ps in strings]
    return render("pauli.txt", strings=rows)


def render_lcu(pairs: Iterable[Tuple[float, Circuit]], one_norm: float, error: Optional[float] = None) -> str:
    rows = [(coefficient, [gate_line(gate) for gate in circuit.gates]) for coefficient, circuit in pairs]
    return render("lcu.txt", pairs=rows, one_norm=one_norm, error=error)


def render_comparison(rows: List[dict], crossover: int) -> str:
    return render("comparison.txt", rows=rows, crossover=crossover)


def build_json_report(counts: CountReport, verification: Optional[dict] = None, **extra) -> dict:
    """{counts, depth, rotations, verification:{distance, tolerance, pass}} + 追加項目"""
    report = {
        "counts": counts.to_dict(),
        "depth": counts.depth,
        "rotations": counts.rotation_count,
    }
    if verification is not None:
        report["verification"] = {
            "distance": float(verification["distance"]),
            "tolerance": float(verification["tolerance"]),
            "pass": bool(verification["distance"] < verification["tolerance"]),
        }
    report.update(extra)
    return report


def dumps(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"
