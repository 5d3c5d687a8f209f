import logging
import sys
from pathlib import Path

from libs import circuit_format
from libs.errors import VerificationError
from libs.expression_parser import format_expr

logger = logging.getLogger("scb_synth.step05")


def process(pipeline_data):
    """Step05: テキスト / JSON レポートを標準出力またはファイルへ書き出す"""
    try:
        command = pipeline_data['command']
        options = pipeline_data['options']
        results = pipeline_data['results']

        logger.info(f"Step05 開始: レポート出力 ({options['out']})")

        if options['out'] == 'json':
            text = circuit_format.dumps(build_report(command, results))
        else:
            text = render_text(command, results)

        output = options.get('output')
        if output:
            Path(output).write_text(text, encoding='utf-8')
            logger.info(f"出力ファイル: {output}")
        else:
            sys.stdout.write(text)

        verification = results.get('step04_verification')
        if verification is not None and not verification['passed']:
            raise VerificationError(
                f"検証失敗: phase_distance = {verification['distance']:.3e} (許容 {verification['tolerance']:.1e})",
                verification['distance'], verification['tolerance'])

        logger.info("Step05 完了")
        return {"text": text, "output": output}

    except Exception as e:
        logger.error(f"Step05 エラー: {e}")
        raise


def render_text(command, results):
    source = results['step01_source_loader']
    synthesis = results.get('step02_synthesis')
    counting = results.get('step03_gate_count')
    verification = results.get('step04_verification')

    if command == 'pauli':
        return circuit_format.render_pauli(synthesis['pauli_strings'], source['num_qubits'])

    if command == 'lcu':
        return "".join(
            circuit_format.render_lcu(d.pairs, d.one_norm(),
                                      d.reconstruction_error() if d.target_dense is not None else None)
            for d in synthesis['decompositions'])

    if command == 'fd':
        return format_expr(source['expr']) + "\n" + circuit_format.render_verification(
            verification['distance'], verification['tolerance'])

    if command == 'verify':
        text = circuit_format.render_verification(verification['distance'], verification['tolerance'])
        if 'mutation' in verification:
            mutation = verification['mutation']
            text += circuit_format.render_mutation(mutation['description'], mutation['distance'],
                                                   verification['tolerance'])
        return text

    if command == 'count':
        text = circuit_format.render_counts(counting['counts'])
        comparison = counting['comparison']
        if comparison is not None:
            text += circuit_format.render_comparison(comparison['rows'], comparison['crossover'])
            if 'problem' in comparison:
                text += f"problem: direct={comparison['problem']['direct']} usual={comparison['problem']['usual']}\n"
        return text

    text = circuit_format.render_listing(synthesis['circuit'])
    for label, angle in synthesis.get('inventory') or []:
        text += f"# {label} {circuit_format.format_float(angle)}\n"
    return text


def build_report(command, results):
    source = results['step01_source_loader']
    synthesis = results.get('step02_synthesis')
    counting = results.get('step03_gate_count')
    verification = results.get('step04_verification')

    if command == 'pauli':
        return {
            "num_qubits": source['num_qubits'],
            "expansion_sizes": synthesis['expansion_sizes'],
            "strings": [{"coefficient": circuit_format.pauli_coefficient_text(ps.coefficient),
                         "label": ps.label(source['num_qubits'])} for ps in synthesis['pauli_strings']],
        }

    if command == 'lcu':
        return {"decompositions": [_decomposition_report(d) for d in synthesis['decompositions']]}

    if command == 'fd':
        return {
            "expression": format_expr(source['expr']),
            "num_qubits": source['num_qubits'],
            "terms": len(source['expr']),
            "verification": {"distance": verification['distance'], "tolerance": verification['tolerance'],
                             "pass": verification['passed']},
        }

    extra = {"circuit": [circuit_format.gate_line(gate) for gate in synthesis['circuit'].gates]}
    if synthesis.get('inventory'):
        extra["inventory"] = [[label, angle] for label, angle in synthesis['inventory']]
    if counting is not None and counting['comparison'] is not None:
        extra["comparison"] = counting['comparison']
    report = circuit_format.build_json_report(counting['counts'], verification, **extra)
    if verification is not None and 'mutation' in verification:
        report["mutation"] = {"description": verification['mutation']['description'],
                              "distance": verification['mutation']['distance'],
                              "detected": verification['passed']}
    return report


def _decomposition_report(decomposition):
    report = {
        "one_norm": decomposition.one_norm(),
        "pairs": [{"coefficient": coefficient,
                   "circuit": [circuit_format.gate_line(gate) for gate in circuit.gates]}
                  for coefficient, circuit in decomposition.pairs],
    }
    if decomposition.target_dense is not None:
        report["reconstruction_error"] = decomposition.reconstruction_error()
    return report
