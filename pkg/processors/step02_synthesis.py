import logging

from libs.block_encoding import be_complex_term
from libs.hubo import gate_inventory, synthesize_hubo
from libs.operator_algebra import expansion_size, expr_to_pauli_sum
from libs.synth_direct import DirectSynthesisOptions
from libs.synth_usual import Strategy, TrotterPlan, trotter_product

logger = logging.getLogger("scb_synth.step02")


def process(pipeline_data):
    """Step02: 回路合成・パウリ展開・ブロック符号化"""
    try:
        command = pipeline_data['command']
        options = pipeline_data['options']
        source = pipeline_data['results']['step01_source_loader']
        expr = source['expr']

        logger.info(f"Step02 開始: {command} (戦略 {options['strategy']}, θ = {options['theta']})")

        synthesis_options = DirectSynthesisOptions(options['theta'], options['parity'], options['complex_mode'])
        result = {"circuit": None, "pauli_strings": None, "decompositions": None}

        if command == 'pauli':
            strings = expr_to_pauli_sum(expr, tolerance=pipeline_data['config']['tolerances']['merge'])
            result["pauli_strings"] = strings
            result["expansion_sizes"] = [expansion_size(term) for term in expr.terms]

        elif command == 'lcu':
            decompositions = []
            for term in expr.terms:
                decompositions.extend(be_complex_term(term, expr.num_qubits, options['parity']))
            result["decompositions"] = decompositions

        elif source['source_kind'] == 'hubo':
            problem = source['hubo']
            result["circuit"] = synthesize_hubo(problem, options['theta'], options['strategy'], options['parity'])
            result["inventory"] = gate_inventory(problem, options['strategy'], options['theta'])

        else:
            plan = _trotter_plan(options)
            result["plan"] = plan
            result["circuit"] = trotter_product(expr, plan, Strategy(options['strategy']), synthesis_options)

        logger.info(f"Step02 完了: {_describe(result)}")
        return result

    except Exception as e:
        logger.error(f"Step02 エラー: {e}")
        raise


def _trotter_plan(options):
    """θ を総時間とする積公式（synth / verify は既定で 1 ステップ 1 次）"""
    return TrotterPlan(order=options['order'], steps=options['steps'], time=options['theta'])


def _describe(result):
    if result["circuit"] is not None:
        return f"ゲート {len(result['circuit'])}"
    if result["pauli_strings"] is not None:
        return f"パウリ文字列 {len(result['pauli_strings'])}"
    if result["decompositions"] is not None:
        return f"LCU 分解 {len(result['decompositions'])}"
    return "回路なし"
