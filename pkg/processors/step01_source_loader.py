import logging
from pathlib import Path

from libs.errors import UsageError
from libs.expression_parser import parse_source
from libs.fermion import load_fermion_expression
from libs.finite_difference import assemble, load_grid
from libs.hubo import build_expr, load_hubo

logger = logging.getLogger("scb_synth.step01")

EXPRESSION_COMMANDS = ('synth', 'pauli', 'lcu', 'trotter', 'count', 'verify')


def process(pipeline_data):
    """Step01: 入力（-e 式 / 式ファイル / HUBO / フェルミオン / 格子）の読み込み"""
    try:
        command = pipeline_data['command']
        options = pipeline_data['options']

        logger.info(f"Step01 開始: 入力読み込み - {command}")

        if command == 'hubo' or (command == 'count' and options.get('hubo')):
            path = options.get('hubo') or options.get('file')
            _require(path, "HUBO ファイル (--hubo) が必要です")
            problem = load_hubo(path)
            result = _result('hubo', build_expr(problem), hubo=problem)

        elif command == 'fermion':
            _require(options.get('file'), "フェルミオン項ファイル (--file) が必要です")
            result = _result('fermion', load_fermion_expression(options['file']))

        elif command == 'fd':
            _require(options.get('file'), "格子ファイル (--file) が必要です")
            grid = load_grid(options['file'])
            expr = assemble(grid, compact=not options.get('expanded', False))
            result = _result('grid', expr, grid=grid)

        elif command in EXPRESSION_COMMANDS:
            text = _expression_text(options)
            source = parse_source(text)
            result = _result('expr', source.expr, source=source)

        else:
            raise UsageError(f"未知のコマンドです: {command}")

        logger.info(f"Step01 完了: 項 {len(result['expr'])}, 量子ビット {result['num_qubits']}")
        return result

    except Exception as e:
        logger.error(f"Step01 エラー: {e}")
        raise


def _require(value, message):
    if not value:
        raise UsageError(message)


def _expression_text(options):
    expression, path = options.get('expression'), options.get('file')
    if expression is not None and path is not None:
        raise UsageError("-e と --file は同時に指定できません")
    if expression is not None:
        return expression
    if path is not None:
        return Path(path).read_text(encoding='utf-8')
    raise UsageError("演算子式 (-e) または式ファイル (--file) が必要です")


def _result(kind, expr, **extra):
    result = {
        "source_kind": kind,
        "expr": expr,
        "num_qubits": expr.num_qubits,
    }
    result.update(extra)
    return result
