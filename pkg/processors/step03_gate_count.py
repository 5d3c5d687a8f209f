import logging

from libs.circuit_ir import count
from libs.hubo import CountModel, compare_dense_costs, crossover_threshold, problem_costs

logger = logging.getLogger("scb_synth.step03")


def process(pipeline_data):
    """Step03: ゲート数集計（--compare では HUBO の 2 量子ビットゲート数モデルも）"""
    try:
        options = pipeline_data['options']
        source = pipeline_data['results']['step01_source_loader']
        circuit = pipeline_data['results']['step02_synthesis']['circuit']

        logger.info(f"Step03 開始: ゲート数集計 ({len(circuit)} ゲート)")
        result = {"counts": count(circuit), "comparison": None}

        if options.get('compare'):
            model = CountModel(**pipeline_data['config']['count_model'])
            threshold = crossover_threshold(model)
            comparison = {
                "crossover": threshold,
                "rows": compare_dense_costs(model, range(1, max(threshold, source['num_qubits']) + 3)),
                "note": f"direct method needs fewer two-qubit gates for every order >= {threshold}",
            }
            if source.get('hubo') is not None:
                comparison["problem"] = problem_costs(source['hubo'], model)
            result["comparison"] = comparison

        counts = result["counts"]
        logger.info(f"Step03 完了: 2 量子ビット {counts.two_qubit_count}, 深さ {counts.depth}")
        return result

    except Exception as e:
        logger.error(f"Step03 エラー: {e}")
        raise
