import logging
from dataclasses import replace

import numpy as np

from libs.circuit_ir import PARAMETRIC_KINDS, Circuit, GateKind, x
from libs.finite_difference import stencil_dense
from libs.operator_algebra import dense_of_expr, sparse_of_expr
from libs.sim_oracle import (apply, circuit_unitary, expm_hermitian, expm_multiply_hermitian, phase_distance,
                             sample_states, state_phase_distance)

logger = logging.getLogger("scb_synth.step04")

MUTATION_SHIFT = 0.5
SAMPLE_SEED = 20240531


def process(pipeline_data):
    """Step04: 厳密オラクルとの比較（--mutate では単一ゲート変異の検出）"""
    try:
        command = pipeline_data['command']
        options = pipeline_data['options']
        config = pipeline_data['config']
        tolerance = config['tolerances']['verify']
        source = pipeline_data['results']['step01_source_loader']

        logger.info(f"Step04 開始: 検証 - {command}")

        if command == 'fd':
            difference = dense_of_expr(source['expr']).real - stencil_dense(source['grid'])
            distance = float(np.max(np.abs(difference))) if difference.size else 0.0
            result = _verdict(distance, tolerance)
        else:
            circuit = pipeline_data['results']['step02_synthesis']['circuit']
            measure = _make_oracle(source['expr'], options['theta'], config['limits'])
            result = _verdict(measure(circuit), tolerance)
            if options.get('mutate'):
                mutated, description = mutate_circuit(circuit)
                mutated_distance = measure(mutated)
                result["mutation"] = {"description": description, "distance": mutated_distance}
                # 変異を検出できたときだけ成功
                result["passed"] = mutated_distance >= tolerance
                logger.info(f"変異 {description}: 距離 {mutated_distance:.3e}")

        logger.info(f"Step04 完了: 距離 {result['distance']:.3e} ({'PASS' if result['passed'] else 'FAIL'})")
        return result

    except Exception as e:
        logger.error(f"Step04 エラー: {e}")
        raise


def _make_oracle(expr, theta, limits):
    """回路 → 位相距離 の関数を返す（大きな回路は状態ベクトルで比較）"""
    if expr.num_qubits <= limits['max_dense_qubits']:
        exact = expm_hermitian(dense_of_expr(expr), theta)
        return lambda circuit: phase_distance(circuit_unitary(circuit, limits['max_dense_qubits']), exact)

    h = sparse_of_expr(expr)
    states = sample_states(h, expr.num_qubits, np.random.default_rng(SAMPLE_SEED))
    expected = expm_multiply_hermitian(h, theta, states)
    logger.info(f"状態ベクトル検証: {expr.num_qubits} 量子ビット, {states.shape[1]} 状態")
    return lambda circuit: state_phase_distance(apply(circuit, states, limits['max_state_qubits']), expected)


def _verdict(distance, tolerance):
    return {"distance": distance, "tolerance": tolerance, "passed": distance < tolerance}


def mutate_circuit(circuit):
    """最初の非 GlobalPhase ゲートを 1 か所だけ壊す"""
    gates = list(circuit.gates)
    for index, gate in enumerate(gates):
        if gate.kind is GateKind.GLOBAL_PHASE:
            continue
        if gate.kind in PARAMETRIC_KINDS:
            gates[index] = replace(gate, theta=gate.theta + MUTATION_SHIFT)
            description = f"gate {index} {gate.kind.value} theta+{MUTATION_SHIFT}"
        else:
            gates.insert(index + 1, x(gate.targets[0]))
            description = f"insert X on {gate.targets[0]} after gate {index}"
        return Circuit(circuit.num_qubits, gates, circuit.ancilla_qubits), description
    return circuit.then([x(0)]), "append X on 0"
