import importlib
import sys
import os
from datetime import datetime

# サブコマンドごとのステップ構成
STEP_PLANS = {
    'synth': ['step01_source_loader', 'step02_synthesis', 'step03_gate_count', 'step05_report_writer'],
    'pauli': ['step01_source_loader', 'step02_synthesis', 'step05_report_writer'],
    'lcu': ['step01_source_loader', 'step02_synthesis', 'step05_report_writer'],
    'trotter': ['step01_source_loader', 'step02_synthesis', 'step03_gate_count', 'step05_report_writer'],
    'count': ['step01_source_loader', 'step02_synthesis', 'step03_gate_count', 'step05_report_writer'],
    'verify': ['step01_source_loader', 'step02_synthesis', 'step03_gate_count', 'step04_verification',
               'step05_report_writer'],
    'hubo': ['step01_source_loader', 'step02_synthesis', 'step03_gate_count', 'step05_report_writer'],
    'fermion': ['step01_source_loader', 'step02_synthesis', 'step03_gate_count', 'step05_report_writer'],
    'fd': ['step01_source_loader', 'step04_verification', 'step05_report_writer'],
}


class PipelineExecutor:
    def __init__(self, config_manager, logger):
        self.config_manager = config_manager
        self.logger = logger

        # processorsディレクトリをパスに追加
        processors_path = os.path.join(os.path.dirname(__file__), 'processors')
        if processors_path not in sys.path:
            sys.path.append(processors_path)

    def execute_pipeline(self, command, options):
        """パイプライン実行"""
        if command not in STEP_PLANS:
            raise KeyError(f"未知のコマンドです: {command}")
        try:
            self.logger.info(f"パイプライン開始: {command}")

            pipeline_data = {
                'command': command,
                'options': options,
                'config': self.config_manager.load_global_config(),
                'start_time': datetime.now(),
                'results': {}
            }

            for step_name in STEP_PLANS[command]:
                try:
                    self.logger.info(f"実行中: {step_name}")
                    module = importlib.import_module(f"processors.{step_name}")
                    result = module.process(pipeline_data)
                    pipeline_data['results'][step_name] = result
                    self.logger.info(f"完了: {step_name}")
                except Exception as e:
                    self.logger.error(f"ステップ実行エラー: {step_name} - {str(e)}")
                    raise

            total_time = (datetime.now() - pipeline_data['start_time']).total_seconds()
            self.logger.info(f"パイプライン完了: {command} (処理時間: {total_time:.2f}秒)")
            self.logger.info(f"パイプライン結果: {self._generate_pipeline_summary(pipeline_data['results'])}")
            return pipeline_data['results']

        except Exception as e:
            self.logger.error(f"パイプライン実行エラー: {command} - {str(e)}")
            raise

    def _generate_pipeline_summary(self, results):
        """パイプライン実行結果のサマリーを生成"""
        summary_parts = []

        if 'step01_source_loader' in results:
            step01 = results['step01_source_loader']
            summary_parts.append(f"入力={step01.get('source_kind')}({step01.get('num_qubits')}量子ビット)")

        if 'step02_synthesis' in results:
            step02 = results['step02_synthesis']
            if step02.get('circuit') is not None:
                summary_parts.append(f"ゲート={len(step02['circuit'])}")
            if step02.get('pauli_strings') is not None:
                summary_parts.append(f"パウリ文字列={len(step02['pauli_strings'])}")
            if step02.get('decompositions') is not None:
                summary_parts.append(f"LCU分解={len(step02['decompositions'])}")

        if 'step03_gate_count' in results:
            step03 = results['step03_gate_count']
            summary_parts.append(f"2量子ビット={step03['counts'].two_qubit_count}")

        if 'step04_verification' in results:
            step04 = results['step04_verification']
            summary_parts.append("検証=PASS" if step04.get('passed') else "検証=FAIL")

        return ", ".join(summary_parts) if summary_parts else "結果なし"
