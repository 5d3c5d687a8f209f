import copy
import json
from datetime import datetime
from pathlib import Path

DEFAULT_GLOBAL_CONFIG = {
    "tolerances": {
        "verify": 1e-10,
        "merge": 1e-15,
    },
    "defaults": {
        "theta": 0.1,
        "strategy": "direct",
        "parity": "chain",
        "complex_mode": "exact",
        "steps": 1,
        "order": 1,
        "out": "text",
    },
    "limits": {
        "max_dense_qubits": 12,
        "max_state_qubits": 20,
    },
    "logging": {
        "level": "INFO",
        "directory": "logs",
        "max_log_size_mb": 10,
        "backup_count": 3,
    },
    "count_model": {
        "quadratic_only": False,
        "horizon": 64,
    },
}


def _deep_merge(base: dict, override: dict) -> dict:
    merged = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _deep_merge(merged[key], value)
        else:
            merged[key] = value
    return merged


class SynthConfigManager:
    def __init__(self, config_root="config"):
        self.config_root = Path(config_root)
        self.global_config_path = self.config_root / "global_config.json"

        # 設定ディレクトリ作成
        self.config_root.mkdir(parents=True, exist_ok=True)

    def load_global_config(self) -> dict:
        """グローバル設定を読み込み（不足キーはデフォルトで補完）"""
        if self.global_config_path.exists():
            with open(self.global_config_path, 'r', encoding='utf-8') as f:
                stored = json.load(f)
            return _deep_merge(DEFAULT_GLOBAL_CONFIG, stored)

        default_config = copy.deepcopy(DEFAULT_GLOBAL_CONFIG)
        self.save_global_config(default_config)
        return default_config

    def save_global_config(self, config: dict):
        """グローバル設定を保存"""
        config["last_updated"] = datetime.now().isoformat()
        with open(self.global_config_path, 'w', encoding='utf-8') as f:
            json.dump(config, f, ensure_ascii=False, indent=2)
