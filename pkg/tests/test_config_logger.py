import json
import logging

import pytest

from config_manager import DEFAULT_GLOBAL_CONFIG, SynthConfigManager
from logger import SynthLogger


@pytest.fixture
def manager(tmp_path):
    return SynthConfigManager(tmp_path / "config")


def read_log(synth_logger):
    for handler in synth_logger.logger.handlers:
        handler.flush()
    with open(synth_logger.log_file, encoding="utf-8") as f:
        return f.read()


class TestConfigManager:
    def test_defaults_written_on_first_load(self, manager):
        config = manager.load_global_config()
        assert config["defaults"]["theta"] == DEFAULT_GLOBAL_CONFIG["defaults"]["theta"]
        stored = json.loads(manager.global_config_path.read_text(encoding="utf-8"))
        assert stored["tolerances"]["verify"] == 1e-10
        assert stored["limits"]["max_dense_qubits"] == 12
        assert "last_updated" in stored

    def test_missing_keys_filled_from_defaults(self, manager):
        manager.global_config_path.write_text(
            json.dumps({"defaults": {"theta": 0.7}, "logging": {"level": "DEBUG"}}), encoding="utf-8")
        config = manager.load_global_config()
        assert config["defaults"]["theta"] == 0.7
        assert config["defaults"]["strategy"] == "direct"
        assert config["logging"]["level"] == "DEBUG"
        assert config["logging"]["backup_count"] == 3
        assert config["count_model"]["horizon"] == 64

    def test_saved_config_reloads(self, manager):
        config = manager.load_global_config()
        config["defaults"]["parity"] = "tree"
        manager.save_global_config(config)
        reloaded = manager.load_global_config()
        assert reloaded["defaults"]["parity"] == "tree"
        assert reloaded["defaults"]["order"] == 1

    def test_every_default_key_is_known(self, manager):
        config = manager.load_global_config()
        assert set(config["tolerances"]) == {"verify", "merge"}
        assert set(config["limits"]) == {"max_dense_qubits", "max_state_qubits"}
        assert set(config["count_model"]) == {"quadratic_only", "horizon"}

    def test_defaults_not_mutated(self, manager):
        config = manager.load_global_config()
        config["defaults"]["theta"] = 9.0
        assert DEFAULT_GLOBAL_CONFIG["defaults"]["theta"] == 0.1


class TestSynthLogger:
    def test_writes_log_file(self, tmp_path):
        synth_logger = SynthLogger(log_dir=tmp_path / "logs")
        synth_logger.info("合成開始")
        logging.getLogger("scb_synth.test").debug("ライブラリからのデバッグ")
        text = read_log(synth_logger)
        assert "合成開始" in text
        assert "ライブラリからのデバッグ" in text

    def test_level_from_config(self, tmp_path):
        synth_logger = SynthLogger.from_config({"level": "warning", "directory": str(tmp_path / "logs")})
        assert synth_logger.log_level == logging.WARNING
        assert synth_logger.log_file.endswith("scb_synth.log")

    def test_console_goes_to_stderr(self, tmp_path, capsys):
        synth_logger = SynthLogger(log_dir=tmp_path / "logs")
        synth_logger.warning("警告メッセージ")
        captured = capsys.readouterr()
        assert captured.out == ""

    def test_only_logging_api(self):
        assert not hasattr(SynthLogger, "get_recent_logs")
        assert not hasattr(SynthLogger, "clear_logs")
        assert not hasattr(SynthConfigManager, "update_global_config")
        assert not hasattr(SynthConfigManager, "load_config")
