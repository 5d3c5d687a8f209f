import os
import sys
import logging
from logging.handlers import RotatingFileHandler


class SynthLogger:
    def __init__(self, log_level=logging.INFO, log_dir="logs", max_log_size_mb=10, backup_count=3):
        self.log_dir = os.path.abspath(log_dir)
        self.log_file = os.path.join(self.log_dir, "scb_synth.log")
        self.log_level = log_level if isinstance(log_level, int) else logging.getLevelName(str(log_level).upper())
        self.max_bytes = int(max_log_size_mb * 1024 * 1024)
        self.backup_count = backup_count
        self.setup_logger()

    @classmethod
    def from_config(cls, logging_config: dict) -> "SynthLogger":
        """global_config.json の logging セクションから生成"""
        return cls(
            log_level=logging_config.get("level", "INFO"),
            log_dir=logging_config.get("directory", "logs"),
            max_log_size_mb=logging_config.get("max_log_size_mb", 10),
            backup_count=logging_config.get("backup_count", 3),
        )

    def setup_logger(self):
        """ログ設定を初期化"""
        os.makedirs(self.log_dir, exist_ok=True)

        formatter = logging.Formatter(
            '%(asctime)s - %(levelname)s - %(message)s',
            datefmt='%Y-%m-%d %H:%M:%S'
        )

        # ライブラリ側の scb_synth.* もこのハンドラに流れる
        self.logger = logging.getLogger('scb_synth')
        self.logger.setLevel(logging.DEBUG)
        for handler in list(self.logger.handlers):
            handler.close()
        self.logger.handlers.clear()
        self.logger.propagate = False

        file_handler = RotatingFileHandler(self.log_file, maxBytes=self.max_bytes,
                                           backupCount=self.backup_count, encoding='utf-8')
        file_handler.setFormatter(formatter)
        file_handler.setLevel(logging.DEBUG)
        self.logger.addHandler(file_handler)

        # 標準出力はコマンド出力専用なので stderr へ
        console_handler = logging.StreamHandler(sys.stderr)
        console_handler.setFormatter(formatter)
        console_handler.setLevel(self.log_level)
        self.logger.addHandler(console_handler)

    def info(self, message):
        self.logger.info(message)

    def error(self, message):
        self.logger.error(message)

    def warning(self, message):
        self.logger.warning(message)

    def debug(self, message):
        self.logger.debug(message)
