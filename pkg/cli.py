"""
コマンドライン入口（サブコマンド → パイプライン実行 → 終了コード）
"""
import argparse
import sys

from config_manager import SynthConfigManager
from libs.errors import ParseError, SynthError, UsageError, VerificationError
from logger import SynthLogger
from pipeline import PipelineExecutor, STEP_PLANS

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_PARSE = 2
EXIT_VERIFICATION = 3

COMMAND_HELP = {
    'synth': "単一項ごとの厳密回路を合成",
    'pauli': "パウリ文字列の和に展開",
    'lcu': "6 ユニタリ以下の LCU ブロック符号化",
    'trotter': "積公式による時間発展回路",
    'count': "ゲート数集計（--compare で HUBO コストモデル）",
    'verify': "行列指数オラクルとの位相距離検証",
    'hubo': "HUBO 問題の位相分離回路",
    'fermion': "フェルミオン第二量子化ハミルトニアン",
    'fd': "差分法ラプラシアンの組み立てと検証",
}


class SynthArgumentParser(argparse.ArgumentParser):
    """argparse のエラーを SystemExit ではなく UsageError で返す"""

    def error(self, message):
        raise UsageError(message)


def _add_common_arguments(parser):
    parser.add_argument("-e", "--expression", help="演算子式（例: \"0.5 * n0 s1 sd2 X3 + h.c.\"）")
    parser.add_argument("--file", help="入力ファイル（式 / フェルミオン項 / 格子）")
    parser.add_argument("--theta", type=float, help="発展時間 θ（exp(-iθH)）")
    parser.add_argument("--strategy", choices=["direct", "usual"], help="合成戦略")
    parser.add_argument("--parity", choices=["chain", "tree"], help="パリティ回路のトポロジ")
    parser.add_argument("--complex-mode", dest="complex_mode", choices=["exact", "split"],
                        help="複素係数の回転軸の扱い")
    parser.add_argument("--steps", type=int, help="積公式のステップ数")
    parser.add_argument("--order", type=int, choices=[1, 2], help="積公式の次数")
    parser.add_argument("--out", choices=["text", "json"], help="出力形式")
    parser.add_argument("--output", help="出力ファイル（省略時は標準出力）")


def build_parser():
    parser = SynthArgumentParser(
        prog="scb-synth",
        description="Single Component Basis Hamiltonian simulation circuit synthesis",
    )
    parser.add_argument("--config", default="config", help="設定ディレクトリ（default: config）")
    subparsers = parser.add_subparsers(dest="command", parser_class=SynthArgumentParser)

    for command in STEP_PLANS:
        sub = subparsers.add_parser(command, help=COMMAND_HELP[command])
        _add_common_arguments(sub)
        if command in ('count', 'hubo'):
            sub.add_argument("--hubo", help="HUBO 重みファイル")
        if command == 'count':
            sub.add_argument("--compare", action="store_true", help="直接法と通常法の 2 量子ビットゲート数比較")
        if command == 'verify':
            sub.add_argument("--mutate", action="store_true", help="単一ゲート変異の検出テスト")
        if command == 'fd':
            sub.add_argument("--expanded", action="store_true", help="一様係数も格子ごとに展開して出力")

    return parser


def resolve_options(args, defaults):
    """未指定のフラグを設定ファイルの defaults で補完"""
    options = {key: value for key, value in vars(args).items() if key not in ('command', 'config')}
    for key, value in defaults.items():
        if options.get(key) is None:
            options[key] = value
    if options['steps'] < 1:
        raise UsageError(f"--steps は 1 以上が必要です: {options['steps']}")
    return options


def run(argv=None):
    """CLI を実行して終了コードを返す"""
    try:
        args = build_parser().parse_args(argv)
        if args.command is None:
            raise UsageError("サブコマンドを指定してください: " + " | ".join(STEP_PLANS))

        config_manager = SynthConfigManager(args.config)
        config = config_manager.load_global_config()
        logger = SynthLogger.from_config(config['logging'])
        options = resolve_options(args, config['defaults'])

        PipelineExecutor(config_manager, logger).execute_pipeline(args.command, options)
        return EXIT_OK

    except ParseError as e:
        print(f"parse error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except VerificationError as e:
        print(f"verification failed: {e}", file=sys.stderr)
        return EXIT_VERIFICATION
    except (SynthError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
