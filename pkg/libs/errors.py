"""
回路合成ライブラリ共通の例外定義
"""


class SynthError(Exception):
    """合成処理の基底例外"""


class SizeLimitError(SynthError):
    """密行列・状態ベクトルのサイズ上限超過"""


class NonHermitianError(SynthError):
    """エルミートでない演算子を受け取った"""


class UnsupportedFormalismError(SynthError):
    """対角でない因子を含む式の形式変換"""


class ControlKeyError(SynthError):
    """制御キーの重複・空キー・非相補な状態対"""


class TermStructureError(SynthError, ValueError):
    """項の添字や構造が不正"""


class ParseError(SynthError):
    """演算子文法の構文エラー（行・列つき）"""

    def __init__(self, message, line=1, column=1):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class VerificationError(SynthError):
    """オラクル比較が許容誤差を超えた"""

    def __init__(self, message, distance=None, tolerance=None):
        super().__init__(message)
        self.distance = distance
        self.tolerance = tolerance


class UsageError(SynthError):
    """コマンドライン引数の誤り"""
