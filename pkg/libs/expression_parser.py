"""
演算子式の文法（pyparsing）と整形出力

    expr   := term (('+' | '-') term)*
    term   := [coeff '*'] factor+ ['+' 'h.c.']
    coeff  := float | '(' float ('+' | '-') float 'i' ')'
    factor := ('I' | 'X' | 'Y' | 'Z' | 'n' | 'o' | 's' | 'sd') 非負整数
"""
import logging
from dataclasses import dataclass
from typing import List, Tuple

import pyparsing as pp

from libs.errors import ParseError
from libs.operator_algebra import HamiltonianExpr, Symbol, Term

logger = logging.getLogger("scb_synth.parser")

_NUMBER = r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"


@dataclass(frozen=True)
class RawTerm:
    sign: float
    coefficient: complex
    factors: Tuple[Tuple[int, Symbol], ...]
    hermitized: bool
    location: int


@dataclass(frozen=True)
class SourceExpr:
    """元テキスト・構文解析結果・各項の (行, 列)"""
    text: str
    expr: HamiltonianExpr
    spans: Tuple[Tuple[int, int], ...]


def make_grammar() -> pp.ParserElement:
    real = pp.Regex(rf"[+-]?{_NUMBER}")
    real.set_parse_action(lambda toks: complex(float(toks[0]), 0.0))
    imaginary = pp.Regex(rf"\(\s*(?P<re>[+-]?{_NUMBER})\s*(?P<sign>[+-])\s*(?P<im>{_NUMBER})\s*i\s*\)")
    imaginary.set_parse_action(
        lambda toks: complex(float(toks["re"]), float(toks["im"]) * (-1.0 if toks["sign"] == "-" else 1.0)))
    coefficient = (imaginary | real)("coefficient")

    factor = pp.Regex(r"(?P<symbol>sd|[IXYZnos])(?P<index>\d+)(?![A-Za-z])")
    factor.set_parse_action(lambda toks: [(int(toks["index"]), Symbol(toks["symbol"]))])

    hermitian_conjugate = pp.Regex(r"\+\s*h\.c\.")("hc")
    term = pp.Group(pp.Opt(coefficient + pp.Suppress("*"))
                    + pp.Group(pp.OneOrMore(factor))("factors")
                    + pp.Opt(hermitian_conjugate))

    def locate(s, loc, toks):
        toks[0]["location"] = loc

    term.set_parse_action(locate)
    sign = pp.one_of("+ -")
    first = pp.Group(pp.Opt(sign)("sign") + term("term"))
    rest = pp.Group(sign("sign") + term("term"))
    return first + pp.ZeroOrMore(rest)


_GRAMMAR = make_grammar()


def _raw_terms(text: str) -> List[RawTerm]:
    try:
        results = _GRAMMAR.parse_string(text, parse_all=True)
    except pp.ParseBaseException as e:
        raise ParseError(f"構文エラー: {e.msg}", e.lineno, e.col) from e
    raw = []
    for group in results:
        term = group["term"]
        sign = -1.0 if group.get("sign") == "-" else 1.0
        coefficient = term.get("coefficient", complex(1.0, 0.0))
        raw.append(RawTerm(sign, coefficient, tuple(term["factors"]), "hc" in term, term["location"]))
    return raw


def parse_source(text: str) -> SourceExpr:
    terms, spans = [], []
    for raw in _raw_terms(text):
        line, column = pp.lineno(raw.location, text), pp.col(raw.location, text)
        indices = [index for index, _ in raw.factors]
        duplicates = sorted({index for index in indices if indices.count(index) > 1})
        if duplicates:
            raise ParseError(f"同じ項で量子ビット添字が重複しています: {duplicates}", line, column)
        terms.append(Term(raw.sign * raw.coefficient, raw.factors, hermitized=raw.hermitized))
        spans.append((line, column))
    expr = HamiltonianExpr.from_terms(terms).merged()
    logger.debug(f"構文解析: 項 {len(terms)} → 統合後 {len(expr)}")
    return SourceExpr(text, expr, tuple(spans))


def parse(text: str) -> HamiltonianExpr:
    return parse_source(text).expr


def format_coefficient(value: complex) -> str:
    value = complex(value)
    if value.imag == 0.0:
        return repr(value.real)
    sign = "-" if value.imag < 0 else "+"
    return f"({value.real!r}{sign}{abs(value.imag)!r}i)"


def format_term(term: Term) -> str:
    factors = " ".join(f"{symbol.value}{index}" for index, symbol in term.factors) or "I0"
    text = f"{format_coefficient(term.coefficient)} * {factors}"
    return text + " + h.c." if term.hermitized else text


def format_expr(expr: HamiltonianExpr) -> str:
    """parse で読み戻せる形の文字列"""
    if not expr.terms:
        return "0.0 * I0"
    return " + ".join(format_term(term) for term in expr.terms)
