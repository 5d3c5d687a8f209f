import numpy as np
import pytest

from libs.operator_algebra import Symbol, Term

SYMBOLS = (Symbol.ID, Symbol.X, Symbol.Y, Symbol.Z, Symbol.NUM, Symbol.HOLE, Symbol.LOWER, Symbol.RAISE)
TRANSITIONS = (Symbol.LOWER, Symbol.RAISE)

# n0 o1 o2 X3 Y4 sd5 n6 s7 s8 s9 sd10 Y11 Z12 sd13 s14 + h.c.
FLAGSHIP_FACTORS = (
    (0, Symbol.NUM), (1, Symbol.HOLE), (2, Symbol.HOLE), (3, Symbol.X), (4, Symbol.Y),
    (5, Symbol.RAISE), (6, Symbol.NUM), (7, Symbol.LOWER), (8, Symbol.LOWER), (9, Symbol.LOWER),
    (10, Symbol.RAISE), (11, Symbol.Y), (12, Symbol.Z), (13, Symbol.RAISE), (14, Symbol.LOWER),
)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def flagship_term():
    """15 量子ビットの 4 族混在項（複素係数）"""
    return Term(complex(0.3, 0.4), FLAGSHIP_FACTORS, hermitized=True)


@pytest.fixture
def flagship_real_term():
    return Term(0.7, FLAGSHIP_FACTORS, hermitized=True)


def random_term(rng, num_qubits, complex_coefficient=False, require_transition=False):
    symbols = [SYMBOLS[i] for i in rng.integers(0, len(SYMBOLS), size=num_qubits)]
    if (require_transition or complex_coefficient) and not any(s in TRANSITIONS for s in symbols):
        symbols[int(rng.integers(0, num_qubits))] = TRANSITIONS[int(rng.integers(0, 2))]
    real = float(rng.uniform(-1.5, 1.5))
    coefficient = complex(real, float(rng.uniform(-1.5, 1.5))) if complex_coefficient else real
    return Term(coefficient, list(enumerate(symbols)), hermitized=True)


@pytest.fixture
def make_term(rng):
    """make_term(num_qubits, complex_coefficient=False, require_transition=False)"""
    def factory(num_qubits, complex_coefficient=False, require_transition=False):
        return random_term(rng, num_qubits, complex_coefficient, require_transition)
    return factory
