import pytest

from medwit.circuits import build_staged, exhaustive_patterns
from medwit.density import basis_density, temporal_average
from medwit.pauli import BasisState


@pytest.fixture(scope="session")
def exhaustive_average_1100():
    """Exhaustively averaged final state of the 8-stage dephased run from |1100>."""
    initial = basis_density(BasisState.from_string("1100"))
    patterns = exhaustive_patterns(8)
    return temporal_average(lambda pat: build_staged(8, pat), patterns, initial)
