import pytest

from cohstates.numerics import gauss_halfline_rule
from cohstates.susy import q4_model
from cohstates.utils import set_verbose


@pytest.fixture(autouse=True)
def _silencio():
    set_verbose(False)
    yield
    set_verbose(True)


@pytest.fixture(scope="session")
def model():
    return q4_model()


@pytest.fixture(scope="session")
def rule():
    return gauss_halfline_rule()
