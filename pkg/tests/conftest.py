import os
import sys
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings, strategies as st

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile(
    "default",
    max_examples=40,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

from qcrystal.cartan import builtin  # noqa: E402
from qcrystal.qarith import LaurentPoly  # noqa: E402


@pytest.fixture(params=["sl2", "imag2", "heis", "gkm2", "monster3"])
def any_datum(request):
    return builtin(request.param)


def laurent_polys(max_terms=4, lo=-3, hi=3, coeff=4, nonzero=False):
    terms = st.dictionaries(st.integers(lo, hi), st.integers(-coeff, coeff), max_size=max_terms)
    polys = terms.map(lambda d: LaurentPoly(d).to_scalar())
    if nonzero:
        polys = polys.filter(bool)
    return polys


def scalars(nonzero=False):
    """Random elements of Q(q): ratios of small Laurent polynomials."""
    out = st.builds(lambda a, b: a / b, laurent_polys(), laurent_polys(nonzero=True))
    if nonzero:
        out = out.filter(bool)
    return out


rationals = st.fractions(min_value=Fraction(1, 7), max_value=Fraction(6, 7), max_denominator=30)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
