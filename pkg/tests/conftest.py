import os
import random

import pytest
from hypothesis import HealthCheck, settings, strategies as st

from nsplab.corpus import random_program

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
TERMS = os.path.join(ROOT, "terms")


def programs(lang, depth=3, products=False):
    """Hypothesis strategy: corpus programs of ``lang`` drawn by seed."""
    return st.integers(0, 2 ** 32).map(
        lambda s: random_program(random.Random(s), lang, depth, products))


def term_path(name):
    return os.path.join(TERMS, name)


@pytest.fixture
def load_term():
    from nsplab.syntax import parse_file
    return lambda name: parse_file(term_path(name))


# one line per acceptance criterion, printed after the run
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[n])
