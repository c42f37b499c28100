"""Shared fixtures and the fixed hypothesis profile."""

import pytest
from hypothesis import HealthCheck, settings

from stackel import FunctionField
from stackel.catalog import load_example

settings.register_profile(
    "stackel", max_examples=100, derandomize=True, deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("stackel")


@pytest.fixture(scope="session")
def example():
    """``example(n)`` returns the parsed catalog system ``n``."""
    return load_example


@pytest.fixture
def field():
    return FunctionField(("x1", "x2"), ("a", "b"))


@pytest.fixture
def phase_field():
    return FunctionField(("x1", "x2"), ("a", "b")).with_momenta()


def pytest_terminal_summary(terminalreporter):
    """Print the acceptance lines together at the end of the run."""
    mod = __import__("sys").modules.get("test_acceptance") or __import__("sys").modules.get(
        "tests.test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
