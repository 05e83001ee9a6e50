import pytest

from freecumulants.checks import ALL_CHECKS


@pytest.fixture(scope="session")
def default_reports():
    """Every identity check once, at default bounds; shared across files."""
    return {name: fn() for name, fn in ALL_CHECKS.items()}
