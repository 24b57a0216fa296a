import os

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", max_examples=40, deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.function_scoped_fixture],
)
settings.register_profile("thorough", max_examples=400, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture(autouse=True)
def _bundled_data(monkeypatch):
    """Tests see the bundled data unless they point SECTOR_DOUBLER_DATA elsewhere themselves."""
    monkeypatch.delenv("SECTOR_DOUBLER_DATA", raising=False)


_ACCEPTANCE = pytest.StashKey[dict]()


@pytest.fixture
def acceptance_lines(request) -> dict:
    """Criterion number -> one PASS/FAIL line, printed in the terminal summary."""
    stash = request.config.stash
    if _ACCEPTANCE not in stash:
        stash[_ACCEPTANCE] = {}
    return stash[_ACCEPTANCE]


def pytest_terminal_summary(terminalreporter):
    lines = terminalreporter.config.stash.get(_ACCEPTANCE, {})
    if lines:
        terminalreporter.section("acceptance criteria")
        for k in sorted(lines):
            terminalreporter.write_line(lines[k])
