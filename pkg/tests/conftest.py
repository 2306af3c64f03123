import pytest

from youngwalls.density import iterate_recurrence, polyo_2nx3_block

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def block():
    return polyo_2nx3_block()


@pytest.fixture(scope="session")
def tower(block):
    """Tower of the seven-cell block up to depth 11 (shared, read-only)."""
    return iterate_recurrence(block, 11)


@pytest.fixture(autouse=True)
def _isolated_cache(tmp_path, monkeypatch):
    monkeypatch.setenv("YOUNGWALLS_CACHE_DIR", str(tmp_path / "cache"))


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
