import pytest

_ACCEPTANCE_KEY = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_ACCEPTANCE_KEY] = []


@pytest.fixture
def acceptance_log(request):
    """Append ``(criterion, passed, detail)`` lines for the end-of-run summary."""
    lines = request.config.stash[_ACCEPTANCE_KEY]

    def log(criterion, passed, detail=""):
        lines.append(f"[{'PASS' if passed else 'FAIL'}] {criterion}: {detail}")

    return log


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_ACCEPTANCE_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
