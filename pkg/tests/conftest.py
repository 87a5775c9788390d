import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None)
settings.load_profile("default")

_REPORT_KEY = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_REPORT_KEY] = []


@pytest.fixture
def acceptance_report(request):
    """Callable that records one acceptance line and prints it immediately."""
    lines = request.config.stash[_REPORT_KEY]

    def report(number: int, title: str, passed: bool | None, detail: str) -> None:
        status = "REPORT" if passed is None else ("PASS" if passed else "FAIL")
        line = f"criterion {number:>2} {status:<6} {title}: {detail}"
        lines.append((number, line))
        print(line)

    return report


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_REPORT_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)
