import pytest

ACCEPTANCE = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[ACCEPTANCE] = []


@pytest.fixture
def acceptance(request):
    """Record one pass/fail line for an acceptance criterion."""
    lines = request.config.stash[ACCEPTANCE]

    def record(number, title, failures, info=""):
        status = "PASS" if not failures else "FAIL"
        detail = "; ".join(failures) if failures else info
        line = f"criterion {number:>2}: {status}  {title}" + (f"  [{detail}]" if detail else "")
        lines.append((number, line))
        print(line)
        assert not failures, line

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)
