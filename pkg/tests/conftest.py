import pytest

ACCEPTANCE = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[ACCEPTANCE] = []


@pytest.fixture
def criterion(request):
    """record(n, status, text) prints one acceptance line and keeps it for the summary."""
    lines = request.config.stash[ACCEPTANCE]

    def record(n, status, text):
        if status is True:
            status = "PASS"
        elif status is False:
            status = "FAIL"
        line = "criterion %-3s %-8s %s" % (n, status, text)
        lines.append(line)
        print(line)

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
