import pytest

from epibench import kernels

BACKENDS = kernels.available_backends()

_acceptance_lines = []


@pytest.fixture(params=BACKENDS)
def backend(request):
    return request.param


@pytest.fixture
def acceptance_log():
    return _acceptance_lines


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)
