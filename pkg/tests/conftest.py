import pytest

from primeclusters import _backend


@pytest.fixture(params=_backend.available())
def backend(request):
    """Run a test once per available kernel backend."""
    prev = _backend.active()
    _backend.use_backend(request.param)
    yield request.param
    _backend.use_backend(prev)


_ACCEPTANCE: dict[int, str] = {}


@pytest.fixture
def criterion():
    """Record one PASS/FAIL line for an acceptance criterion."""

    def record(number: int, ok: bool, detail: str) -> bool:
        _ACCEPTANCE[number] = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_ACCEPTANCE):
        terminalreporter.write_line(_ACCEPTANCE[n])
