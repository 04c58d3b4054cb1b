import pytest

_RESULTS: dict[int, list[tuple[str, bool, str]]] = {}


@pytest.fixture
def criterion(request):
    """Record a pass/fail verdict for an acceptance criterion.

    Usage: ``criterion(n, ok, detail)`` records and then asserts ``ok``.
    A test that errors before recording counts as FAIL.
    """
    recorded = []

    def record(n: int, ok: bool, detail: str = ""):
        recorded.append(n)
        _RESULTS.setdefault(n, []).append((request.node.name, bool(ok), detail))
        print(f"criterion {n}: {'PASS' if ok else 'FAIL'} {detail}")
        assert ok, detail

    yield record
    rep = getattr(request.node, "rep_call", None)
    marker = request.node.get_closest_marker("criterion")
    if marker and not recorded and rep is not None and rep.failed:
        _RESULTS.setdefault(marker.args[0], []).append((request.node.name, False, "error before verdict"))


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_RESULTS):
        parts = _RESULTS[n]
        ok = all(p[1] for p in parts)
        detail = "; ".join(f"{name}: {d}" if len(parts) > 1 else d for name, _, d in parts)
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
