"""Collects acceptance verdicts and prints one line per criterion at the end of the run."""
import pytest

_PARTS: dict[int, list[tuple[bool, str]]] = {}
_PROPERTY_OUTCOMES: dict[str, str] = {}


def record_criterion(number: int, ok: bool, detail: str) -> None:
    _PARTS.setdefault(number, []).append((ok, detail))
    print(f"criterion {number}: {'PASS' if ok else 'FAIL'} - {detail}")


@pytest.fixture
def criterion():
    return record_criterion


def property_outcomes() -> dict[str, str]:
    return dict(_PROPERTY_OUTCOMES)


def pytest_runtest_logreport(report):
    if "test_properties.py" not in report.nodeid:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _PROPERTY_OUTCOMES[report.nodeid] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _PARTS and not _PROPERTY_OUTCOMES:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for number in range(1, 12):
        parts = _PARTS.get(number)
        if number == 11 and _PROPERTY_OUTCOMES:
            failed = [n for n, o in _PROPERTY_OUTCOMES.items() if o != "passed"]
            prop_ok = not failed
            line = f"{len(_PROPERTY_OUTCOMES)} property tests in this session, {len(failed)} failed"
            parts = (parts or []) + [(prop_ok, line)]
        if not parts:
            continue
        ok = all(p[0] for p in parts)
        detail = "; ".join(p[1] for p in parts)
        tr.write_line(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
