"""Shared fixtures and the acceptance PASS/FAIL summary."""

from collections import defaultdict

import pytest

_ACCEPTANCE = defaultdict(list)
_TITLES = {}


class _Recorder:
    def __call__(self, criterion: int, title: str, passed: bool, detail: str = ""):
        _TITLES.setdefault(criterion, title)
        _ACCEPTANCE[criterion].append((bool(passed), detail))
        return bool(passed)


@pytest.fixture(scope="session")
def acceptance():
    """``acceptance(n, title, passed, detail)`` logs one check of criterion ``n``."""
    return _Recorder()


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n in sorted(_ACCEPTANCE):
        checks = _ACCEPTANCE[n]
        ok = all(p for p, _ in checks)
        details = "; ".join(d for _, d in checks if d)
        tr.write_line(f"{'PASS' if ok else 'FAIL'}  [{n:2d}] {_TITLES[n]}: {details}")
