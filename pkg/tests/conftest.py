"""Shared fixtures, including the acceptance-criterion reporter.

Criterion tests wrap their body in the ``criterion`` context manager; the
verdicts are replayed as one line per criterion in the terminal summary.
"""

from contextlib import contextmanager

import pytest

_LINES: "list[tuple[int, str]]" = []


@pytest.fixture
def criterion():
    @contextmanager
    def run(number: int, title: str):
        info: dict = {}
        try:
            yield info
        except BaseException:
            _LINES.append((number, f"FAIL criterion {number}: {title}"))
            raise
        extra = f" ({info['detail']})" if "detail" in info else ""
        _LINES.append((number, f"PASS criterion {number}: {title}{extra}"))

    return run


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(_LINES):
            terminalreporter.write_line(line)
