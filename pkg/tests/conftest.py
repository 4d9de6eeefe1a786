from contextlib import contextmanager

import pytest

from entcum.convert import Converter
from entcum.engine import CumulantEngine

_RESULTS: dict[int, tuple[str, str, str]] = {}


@contextmanager
def record(number: int, title: str):
    """Store a PASS/FAIL line for an acceptance criterion; the block's failure still propagates."""
    details = []
    try:
        yield details.append
    except BaseException as exc:
        _RESULTS[number] = ("FAIL", title, f"{type(exc).__name__}: {exc}".splitlines()[0])
        raise
    _RESULTS[number] = ("PASS", title, "; ".join(details))


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_RESULTS):
        status, title, detail = _RESULTS[number]
        line = f"criterion {number:2d}: {status}  {title}"
        if detail:
            line += f"  [{detail}]"
        terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def engine():
    return CumulantEngine()


@pytest.fixture(scope="session")
def converter(engine):
    return Converter(engine)
