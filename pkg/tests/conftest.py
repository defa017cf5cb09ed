import time
from pathlib import Path

import pytest

from _acceptance_log import LINES

PAPER_LISTING = Path(__file__).parent / "fixtures" / "paper_listing.fis"
SUITE_BUDGET_S = 60.0

_started = time.perf_counter()


@pytest.fixture(scope="session")
def paper_listing() -> str:
    return PAPER_LISTING.read_text(encoding="utf-8")


FULL_SUITE_MIN = 150  # fewer collected tests means a partial run

_full_run = False


def pytest_sessionstart(session):
    global _started
    _started = time.perf_counter()


def pytest_collection_finish(session):
    global _full_run
    _full_run = len(session.items) > FULL_SUITE_MIN


def _runtime_ok():
    return time.perf_counter() - _started < SUITE_BUDGET_S


def pytest_sessionfinish(session, exitstatus):
    if _full_run and not _runtime_ok() and exitstatus == 0:
        session.exitstatus = pytest.ExitCode.TESTS_FAILED


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in LINES:
        terminalreporter.write_line(line)
    if _full_run:
        elapsed = time.perf_counter() - _started
        verdict = "PASS" if elapsed < SUITE_BUDGET_S else "FAIL"
        terminalreporter.write_line(f"{verdict} full suite runtime: {elapsed:.1f} s < {SUITE_BUDGET_S:.0f} s")
