"""Shared fixtures and the per-criterion PASS/FAIL summary of the acceptance suite."""

from __future__ import annotations

import collections

import pytest

from qcalc import make_context

_CRITERIA: dict[int, str] = {}
_OUTCOMES: dict[int, list[bool]] = collections.defaultdict(list)


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion tag")


def pytest_collection_modifyitems(items):
    for item in items:
        marker = item.get_closest_marker("criterion")
        if marker:
            number, title = marker.args
            _CRITERIA[number] = title


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("criterion")
    if marker and call.when == "call":
        _OUTCOMES[marker.args[0]].append(call.excinfo is None)
    elif marker and call.when == "setup" and call.excinfo is not None:
        _OUTCOMES[marker.args[0]].append(False)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        results = _OUTCOMES.get(number, [])
        status = "PASS" if results and all(results) else ("FAIL" if results else "NOT RUN")
        terminalreporter.write_line(f"criterion {number:2d} {status}  {_CRITERIA[number]}")


@pytest.fixture
def ctx_half():
    return make_context(0.5)


@pytest.fixture
def exact_half():
    return make_context("1/2", "exact")
