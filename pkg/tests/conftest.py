"""Shared fixtures and the acceptance-criterion result board.

test_acceptance.py registers one entry per numbered criterion before its
asserts run, so the summary below prints a complete PASS/FAIL line per
criterion even when an assert aborted the test body.
"""

from __future__ import annotations

import numpy as np
import pytest

from blochnh import ModelParams

_CRITERIA: dict[int, tuple[str, bool, str]] = {}


def record_criterion(number: int, label: str, passed: bool, detail: str = "") -> None:
    _CRITERIA[number] = (label, bool(passed), detail)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        label, passed, detail = _CRITERIA[number]
        verdict = "PASS" if passed else "FAIL"
        line = f"criterion {number:02d} {verdict}  {label}"
        if detail:
            line = f"{line}  [{detail}]"
        terminalreporter.write_line(line)


@pytest.fixture
def hn_params() -> ModelParams:
    return ModelParams.hatano_nelson(1.0, 0.2, 0.1)


@pytest.fixture
def ic_params() -> ModelParams:
    return ModelParams.imaginary_coupling(1.0, 0.1)


@pytest.fixture
def hermitian_params() -> ModelParams:
    return ModelParams.hatano_nelson(1.0, 0.0, 0.1)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20260821)
