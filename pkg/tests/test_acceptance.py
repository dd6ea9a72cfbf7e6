"""Acceptance criteria at full tolerance, one test per criterion."""

import pytest

from sinrgame import acceptance

# read by the terminal summary hook in conftest.py
LINES = {}


@pytest.fixture(scope="module")
def outcomes():
    return {r.key: r for r in acceptance.run(acceptance.FULL)}


@pytest.mark.parametrize("key", list(acceptance.CRITERIA))
def test_criterion(outcomes, key):
    result = outcomes[key]
    LINES[key] = result.line()
    print(result.line())
    assert result.passed, result.detail()
