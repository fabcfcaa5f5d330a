"""The ten acceptance criteria, each at its stated tolerance.

Run with ``pytest -s tests/test_acceptance.py`` to see one PASS/FAIL line
per criterion; the lines are also printed in the terminal summary.
"""
import time

import pytest

from greenkernels import acceptance

SUITE = acceptance.Suite(seed=0)
RESULTS = {}
_START = time.perf_counter()


@pytest.mark.parametrize("k", sorted(acceptance.TITLES))
def test_criterion(k):
    result = acceptance.run_one(SUITE, k)
    RESULTS[k] = result
    print(result.line())
    assert result.passed, result.line()


def test_suite_within_budget():
    assert len(RESULTS) == len(acceptance.TITLES)
    total = time.perf_counter() - _START
    print(f"acceptance suite total runtime {total:.1f}s (budget {acceptance.SUITE_BUDGET:.0f}s)")
    assert total <= acceptance.SUITE_BUDGET
