"""Acceptance criteria 1-10, each timed against its limit.

Run ``pytest tests/test_acceptance.py -s`` or plain ``pytest``; one
PASS/FAIL line per criterion is printed either way.
"""

from __future__ import annotations

import time

import pytest

from jokerkit import claims

CRITERIA = {number: (title, fn, limit) for number, title, fn, limit in claims.CRITERIA}


def _report(capsys, number: int, passed: bool, seconds: float, limit: float, detail: str) -> None:
    bound = "" if limit == float("inf") else f" (limit {limit:g}s)"
    status = "PASS" if passed and seconds <= limit else "FAIL"
    with capsys.disabled():
        print(f"\n[criterion {number:>2}] {status} {CRITERIA[number][0]}: {seconds:.2f}s{bound}; {detail}")


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number, capsys):
    title, fn, limit = CRITERIA[number]
    start = time.perf_counter()
    passed, detail = fn(0) if number == 10 else fn()
    seconds = time.perf_counter() - start
    _report(capsys, number, passed, seconds, limit, detail)
    assert passed, detail
    assert seconds <= limit, f"{title} took {seconds:.2f}s, limit {limit:g}s"


def test_joker_action_table_is_literal():
    # the table restated independently of the library constant
    table = {(0, 0): 1, (1, 0): 2, (1, 1): 3, (0, 3): 4, (1, 2): 4}
    from jokerkit import fpmodule

    assert claims.action_edges(fpmodule.joker()) == table
