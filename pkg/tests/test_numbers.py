import math
import random

import pytest
from hypothesis import given, strategies as st

from gistvis.numbers import parse_number
from word_number_table import CASES


@pytest.mark.parametrize("expr,expected", CASES, ids=[c[0] or "<empty>" for c in CASES])
def test_against_hand_table(expr, expected):
    got = parse_number(expr)
    if math.isnan(expected):
        assert math.isnan(got)
    else:
        assert got == pytest.approx(expected, rel=1e-12)


@given(st.integers(min_value=-10**12, max_value=10**12))
def test_roundtrip_plain_integers(n):
    assert parse_number(str(n)) == float(n)


def test_idempotent_on_rendered_output():
    rng = random.Random(7)
    for _ in range(200):
        v = parse_number(str(rng.randint(-10**9, 10**9)))
        assert parse_number(str(int(v))) == v


def test_total_never_raises():
    for junk in ["", " ", "%%", "-", "+", "1,2,3", "milion", "ten ten hundred oops"]:
        assert isinstance(parse_number(junk), float)
