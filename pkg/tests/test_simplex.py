from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import linprog

from dpvote.simplex import LPError, UnboundedError, is_rational_input, maximize


def test_textbook_lp():
    # max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18  ->  36 at (2, 6)
    sol = maximize([3, 5], [[1, 0], [0, 2], [3, 2]], [4, 12, 18])
    assert sol.value == pytest.approx(36)
    assert sol.x == pytest.approx([2, 6])


def test_exact_mode_returns_fractions():
    sol = maximize([Fraction(1), Fraction(1)], [[Fraction(3), Fraction(1)], [Fraction(1), Fraction(3)]], [Fraction(1), Fraction(1)], tol=0)
    assert sol.value == Fraction(1, 2)
    assert sol.x == [Fraction(1, 4), Fraction(1, 4)]


def test_unbounded():
    with pytest.raises(UnboundedError):
        maximize([1, 0], [[0, 1]], [1])


def test_bad_inputs():
    with pytest.raises(LPError):
        maximize([1], [[1]], [-1])
    with pytest.raises(LPError):
        maximize([1, 2], [[1]], [1])


def test_degenerate_does_not_cycle():
    # classic Beale example, cycles under the largest-coefficient rule
    c = [0.75, -150, 0.02, -6]
    A = [[0.25, -60, -0.04, 9], [0.5, -90, -0.02, 3], [0, 0, 1, 0]]
    b = [0, 0, 1]
    sol = maximize(c, A, b)
    assert sol.value == pytest.approx(0.05)


def test_is_rational_input():
    assert is_rational_input([1, Fraction(1, 2)], [[2]])
    assert not is_rational_input([0.5])


@settings(max_examples=150, deadline=None)
@given(
    st.integers(1, 4).flatmap(lambda nv: st.tuples(
        st.lists(st.integers(-5, 5), min_size=nv, max_size=nv),
        st.lists(st.lists(st.integers(0, 6), min_size=nv, max_size=nv), min_size=1, max_size=5),
    ))
)
def test_matches_scipy(data):
    c, A = data
    # a box row keeps every instance bounded
    A = A + [[1] * len(c)]
    b = [10] * len(A)
    ref = linprog(-np.array(c, float), A_ub=A, b_ub=b, bounds=[(0, None)] * len(c), method="highs")
    sol = maximize(c, A, b)
    assert sol.value == pytest.approx(-ref.fun, abs=1e-9)
    exact = maximize([Fraction(v) for v in c], A, b, tol=0)
    assert float(exact.value) == pytest.approx(-ref.fun, abs=1e-9)
    x = np.array(sol.x)
    assert np.all(np.array(A) @ x <= np.array(b) + 1e-9) and np.all(x >= -1e-12)
