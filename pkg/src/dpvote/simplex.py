"""Dense tableau simplex for tiny LPs of the form

    maximize c.x  subject to  A x <= b,  x >= 0,  with b >= 0.

``b >= 0`` makes the origin a feasible basis, so only phase II is needed.
Pivoting uses Bland's rule, which cannot cycle on the degenerate rows that
show up in the SD-efficiency programs.  The same code runs on floats (with a
pivot tolerance) or on :class:`fractions.Fraction` inputs with ``tol=0`` for
exact arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Sequence


class LPError(ValueError):
    pass


class UnboundedError(LPError):
    pass


@dataclass
class LPSolution:
    value: object
    x: list
    pivots: int


def maximize(
    c: Sequence,
    A: Sequence[Sequence],
    b: Sequence,
    tol: float = 1e-12,
    max_pivots: int = 10_000,
) -> LPSolution:
    n_rows, n_vars = len(A), len(c)
    if any(len(row) != n_vars for row in A) or len(b) != n_rows:
        raise LPError("inconsistent LP dimensions")
    exact = tol == 0
    zero = Fraction(0) if exact else 0.0
    one = Fraction(1) if exact else 1.0
    conv = Fraction if exact else float
    if any(conv(x) < 0 for x in b):
        raise LPError("origin is infeasible (negative right-hand side)")

    # tableau rows: [A | I | b]; objective row holds reduced costs -c
    width = n_vars + n_rows + 1
    T = []
    for i, row in enumerate(A):
        r = [conv(v) for v in row] + [zero] * n_rows + [conv(b[i])]
        r[n_vars + i] = one
        T.append(r)
    obj = [-conv(v) for v in c] + [zero] * (n_rows + 1)
    basis = [n_vars + i for i in range(n_rows)]

    pivots = 0
    while True:
        enter = next((k for k in range(width - 1) if obj[k] < -tol), None)
        if enter is None:
            break
        best = None
        leave = None
        for i in range(n_rows):
            a = T[i][enter]
            if a > tol:
                ratio = T[i][-1] / a
                # Bland: smallest ratio, ties by smallest basic variable index
                if best is None or ratio < best - tol or (abs(ratio - best) <= tol and basis[i] < basis[leave]):
                    best, leave = ratio, i
        if leave is None:
            raise UnboundedError("objective is unbounded")
        piv = T[leave][enter]
        T[leave] = [v / piv for v in T[leave]]
        for i in range(n_rows):
            if i != leave and T[i][enter] != 0:
                f = T[i][enter]
                T[i] = [v - f * w for v, w in zip(T[i], T[leave])]
        f = obj[enter]
        obj = [v - f * w for v, w in zip(obj, T[leave])]
        basis[leave] = enter
        pivots += 1
        if pivots > max_pivots:
            raise LPError("pivot limit reached")

    x = [zero] * n_vars
    for i, var in enumerate(basis):
        if var < n_vars:
            x[var] = T[i][-1]
    return LPSolution(value=obj[-1], x=x, pivots=pivots)


def is_rational_input(*seqs) -> bool:
    def flat(s):
        for v in s:
            if isinstance(v, (list, tuple)):
                yield from flat(v)
            else:
                yield v
    return all(isinstance(v, Rational) for s in seqs for v in flat(s))
