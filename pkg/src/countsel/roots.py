"""Real root isolation for integer polynomials via Sturm sequences.

Arithmetic is exact (``fractions.Fraction``) so isolation does not depend on
the size of the coefficients. Coefficients are given highest degree first.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence


def _trim(c: list[Fraction]) -> list[Fraction]:
    i = 0
    while i < len(c) - 1 and c[i] == 0:
        i += 1
    return c[i:]


def polyval(coeffs: Sequence, x):
    acc = 0 * x
    for c in coeffs:
        acc = acc * x + c
    return acc


def _derivative(c: list[Fraction]) -> list[Fraction]:
    d = len(c) - 1
    return [c[i] * (d - i) for i in range(d)] or [Fraction(0)]


def _divmod(a: list[Fraction], b: list[Fraction]) -> tuple[list[Fraction], list[Fraction]]:
    a = list(a)
    q: list[Fraction] = []
    while len(a) >= len(b):
        f = a[0] / b[0]
        q.append(f)
        for i in range(len(b)):
            a[i] -= f * b[i]
        a.pop(0)
    return q or [Fraction(0)], (_trim(a) if a else [Fraction(0)])


def _rem(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    return _divmod(a, b)[1]


def squarefree(coeffs: Sequence) -> list[Fraction]:
    """p / gcd(p, p'): same distinct roots, all simple."""
    p = _trim([Fraction(c) for c in coeffs])
    if len(p) <= 2:
        return p
    a, b = p, _derivative(p)
    while not (len(b) == 1 and b[0] == 0):
        a, b = b, _rem(a, b)
    if len(a) == 1:
        return p
    return _divmod(p, a)[0]


def sturm_sequence(coeffs: Sequence) -> list[list[Fraction]]:
    p0 = _trim([Fraction(c) for c in coeffs])
    seq = [p0, _derivative(p0)]
    while len(seq[-1]) > 1 or seq[-1][0] != 0:
        r = _rem(seq[-2], seq[-1])
        if len(r) == 1 and r[0] == 0:
            break
        seq.append([-c for c in r])
    return seq


def _sign_changes(seq, x: Fraction) -> int:
    signs = [v for v in (polyval(p, x) for p in seq) if v != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if (a > 0) != (b > 0))


def count_roots(seq, a: Fraction, b: Fraction) -> int:
    """Number of distinct real roots in the half-open interval (a, b]."""
    return _sign_changes(seq, a) - _sign_changes(seq, b)


def real_roots(coeffs: Sequence, a, b, tol: float = 1e-15) -> list[float]:
    """Distinct real roots of the polynomial in (a, b], ascending.

    Each root is isolated by Sturm counting and then refined by bisection
    until the bracket is narrower than ``tol``.
    """
    seq = sturm_sequence(squarefree(coeffs))
    p = seq[0]
    if len(p) == 1:
        return []
    a, b = Fraction(a), Fraction(b)
    tol = Fraction(tol)
    out: list[float] = []
    stack = [(a, b)]
    while stack:
        lo, hi = stack.pop()
        k = count_roots(seq, lo, hi)
        if k == 0:
            continue
        if k == 1:
            out.append(_bisect(p, seq, lo, hi, tol))
            continue
        mid = (lo + hi) / 2
        stack.append((lo, mid))
        stack.append((mid, hi))
    return sorted(out)


def _bisect(p, seq, lo: Fraction, hi: Fraction, tol: Fraction) -> float:
    if polyval(p, hi) == 0:
        return float(hi)
    # exactly one simple root in (lo, hi]
    while hi - lo > tol:
        mid = (lo + hi) / 2
        if polyval(p, mid) == 0:
            return float(mid)
        if count_roots(seq, lo, mid) == 1:
            hi = mid
        else:
            lo = mid
    return float((lo + hi) / 2)
