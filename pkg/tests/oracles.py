"""Slow, obviously-correct reference implementations used only by the tests."""

from __future__ import annotations

import itertools
from fractions import Fraction

import mpmath
import numpy as np
import sympy


def balanced_colorings(n: int, k: int) -> list[tuple[int, ...]]:
    block = n // k
    return [s for s in itertools.product(range(k), repeat=n) if all(s.count(c) == block for c in range(k))]


def brute_moments(n: int, r: int, k: int, m: int) -> tuple[Fraction, Fraction]:
    """(E[Z], E[Z^2]) by listing every v in [n]^{rm}.

    Each v is m consecutive r-tuples; Z(v) is the number of balanced colorings
    leaving no tuple monochromatic.
    """
    cols = balanced_colorings(n, k)
    tuples = list(itertools.product(range(n), repeat=r))
    # good[s, t] = 1 when tuple t is not monochromatic under coloring s
    good = np.array([[len({s[v] for v in t}) > 1 for t in tuples] for s in cols], dtype=np.int64)
    # prod[s, v] over all v in [n^r]^m, built one edge at a time
    prod = np.ones((len(cols), 1), dtype=np.int64)
    for _ in range(m):
        prod = (prod[:, :, None] * good[:, None, :]).reshape(len(cols), -1)
    Z = prod.sum(axis=0)
    total = len(tuples) ** m
    return Fraction(int(Z.sum()), total), Fraction(int((Z * Z).sum()), total)


def brute_colorable(edges: list[tuple[int, ...]], n: int, k: int) -> bool:
    for s in itertools.product(range(k), repeat=n):
        if all(len({s[v - 1] for v in e}) > 1 for e in edges):
            return True
    return False


def dense_det(A) -> int:
    return int(sympy.Matrix(A).det(method="bareiss"))


def eta_min(r: int, k: int, dps: int = 50) -> tuple[float, float]:
    """(xi, c_{r,k}) by a dense grid plus a bracketed derivative root in mpmath."""
    with mpmath.workdps(dps):
        q = mpmath.mpf(k) ** (r - 1)

        def eta(x):
            f = mpmath.log(k) - x * mpmath.log(k - 1) + (1 - x) * mpmath.log(1 - x) + x * mpmath.log(x)
            g = (1 - x) ** r + x**r / mpmath.mpf(k - 1) ** (r - 1) - 1 / q
            return f / g

        b = 1 - mpmath.mpf(1) / k
        xs = [b * mpmath.mpf(i) / 4000 for i in range(1, 4000)]
        i = min(range(len(xs)), key=lambda j: eta(xs[j]))
        lo, hi = xs[max(i - 1, 0)], xs[min(i + 1, len(xs) - 1)]
        xi = mpmath.findroot(lambda x: mpmath.diff(eta, x), (lo, hi), solver="anderson")
        return float(xi), float((q - 1) ** 2 / q * eta(xi))
