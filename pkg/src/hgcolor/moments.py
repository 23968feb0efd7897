"""First and second moments of the balanced-coloring count Z.

Z counts balanced k-partitions of [n] (k | n) that properly color a multiset
hypergraph with m edges. Exact values are big rationals; sums over overlap
matrices are accumulated as integers over the common denominator
(k^{r-1} n^r)^m so no rounding enters until a float is asked for.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

import mpmath
import numpy as np

from .coloring import balanced_partition_count
from .hypergraph import GuardError

# Cap on |D| that enumerate_overlap_matrices will walk.
MAX_OVERLAP_MATRICES = 10_000_000


@dataclass(frozen=True)
class OverlapMatrix:
    k: int
    entries: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        rows = self.entries
        if len(rows) != self.k or any(len(row) != self.k for row in rows):
            raise ValueError(f"overlap matrix must be {self.k}x{self.k}")
        if any(x < 0 for row in rows for x in row):
            raise ValueError("overlap entries must be nonnegative")
        sums = {sum(row) for row in rows} | {sum(col) for col in zip(*rows)}
        if len(sums) > 1:
            raise ValueError("row and column sums must all agree")

    @property
    def n(self) -> int:
        return sum(map(sum, self.entries))

    def flat(self) -> list[int]:
        return [x for row in self.entries for x in row]

    def as_array(self) -> np.ndarray:
        return np.array(self.entries, dtype=np.int64)


@dataclass(frozen=True)
class MomentEstimate:
    """An exact moment together with its asymptotic counterpart.

    ``log_exact`` and ``log_asymptotic`` stay finite where the float
    fields would overflow.
    """

    exact: Fraction
    asymptotic: float
    log_exact: float
    log_asymptotic: float
    n: int
    r: int
    k: int
    m: int

    @property
    def ratio(self) -> float:
        """exact / asymptotic, computed in the log domain."""
        return math.exp(self.log_exact - self.log_asymptotic)


@dataclass(frozen=True)
class LaplaceConstants:
    alpha: float
    lattice_det: float
    hessian_det: float
    ratio_limit: float


def _check_divides(n: int, k: int) -> None:
    if n < 1 or k < 1:
        raise ValueError("n and k must be positive")
    if n % k:
        raise ValueError(f"k={k} does not divide n={n}")


def log_fraction(q: Fraction) -> float:
    """Natural log of a positive rational of any size."""
    if q <= 0:
        return -math.inf
    return math.log(q.numerator) - math.log(q.denominator)


def _safe_exp(x: float) -> float:
    return math.exp(x) if x < 709.0 else math.inf


def log_asymptotic_Z(n: int, r: int, k: int, c: float) -> float:
    return (
        0.5 * k * math.log(k)
        - 0.5 * (k - 1) * math.log(2 * math.pi * n)
        + n * (math.log(k) + c * math.log1p(-float(k) ** (1 - r)))
    )


def expected_Z(n: int, r: int, k: int, m: int) -> MomentEstimate:
    """E[Z] = |Xi_k| (1 - k^{1-r})^m in the multiset model."""
    _check_divides(n, k)
    if m < 0:
        raise ValueError("m must be nonnegative")
    q = k ** (r - 1)
    exact = Fraction(balanced_partition_count(n, k) * (q - 1) ** m, q**m)
    log_asym = log_asymptotic_Z(n, r, k, m / n) if k > 1 else log_fraction(exact)
    return MomentEstimate(
        exact=exact,
        asymptotic=_safe_exp(log_asym),
        log_exact=log_fraction(exact),
        log_asymptotic=log_asym,
        n=n, r=r, k=k, m=m,
    )


def overlap_matrix_count_bound(n: int, k: int) -> int:
    """Upper bound on |D|: each of the first k-1 rows is a composition of n/k."""
    _check_divides(n, k)
    return math.comb(n // k + k - 1, k - 1) ** (k - 1)


def _compositions(total: int, caps: list[int]) -> Iterator[tuple[int, ...]]:
    """Tuples t with sum total and 0 <= t[j] <= caps[j], lexicographic order."""
    if len(caps) == 1:
        if total <= caps[0]:
            yield (total,)
        return
    rest = sum(caps[1:])
    for x in range(max(0, total - rest), min(total, caps[0]) + 1):
        for tail in _compositions(total - x, caps[1:]):
            yield (x, *tail)


def enumerate_overlap_matrices(n: int, k: int) -> Iterator[OverlapMatrix]:
    """Every k x k nonnegative integer matrix with all line sums n/k.

    Rows are chosen one at a time within the remaining column budgets; the
    last row is forced by the column sums.
    """
    _check_divides(n, k)
    if overlap_matrix_count_bound(n, k) > MAX_OVERLAP_MATRICES:
        raise GuardError(
            f"overlap enumeration for n={n}, k={k} exceeds the guard ({MAX_OVERLAP_MATRICES})"
        )
    s = n // k

    def rows(i: int, caps: list[int]) -> Iterator[list[tuple[int, ...]]]:
        if i == k - 1:
            yield [tuple(caps)]
            return
        for row in _compositions(s, caps):
            left = [a - b for a, b in zip(caps, row)]
            for tail in rows(i + 1, left):
                yield [row, *tail]

    for mat in rows(0, [s] * k):
        yield OverlapMatrix(k, tuple(mat))


def _multinomial(n: int, parts) -> int:
    out = math.factorial(n)
    for p in parts:
        out //= math.factorial(p)
    return out


def overlap_summand(L: OverlapMatrix, n: int, r: int, m: int) -> Fraction:
    """n!/prod l_ij! * (1 - 2/k^{r-1} + sum (l_ij/n)^r)^m."""
    k = L.k
    q = k ** (r - 1)
    flat = L.flat()
    base = q * n**r - 2 * n**r + q * sum(x**r for x in flat)
    return Fraction(_multinomial(n, flat) * base**m, (q * n**r) ** m)


def expected_Z2_exact(n: int, r: int, k: int, m: int) -> MomentEstimate:
    """Exact E[Z^2] as the sum over overlap matrices."""
    _check_divides(n, k)
    if m < 0:
        raise ValueError("m must be nonnegative")
    q = k ** (r - 1)
    nr = n**r
    fact = [math.factorial(i) for i in range(n + 1)]
    total = 0
    for L in enumerate_overlap_matrices(n, k):
        flat = L.flat()
        weight = fact[n]
        for x in flat:
            weight //= fact[x]
        base = q * nr - 2 * nr + q * sum(x**r for x in flat)
        total += weight * base**m
    exact = Fraction(total, (q * nr) ** m)
    log_exact = log_fraction(exact)
    c = m / n
    try:
        log_asym = log_asymptotic_Z2(n, r, k, c)
    except (ValueError, ZeroDivisionError):
        log_asym = math.nan
    return MomentEstimate(
        exact=exact,
        asymptotic=_safe_exp(log_asym) if not math.isnan(log_asym) else math.nan,
        log_exact=log_exact,
        log_asymptotic=log_asym,
        n=n, r=r, k=k, m=m,
    )


def alpha(r: int, k: int, c: float) -> float:
    return 1.0 - c * r * (r - 1) / (k ** (r - 1) - 1) ** 2


def laplace_constants(r: int, k: int, c: float) -> LaplaceConstants:
    a = alpha(r, k, c)
    if a <= 0:
        raise ValueError(
            f"alpha = {a:.6g} <= 0 at (r={r}, k={k}, c={c}); the Laplace estimate does not apply"
        )
    d = (k - 1) ** 2
    return LaplaceConstants(
        alpha=a,
        lattice_det=float(k ** (k - 1)),
        hessian_det=(k * k * a) ** d,
        ratio_limit=a ** (d / 2),
    )


def log_asymptotic_Z2(n: int, r: int, k: int, c: float) -> float:
    a = laplace_constants(r, k, c).alpha
    return (
        k * math.log(k)
        - (k - 1) * math.log(2 * math.pi * n)
        - 0.5 * (k - 1) ** 2 * math.log(a)
        + 2 * n * (math.log(k) + c * math.log1p(-float(k) ** (1 - r)))
    )


def asymptotic_Z2(n: int, r: int, k: int, c: float) -> float:
    """Laplace-method estimate of E[Z^2]; may overflow to inf for large n."""
    _check_divides(n, k)
    return _safe_exp(log_asymptotic_Z2(n, r, k, c))


def eval_F(X, c: float, r: int, k: int) -> float:
    """Entropy of X plus c ln(1 - 2/k^{r-1} + sum x^r), with 0 ln 0 = 0."""
    x = np.asarray(X, dtype=float).ravel()
    if x.size != k * k:
        raise ValueError(f"X must have {k * k} entries")
    if np.any(x < 0):
        raise ValueError("X must be nonnegative")
    pos = x[x > 0]
    entropy = -float(np.sum(pos * np.log(pos)))
    inner = 1.0 - 2.0 / k ** (r - 1) + float(np.sum(x**r))
    if c == 0:
        return entropy
    return entropy + c * math.log(inner)


def tangent_basis(k: int) -> np.ndarray:
    """Columns U_ij = E_ij - E_ik - E_kj + E_kk for i, j < k, flattened row-major."""
    cols = []
    for i in range(k - 1):
        for j in range(k - 1):
            U = np.zeros((k, k))
            U[i, j] += 1
            U[i, k - 1] -= 1
            U[k - 1, j] -= 1
            U[k - 1, k - 1] += 1
            cols.append(U.ravel())
    return np.array(cols).T


def _fd_hessian(fun, x0: list, h) -> np.ndarray:
    d = len(x0)
    H = np.empty((d, d))

    def at(*shifts):
        x = list(x0)
        for i, s in shifts:
            x[i] += s
        return fun(x)

    f0 = fun(x0)
    for i in range(d):
        H[i, i] = float((at((i, h)) - 2 * f0 + at((i, -h))) / h**2)
        for j in range(i):
            H[i, j] = H[j, i] = float(
                (at((i, h), (j, h)) - at((i, h), (j, -h))
                 - at((i, -h), (j, h)) + at((i, -h), (j, -h))) / (4 * h**2)
            )
    return H


def _F_mp(x: list, c, r: int, k: int):
    entropy = -mpmath.fsum(v * mpmath.log(v) for v in x)
    inner = 1 - mpmath.mpf(2) / k ** (r - 1) + mpmath.fsum(v**r for v in x)
    return entropy + c * mpmath.log(inner)


def hessian_numeric_det(r: int, k: int, c: float, h: float = 1e-5) -> float:
    """det(U^T(-H)U)/det(U^T U) with H the finite-difference Hessian of F at J0.

    Central differences at steps h and h/2 are combined by one Richardson
    step. F is evaluated with 30 significant digits so the stencils see only
    truncation error, not cancellation.
    """
    laplace_constants(r, k, c)
    with mpmath.workdps(30):
        x0 = [mpmath.mpf(1) / k**2] * (k * k)
        cm, hm = mpmath.mpf(c), mpmath.mpf(h)

        def fun(x):
            return _F_mp(x, cm, r, k)

        H1 = _fd_hessian(fun, x0, hm)
        H2 = _fd_hessian(fun, x0, hm / 2)
    H = H2 + (H2 - H1) / 3
    U = tangent_basis(k)
    return float(np.linalg.det(U.T @ (-H) @ U) / np.linalg.det(U.T @ U))


def block_gram_matrix(p: int, q: int) -> list[list[int]]:
    """p x p blocks: 2B on the diagonal, B elsewhere, with B = I_q + J_q."""
    size = p * q
    return [
        [(1 + (a // q == b // q)) * (1 + (a % q == b % q)) for b in range(size)]
        for a in range(size)
    ]


def bareiss_det(A: list[list[int]]) -> int:
    """Fraction-free Gaussian elimination; exact for integer matrices."""
    M = [row[:] for row in A]
    n = len(M)
    sign, prev = 1, 1
    for i in range(n - 1):
        if M[i][i] == 0:
            swap = next((s for s in range(i + 1, n) if M[s][i] != 0), None)
            if swap is None:
                return 0
            M[i], M[swap] = M[swap], M[i]
            sign = -sign
        for a in range(i + 1, n):
            for b in range(i + 1, n):
                M[a][b] = (M[a][b] * M[i][i] - M[a][i] * M[i][b]) // prev
        prev = M[i][i]
    return sign * M[n - 1][n - 1] if n else 1


def block_gram_det(p: int, q: int, dense: bool = False) -> int:
    """(p+1)^q (q+1)^p, or the same value by explicit elimination when ``dense``."""
    if p < 1 or q < 1:
        raise ValueError("p and q must be positive")
    if dense:
        return bareiss_det(block_gram_matrix(p, q))
    return (p + 1) ** q * (q + 1) ** p
