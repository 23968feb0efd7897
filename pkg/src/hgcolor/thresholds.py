"""Colorability thresholds for random r-uniform hypergraphs.

Everything here works in the coordinate x in [0, 1 - 1/k], where

    f(x) = ln k - x ln(k-1) + (1-x) ln(1-x) + x ln x
    g(x) = (1-x)^r + x^r/(k-1)^{r-1} - 1/k^{r-1}

and eta = f/g. The second-moment threshold is

    c_{r,k} = (k^{r-1}-1)^2 / k^{r-1} * min eta.

The minimiser xi is the unique sign change of the stationarity gap s(x).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import mpmath
import numpy as np
from scipy import optimize

BISECT_XTOL = 1e-13
BISECT_MAXITER = 200
# Keep s(x) away from the 0/0 at x = 1 - 1/k and at x = 0.
BOUNDARY_GAP = 1e-9
INTERIOR_EPS = 1e-12
# Above this k^{r-1}, g loses too many digits to cancellation in doubles.
DOUBLE_LIMIT = 1e12
MP_DPS = 40

# (k, smallest regular r); k >= 15 is regular from r = 3 on.
_REGULAR_FROM = {2: 9, 3: 6, 4: 5}
REFINED_GRID = 10_000


class Classification(str, enum.Enum):
    R2_CLOSED = "R2_CLOSED"
    K2_SMALL_R = "K2_SMALL_R"
    REGULAR = "REGULAR"
    IRREGULAR = "IRREGULAR"


def u_bound(r: int, k: int) -> float:
    """First-moment threshold k^{r-1} ln k."""
    if k == 1:
        return 0.0
    q = k ** (r - 1)
    if q > DOUBLE_LIMIT:
        # correctly rounded, so comparisons with c_{r,k} stay monotone
        with mpmath.workdps(30):
            return float(mpmath.mpf(q) * mpmath.log(k))
    return q * math.log(k)


def u_improved(r: int, k: int) -> float:
    return (k ** (r - 1) - 0.5) * math.log(k)


def c_upper(r: int, k: int) -> float:
    """(k^{r-1}-1)^2 / (r(r-1)), the value of c_{r,k} if the boundary won."""
    return (k ** (r - 1) - 1) ** 2 / (r * (r - 1))


def _pow(M, base: int, e: int):
    return mpmath.power(base, e) if M is mpmath else float(base) ** e


class UnivariateFns:
    """f, g and their derivatives for one (r, k).

    ``precise`` switches evaluation to mpmath; by default it is on when
    k^{r-1} exceeds ``DOUBLE_LIMIT``.
    """

    def __init__(self, r: int, k: int, precise: bool | None = None):
        if r < 2 or k < 2:
            raise ValueError("need r >= 2 and k >= 2")
        self.r, self.k = r, k
        self.q = k ** (r - 1)
        self.boundary = 1.0 - 1.0 / k
        self.precise = self.q > DOUBLE_LIMIT if precise is None else precise
        # x sits near k^{-r}, so the gap cancels about log10(k^{r-1}) digits twice
        self.dps = MP_DPS + 2 * len(str(self.q))

    def _wrap(self, fn, x, p: int = 0):
        """Evaluate fn at x / k^p; the division is exact in the mpmath path."""
        if not self.precise:
            return fn(math, float(x) / float(self.k) ** p)
        with mpmath.workdps(self.dps):
            return float(fn(mpmath, mpmath.mpf(x) / mpmath.power(self.k, p)))

    @staticmethod
    def _xlogx(M, x):
        return 0 * x if x == 0 else x * M.log(x)

    def f(self, x):
        r, k = self.r, self.k

        def fn(M, x):
            return M.log(k) - x * M.log(k - 1) + self._xlogx(M, 1 - x) + self._xlogx(M, x)

        return self._wrap(fn, x)

    def g(self, x):
        r, k = self.r, self.k

        def fn(M, x):
            return (1 - x) ** r + x**r / _pow(M, k - 1, r - 1) - 1 / _pow(M, k, r - 1)

        return self._wrap(fn, x)

    def df(self, x):
        k = self.k
        return self._wrap(lambda M, x: -M.log((k - 1) * (1 - x) / x), x)

    def dg(self, x):
        r, k = self.r, self.k
        return self._wrap(
            lambda M, x: -r * ((1 - x) ** (r - 1) - x ** (r - 1) / _pow(M, k - 1, r - 1)), x
        )

    def d2f(self, x):
        return self._wrap(lambda M, x: 1 / (x * (1 - x)), x)

    def d2g(self, x):
        r, k = self.r, self.k
        return self._wrap(
            lambda M, x: r * (r - 1) * ((1 - x) ** (r - 2) + x ** (r - 2) / _pow(M, k - 1, r - 1)),
            x,
        )

    def eta(self, x, p: int = 0, scale: bool = False):
        """f/g at x / k^p; at x = 1 - 1/k the limit k^{r-1}/(r(r-1)) is returned.

        With ``scale`` the result is multiplied by (k^{r-1}-1)^2/k^{r-1} before
        rounding, giving C(x).
        """
        if p == 0 and x >= self.boundary:
            if scale:
                return c_upper(self.r, self.k)
            return self.q / (self.r * (self.r - 1))
        r, k = self.r, self.k

        def fn(M, x):
            f = M.log(k) - x * M.log(k - 1) + self._xlogx(M, 1 - x) + self._xlogx(M, x)
            g = (1 - x) ** r + x**r / _pow(M, k - 1, r - 1) - 1 / _pow(M, k, r - 1)
            if scale:
                q = _pow(M, k, r - 1)
                return (q - 1) ** 2 / q * f / g
            return f / g

        return self._wrap(fn, x, p)

    def omega(self, x):
        return self.df(x) / self.dg(x)

    def stationarity_gap(self, x, p: int = 0):
        """s(x) = x - g/g' - ln(k(1-x)) / ln((k-1)(1-x)/x); s >= 0 iff eta' <= 0.

        With p > 0 the argument is x / k^p.
        """
        if not 0 < x < (self.boundary if p == 0 else math.inf):
            raise ValueError(f"s(x) is undefined at x={x}; need 0 < x < {self.boundary}")
        r, k = self.r, self.k

        def fn(M, x):
            g = (1 - x) ** r + x**r / _pow(M, k - 1, r - 1) - 1 / _pow(M, k, r - 1)
            dg = -r * ((1 - x) ** (r - 1) - x ** (r - 1) / _pow(M, k - 1, r - 1))
            return x - g / dg - M.log(k * (1 - x)) / M.log((k - 1) * (1 - x) / x)

        return self._wrap(fn, x, p)


def stationarity_gap(x: float, r: int, k: int) -> float:
    return UnivariateFns(r, k).stationarity_gap(x)


def regularity_margin(r: int, k: int) -> float:
    """LHS - RHS of the sufficient inequality that puts xi in the analytic bracket."""
    lk = math.log(k)
    lhs = 3 * k**r / (r**2 * (k + 2) ** 2 * lk)
    rhs = 1 + 0.52 / r + 2 / (r * (k + 2)) + 3 / (2 * r * lk)
    return lhs - rhs


def check_regularity(r: int, k: int) -> bool:
    """Membership in the monotone closure of the base regular pairs."""
    if r < 2 or k < 2:
        raise ValueError("need r >= 2 and k >= 2")
    if k >= 15:
        return r >= 3
    if k >= 5:
        return r >= 4
    return r >= _REGULAR_FROM[k]


def regular_bracket(r: int, k: int) -> tuple[float, float]:
    return (k - 1) / k**r, (k + 2) / k**r


def lambda0(r: int, k: int) -> float:
    """Upper bound on eta used for root counting; ``math.inf`` when r <= 2k."""
    if r <= 2 * k:
        return math.inf
    return 1.0 / (r * (r - 1) * ((r - 2) * 2.0 ** (r - 1) / float(r) ** r + 1.0 / float(k) ** r))


def classify(r: int, k: int) -> Classification:
    if r == 2:
        return Classification.R2_CLOSED
    if k == 2 and r in (3, 4):
        return Classification.K2_SMALL_R
    if check_regularity(r, k):
        return Classification.REGULAR
    return Classification.IRREGULAR


@dataclass(frozen=True)
class XiResult:
    """The minimiser of eta, stored as xi = t / k^p so tiny roots keep their digits."""

    xi: float
    classification: Classification
    bracket: tuple[float, float] | None
    iterations: int
    t: float = 0.0
    p: int = 0


def _bisect_gap(F: UnivariateFns, lo: float, hi: float, p: int) -> tuple[float, int]:
    """Root of t -> s(t / k^p) on [lo, hi], where s goes from + to -."""
    s_lo, s_hi = F.stationarity_gap(lo, p), F.stationarity_gap(hi, p)
    if not (s_lo > 0 > s_hi):
        raise AssertionError(
            f"stationarity gap has no +/- sign change on [{lo}, {hi}] / {F.k}^{p} "
            f"for r={F.r}, k={F.k}: s={s_lo}, {s_hi}"
        )
    # 1e-13 in x; in the scaled variable that is relative to the bracket
    xtol = BISECT_XTOL * (hi if p else 1.0)
    root, info = optimize.bisect(
        lambda t: F.stationarity_gap(t, p), lo, hi,
        xtol=xtol, maxiter=BISECT_MAXITER, full_output=True,
    )
    return float(root), int(info.iterations)


def find_xi(r: int, k: int) -> XiResult:
    cls = classify(r, k)
    if cls is Classification.R2_CLOSED:
        return XiResult(1.0 / k, cls, None, 0, 1.0 / k, 0)
    if cls is Classification.K2_SMALL_R:
        return XiResult(0.5, cls, None, 0, 0.5, 0)
    if cls is Classification.REGULAR:
        # bisect t = x k^r on [k-1, k+2]; both ends are exact in binary
        F = UnivariateFns(r, k)
        t, its = _bisect_gap(F, float(k - 1), float(k + 2), r)
        return XiResult(t / float(k) ** r, cls, regular_bracket(r, k), its, t, r)
    # the gap is evaluated next to the 0/0 boundary; keep extra digits
    F = UnivariateFns(r, k, precise=True)
    lo, hi = INTERIOR_EPS, F.boundary - BOUNDARY_GAP
    xi, its = _bisect_gap(F, lo, hi, 0)
    return XiResult(xi, cls, (lo, hi), its, xi, 0)


def closed_form_c(r: int, k: int) -> float | None:
    if k == 2 and r <= 4:
        return (2 ** (r - 1) - 1) ** 2 / (r * (r - 1))
    if r == 2 and k >= 3:
        return (k - 1) ** 3 * math.log(k - 1) / (k * (k - 2))
    return None


def _refined_terms(r: int, k: int, x: np.ndarray) -> np.ndarray:
    q = float(k) ** (r - 1)
    f = (
        math.log(k) - x * math.log(k - 1)
        + (1 - x) * np.log1p(-x)
        + np.where(x > 0, x * np.log(np.where(x > 0, x, 1.0)), 0.0)
    )
    g = (1 - x) ** r + x**r / float(k - 1) ** (r - 1) - 1 / q
    theta = np.log1p(2 * float(k) ** (r - 2) * g / (q - 1) ** 2)
    return 2 * f / (k * theta)


def refined_c(r: int, k: int) -> float:
    """Minimum over x of 2f/(k ln(1 + 2k^{r-2} g/(k^{r-1}-1)^2)).

    A log-spaced grid concentrated around (k-1)/k^r is followed by a bounded
    scalar minimisation on the best cell. The boundary limit, which equals
    c at x = 1 - 1/k, is kept as a candidate.
    """
    b = 1.0 - 1.0 / k
    # closer to b, f and g cancel in doubles; the boundary limit covers it
    top = b - 1e-3
    lo = max(1e-300, (k - 1) / float(k) ** r * 1e-3)
    grid = np.unique(np.concatenate([
        np.geomspace(lo, top, REFINED_GRID),
        np.linspace(top / 100, top, 1000),
    ]))
    vals = _refined_terms(r, k, grid)
    i = int(np.nanargmin(vals))
    a, z = grid[max(i - 1, 0)], grid[min(i + 1, grid.size - 1)]
    res = optimize.minimize_scalar(
        lambda t: float(_refined_terms(r, k, np.array([t]))[0]),
        bounds=(a, z),
        method="bounded",
        options={"xatol": 1e-14 * max(a, 1e-300) if a < 1e-3 else 1e-12},
    )
    best = min(float(vals[i]), float(res.fun))
    return min(best, c_upper(r, k))


def asymptotic_c(r: int, k: int) -> float:
    """Leading terms of the large-(r, k) expansion of the threshold.

    For r = 2 the refined graph-coloring form k ln k - (k-2)/k ln k - (2k-1)/(2k)
    is used.
    """
    lk = math.log(k)
    if r == 2:
        return k * lk - (k - 2) / k * lk - (2 * k - 1) / (2 * k)
    return k ** (r - 1) * lk - (k - 1) / k * (1 + lk)


@dataclass(frozen=True)
class ThresholdReport:
    r: int
    k: int
    u_low: float
    u_high: float
    u_improved: float
    xi: float
    eta_min: float
    c_rk: float
    c_refined: float | None
    classification: Classification
    bracket: tuple[float, float] | None
    iterations: int
    diagnostics: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "r": self.r,
            "k": self.k,
            "u_low": self.u_low,
            "c_rk": self.c_rk,
            "c_refined": self.c_refined,
            "u_high": self.u_high,
            "u_improved": self.u_improved,
            "xi": self.xi,
            "eta_min": self.eta_min,
            "classification": self.classification.value,
            "bracket": list(self.bracket) if self.bracket else None,
            "iterations": self.iterations,
        }


def c_threshold(r: int, k: int, refined: bool = False) -> ThresholdReport:
    res = find_xi(r, k)
    q = k ** (r - 1)
    scale = (q - 1) ** 2 / q
    closed = closed_form_c(r, k)
    if closed is not None:
        c = closed
        eta_min = c / scale
    else:
        precise = True if res.classification is Classification.IRREGULAR else None
        F = UnivariateFns(r, k, precise=precise)
        eta_min = F.eta(res.t, res.p)
        c = F.eta(res.t, res.p, scale=True)
    return ThresholdReport(
        r=r,
        k=k,
        u_low=u_bound(r, k - 1),
        u_high=u_bound(r, k),
        u_improved=u_improved(r, k),
        xi=res.xi,
        eta_min=eta_min,
        c_rk=c,
        c_refined=refined_c(r, k) if refined else None,
        classification=res.classification,
        bracket=res.bracket,
        iterations=res.iterations,
        diagnostics={"upper_bound": c_upper(r, k)},
    )


def eta_boundary_limits(r: int, k: int) -> tuple[float, float]:
    """eta and eta' at x -> (1 - 1/k)^- by Richardson extrapolation in mpmath."""
    with mpmath.workdps(60):
        b = 1 - mpmath.mpf(1) / k

        def eta(x):
            lk = mpmath.log(k)
            f = lk - x * mpmath.log(k - 1) + (1 - x) * mpmath.log(1 - x) + x * mpmath.log(x)
            g = (1 - x) ** r + x**r / mpmath.power(k - 1, r - 1) - 1 / mpmath.power(k, r - 1)
            return f / g

        def deta(x):
            return mpmath.diff(eta, x)

        val = mpmath.limit(eta, b, direction=-1)
        der = mpmath.limit(deta, b, direction=-1)
        return float(val), float(der)


def eta_boundary_closed(r: int, k: int) -> tuple[float, float]:
    """Closed forms of eta and eta' at x = 1 - 1/k.

    f and g both vanish to second order there, so with f ~ a2 d^2/2 + a3 d^3/6
    (and likewise g) one gets eta' = (a3 - eta b3) / (3 b2). The factor 3 is
    easy to lose when applying l'Hopital twice.
    """
    return k ** (r - 1) / (r * (r - 1)), (k - 2) * k**r / (3 * r * (k - 1))


@dataclass(frozen=True)
class FeasibleOverlap:
    rho: float
    epsilon: float
    matrix: np.ndarray


def _psi(eps: float, r: int, k: int) -> float:
    diag = (1 - eps) / k + eps
    off = (1 - eps) / k
    return float(k) ** (r - 2) * (k * diag**r + k * (k - 1) * off**r)


def feasible_overlap(rho: float, r: int, k: int) -> FeasibleOverlap:
    """A = (1-eps) J + eps I with k^{r-2} sum a_ij^r = rho."""
    q = float(k) ** (r - 1)
    if not 1.0 <= rho <= q:
        raise ValueError(f"rho={rho} lies outside [1, {q}]: no doubly stochastic solution")
    if rho == 1.0:
        eps = 0.0
    elif rho == q:
        eps = 1.0
    else:
        eps = optimize.bisect(
            lambda e: _psi(e, r, k) - rho, 0.0, 1.0, xtol=1e-17, maxiter=BISECT_MAXITER
        )
    A = (1 - eps) * np.full((k, k), 1.0 / k) + eps * np.eye(k)
    return FeasibleOverlap(rho=rho, epsilon=float(eps), matrix=A)


def predict_chromatic_window(r: int, c: float) -> tuple[int, bool]:
    """(k, unique): chi is k or k+1, and exactly k when ``unique``."""
    if c <= 0 or r < 2:
        raise ValueError("need c > 0 and r >= 2")
    k = 2
    while c > u_bound(r, k):
        k += 1
    unique = max(r, k) >= 3 and c < c_threshold(r, k).c_rk
    return k, unique
