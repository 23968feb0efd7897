"""Numeric falsification checks for the analytic inequalities behind the thresholds.

Each check evaluates one inequality on a fixed, declared grid and reports the
smallest slack seen. Margins are "right side minus left side" in the
direction of the inequality, so a check passes when its worst margin is
above -1e-12. Grids are deterministic; the one randomised check (root
counting) draws from a fixed seed.

Margin functions are module-level so a test can swap one out and confirm the
corresponding check notices.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath
import numpy as np

from . import thresholds as th
from .hypergraph import Seed

TOL = 1e-12
# Points within this distance of a declared equality point are skipped.
EQ_NEIGHBORHOOD = 1e-9
CONT_GRID = 10_000
INT_MAX = 30


@dataclass(frozen=True)
class LemmaCheck:
    lemma_id: str
    domain: str
    grid_size: int
    worst_margin: float
    passed: bool


def _result(lemma_id, domain, margins) -> LemmaCheck:
    margins = np.asarray(margins, dtype=float).ravel()
    worst = float(np.min(margins)) if margins.size else math.inf
    return LemmaCheck(lemma_id, domain, int(margins.size), worst, bool(worst > -TOL))


def _open_grid(a: float, b: float, size: int = CONT_GRID, eq=()) -> np.ndarray:
    z = np.linspace(a, b, size)
    keep = np.ones(z.size, dtype=bool)
    for p in eq:
        keep &= np.abs(z - p) > EQ_NEIGHBORHOOD
    return z[keep]


# -- elementary inequalities ---------------------------------------------------

def lem001_margin(z):
    return z - np.log1p(z)


def check_lem001() -> LemmaCheck:
    z = _open_grid(-1 + 1e-6, 10.0, eq=(0.0,))
    return _result("app:lem001", "z in (-1+1e-6, 10], linear, z=0 excluded", lem001_margin(z))


def lem002_margin(z):
    return np.log1p(-z) + 1.5 * z


def check_lem002() -> LemmaCheck:
    z = _open_grid(0.0, 0.5, eq=(0.0,))
    return _result("app:lem002", "z in (0, 1/2], linear", lem002_margin(z))


def lem004_margin(z):
    lo = (1 - z) * np.log1p(-z) + z
    hi = -z - (1 - z / 2) * np.log1p(-z)
    return np.minimum(lo, hi)


def check_lem004() -> LemmaCheck:
    z = _open_grid(0.0, 1.0, CONT_GRID + 2)[1:-1]
    return _result("app:lem004", "z in (0, 1), linear, both bounds", lem004_margin(z))


def lem005_margin(z):
    inv = 1 / (1 - z)
    return np.minimum.reduce([inv - (1 + z), (1 + z + 2 * z**2) - inv, (1 + 2 * z) - (1 + z + 2 * z**2)])


def check_lem005() -> LemmaCheck:
    z = np.linspace(0.0, 0.5, CONT_GRID)
    return _result("app:lem005", "z in [0, 1/2], linear, three-link chain", lem005_margin(z))


def lem006_margin(p, z):
    w = (1 - z) ** p
    return np.minimum.reduce([w - (1 - p * z), 1 - p * z + 0.5 * (p * z) ** 2 - w, 1 / (1 + p * z) - w])


def check_lem006() -> LemmaCheck:
    z = np.linspace(0.0, 1.0, CONT_GRID)
    margins = [lem006_margin(p, z) for p in range(1, INT_MAX + 1)]
    return _result("app:lem006", f"p in 1..{INT_MAX}, z in [0, 1] linear", margins)


# -- integer-parameter inequalities --------------------------------------------

def lem010_margin(r: int) -> float:
    big = Fraction((r - 1) ** (r - 1))
    return float((big - (r - 2) * 2 ** (r - 1) - Fraction(r, 2) ** r) / big)


def check_lem010() -> LemmaCheck:
    rs = range(5, INT_MAX + 1)
    return _result("app:lem010", f"r in 5..{INT_MAX}, relative slack", [lem010_margin(r) for r in rs])


def lem011_margin(r: int, k: int) -> float:
    q = k ** (r - 1)
    eta0 = q * math.log(k) / (q - 1)
    eta_b = q / (r * (r - 1))
    lam = th.lambda0(r, k)
    return min((eta_b - eta0) / eta_b, (lam - eta_b) / lam)


def check_lem011() -> LemmaCheck:
    pairs = [(r, k) for k in range(2, 21) for r in range(2 * k + 1, 21)]
    return _result("app:lem011", "k >= 2, 2k+1 <= r <= 20, relative slack",
                   [lem011_margin(r, k) for r, k in pairs])


def lem013_phi(r: int, k: int) -> float:
    return r * r * (k + 2) / k**r


def lem013_margin(r: int, k: int) -> float:
    phi = lem013_phi(r, k)
    return min(phi - lem013_phi(r + 1, k), phi - lem013_phi(r, k + 1)) / phi


def check_lem013() -> LemmaCheck:
    mono = [lem013_margin(r, k) for r in range(3, INT_MAX + 1) for k in range(2, INT_MAX + 1)]
    below = [
        1 - lem013_phi(r, k)
        for r in range(3, INT_MAX + 1)
        for k in range(2, INT_MAX + 1)
        if (k == 2 and r >= 9) or (k == 3 and r >= 4) or k >= 4
    ]
    return _result("app:lem013", f"r in 3..{INT_MAX}, k in 2..{INT_MAX}: decreasing, and < 1 on the stated sets",
                   mono + below)


def lem014_margin(r: int, k: int) -> float:
    """If the regularity inequality holds at (r, k), its slack at (r+1, k) and (r, k+1)."""
    if th.regularity_margin(r, k) < 0:
        return math.inf
    return min(th.regularity_margin(r + 1, k), th.regularity_margin(r, k + 1))


def check_lem014() -> LemmaCheck:
    margins = [lem014_margin(r, k) for r in range(3, INT_MAX) for k in range(2, INT_MAX)]
    # the base pairs satisfy the inequality, and the closure agrees with it
    base = [th.regularity_margin(r, k) for r, k in ((9, 2), (6, 3), (5, 4), (4, 5), (3, 15))]
    closure = [
        th.regularity_margin(r, k)
        for r in range(3, INT_MAX)
        for k in range(2, INT_MAX)
        if th.check_regularity(r, k)
    ]
    margins = [m for m in margins if m != math.inf]
    return _result("app:lem014", f"r in 3..{INT_MAX - 1}, k in 2..{INT_MAX - 1}: holds at (r,k) => holds at neighbours",
                   margins + base + closure)


def _regular_pairs(rmax: int, kmax: int):
    return [(r, k) for r in range(3, rmax + 1) for k in range(2, kmax + 1) if th.check_regularity(r, k)]


def lem015_margin(r: int, k: int, xi: float) -> float:
    return 1 - r * (r * math.log(k) + 1) * xi


def check_lem015() -> LemmaCheck:
    bound = [lem015_margin(r, k, (k + 2) / k**r) for r, k in _regular_pairs(INT_MAX, INT_MAX)]
    actual = [lem015_margin(r, k, th.find_xi(r, k).xi) for r, k in _regular_pairs(15, 15)]
    return _result("app:lem015", f"regular pairs r,k <= {INT_MAX} with xi <= (k+2)/k^r; computed xi for r,k <= 15",
                   bound + actual)


def lem016_margin(r: int, k: int) -> float:
    return math.log(k) - 2 * (k + 2) / k**r - math.log(k - 1)


def check_lem016() -> LemmaCheck:
    return _result("app:lem016", f"regular pairs r,k <= {INT_MAX}",
                   [lem016_margin(r, k) for r, k in _regular_pairs(INT_MAX, INT_MAX)])


def lem017_margin(k):
    return 4 * (k - 1) - np.sqrt(k) * np.log(k)


def check_lem017() -> LemmaCheck:
    ks = np.concatenate([np.arange(1, 10_001, dtype=float), np.linspace(1.0, 50.0, CONT_GRID)])
    return _result("app:lem017", "k integer in 1..10^4 and real in [1, 50]", lem017_margin(ks))


def lem019_margin(r: int, k: int) -> float:
    return 1 - r * (r - 1) * math.log(k) / (k ** (r - 1) - 1)


def lem019_domain():
    """k>=3 with r>=3, k=2 with r>=5, and r=2 with k>=4.

    The pair (r, k) = (2, 3) gives 2 ln 3 / 2 > 1, so it is left out even
    though k >= 3, r >= 2 would include it.
    """
    out = []
    for r in range(2, INT_MAX + 1):
        for k in range(2, INT_MAX + 1):
            if (k >= 3 and r >= 3) or (k == 2 and r >= 5) or (r == 2 and k >= 4):
                out.append((r, k))
    return out


def check_lem019() -> LemmaCheck:
    return _result("app:lem019", f"k>=3,r>=3 | k=2,r>=5 | r=2,k>=4 (r,k <= {INT_MAX})",
                   [lem019_margin(r, k) for r, k in lem019_domain()])


# -- structural checks ---------------------------------------------------------

def sign_changes(values: np.ndarray) -> int:
    s = np.sign(values)
    s = s[s != 0]
    return int(np.count_nonzero(s[1:] != s[:-1]))


def lem009_phi(x: np.ndarray, r: int, k: int) -> np.ndarray:
    return x * (1 - x) ** (r - 1) + (1 - x) * x ** (r - 1) / float(k - 1) ** (r - 1)


LEM009_PAIRS = [(r, k) for r in range(2, 13) for k in range(2, 7)]
LEM009_DRAWS = 50
LEM009_GRID = 100_000


def lem009_root_counts(r: int, k: int, draws: int = LEM009_DRAWS, seed: Seed = Seed(9, 0)):
    """Sign-change counts of phi(x) - 1/(lambda r(r-1)) for seeded lambda.

    Levels are drawn inside the range of phi, where solutions can exist.
    For r >= 2k+1 only levels above 1/(lambda_0 r(r-1)) are drawn, i.e.
    lambda < lambda_0, on [0, 1-1/k].
    """
    top = 1.0 if r <= 2 * k else 1.0 - 1.0 / k
    x = np.linspace(0.0, top, LEM009_GRID)
    phi = lem009_phi(x, r, k)
    lo, hi = float(phi.min()), float(phi.max())
    lam0 = th.lambda0(r, k)
    if math.isfinite(lam0):
        lo = max(lo, 1.0 / (lam0 * r * (r - 1)))
    if lo >= hi:
        return []
    rng = seed.generator(r, k)
    levels = rng.uniform(lo, hi, size=draws)
    return [sign_changes(phi - level) for level in levels]


def check_lem009() -> LemmaCheck:
    margins = []
    for r, k in LEM009_PAIRS:
        margins += [2 - c for c in lem009_root_counts(r, k)]
    return _result("app:lem009", f"(r,k) in 2..12 x 2..6, {LEM009_DRAWS} seeded lambda each, {LEM009_GRID}-point grid",
                   margins)


def lem012_series(r: int, terms: int = 4) -> list[Fraction]:
    """Coefficients of z^0, z^2, z^4, ... of r(r-1) eta(z) / 2^{r-1} at z = 0.

    Numerator (1-z)ln(1-z) + (1+z)ln(1+z) has z^{2j} coefficient 2/(2j(2j-1));
    the denominator (1-z)^r + (1+z)^r - 2 has 2 C(r, 2j). Both are divided by
    z^2 and the quotient series is formed exactly.
    """
    num = [Fraction(2, (2 * j) * (2 * j - 1)) for j in range(1, terms + 1)]
    den = [Fraction(2 * math.comb(r, 2 * j), r * (r - 1)) for j in range(1, terms + 1)]
    out: list[Fraction] = []
    for i in range(terms):
        acc = num[i] - sum((out[j] * den[i - j] for j in range(i)), Fraction(0))
        out.append(acc / den[0])
    return out


def lem012_local_margin(r: int, delta: float = 1e-3) -> float:
    """Signed slack of eta(1/2 - delta) against eta(1/2) for k = 2.

    Positive means the stated behaviour (min for r <= 4, max for r >= 5).
    """
    with mpmath.workdps(60):
        x = mpmath.mpf(0.5) - mpmath.mpf(delta)
        f = mpmath.log(2) + x * mpmath.log(x) + (1 - x) * mpmath.log(1 - x)
        g = (1 - x) ** r + x**r - mpmath.mpf(2) ** (1 - r)
        gap = f / g - mpmath.mpf(2) ** (r - 1) / (r * (r - 1))
        gap /= mpmath.mpf(2) ** (r - 1)
        return float(gap if r <= 4 else -gap)


def check_lem012() -> LemmaCheck:
    margins = []
    for r in range(2, INT_MAX + 1):
        c = lem012_series(r)
        expected = Fraction(2 - (r - 2) * (r - 3), 12)
        margins.append(0.0 if c[1] == expected else -1.0)
        if r in (2, 3):
            margins.append(float(c[1]))
        elif r == 4:
            margins.append(0.0 if c[1] == 0 and c[2] == Fraction(1, 15) else -1.0)
        else:
            margins.append(float(-c[1]))
        margins.append(lem012_local_margin(r))
    return _result("app:lem012", f"k=2, r in 2..{INT_MAX}: exact series and mpmath probe at x=1/2-1e-3",
                   margins)


def check_lem018() -> LemmaCheck:
    from .moments import block_gram_det

    margins = [
        -abs(block_gram_det(p, q) - block_gram_det(p, q, dense=True))
        for p in range(1, 7)
        for q in range(1, 7)
    ]
    return _result("app:lem018", "1 <= p, q <= 6, closed form vs fraction-free elimination", margins)


def check_lem007(n: int = 1000, trials: int = 200, seed: Seed = Seed(7, 0)) -> LemmaCheck:
    from .experiments import isolated_vertex_experiment

    summary = isolated_vertex_experiment(r=3, c=1.0, n=n, trials=trials, seed=seed)
    counts = np.asarray(summary.counts)
    margins = [float(np.mean(counts >= k - 1)) - 0.99 for k in range(2, 6)]
    return _result("app:lem007", f"r=3, c=1, n={n}, {trials} trials: P(>= k-1 isolated) >= 0.99 for k <= 5",
                   margins)


def check_feasible() -> LemmaCheck:
    margins = []
    for r in range(2, 7):
        for k in range(2, 7):
            q = float(k) ** (r - 1)
            for rho in np.linspace(1.0, q, 25):
                fo = th.feasible_overlap(float(rho), r, k)
                A = fo.matrix
                resid = abs(float(k) ** (r - 2) * float(np.sum(A**r)) - rho)
                margins.append(1e-10 * max(1.0, rho) - resid)
                lines = np.concatenate([A.sum(axis=0) - 1, A.sum(axis=1) - 1])
                margins.append(1e-12 - float(np.max(np.abs(lines))))
                margins.append(float(A.min()))
    return _result("app:feasible", "r,k in 2..6, 25 rho values in [1, k^{r-1}] each", margins)


REGISTRY = {
    "app:lem001": "check_lem001",
    "app:lem002": "check_lem002",
    "app:lem004": "check_lem004",
    "app:lem005": "check_lem005",
    "app:lem006": "check_lem006",
    "app:lem007": "check_lem007",
    "app:lem009": "check_lem009",
    "app:lem010": "check_lem010",
    "app:lem011": "check_lem011",
    "app:lem012": "check_lem012",
    "app:lem013": "check_lem013",
    "app:lem014": "check_lem014",
    "app:lem015": "check_lem015",
    "app:lem016": "check_lem016",
    "app:lem017": "check_lem017",
    "app:lem018": "check_lem018",
    "app:lem019": "check_lem019",
    "app:feasible": "check_feasible",
}


def run_check(lemma_id: str) -> LemmaCheck:
    try:
        name = REGISTRY[lemma_id]
    except KeyError:
        raise KeyError(f"unknown lemma id {lemma_id!r}; known: {', '.join(REGISTRY)}") from None
    return globals()[name]()


def run_all() -> list[LemmaCheck]:
    return [run_check(lid) for lid in sorted(REGISTRY)]


def summary_text(checks: list[LemmaCheck]) -> str:
    width = max(len(c.lemma_id) for c in checks)
    lines = [f"{'lemma':<{width}}  {'grid':>8}  {'worst_margin':>14}  status  domain"]
    for c in checks:
        status = "PASS" if c.passed else "FAIL"
        lines.append(f"{c.lemma_id:<{width}}  {c.grid_size:>8}  {c.worst_margin:>14.6e}  {status:<6}  {c.domain}")
    n_ok = sum(c.passed for c in checks)
    lines.append(f"{n_ok}/{len(checks)} checks passed")
    return "\n".join(lines) + "\n"


def summary_csv(checks: list[LemmaCheck]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["lemma_id", "domain", "worst_margin", "passed"])
    for c in checks:
        w.writerow([c.lemma_id, c.domain, repr(c.worst_margin), str(c.passed).lower()])
    return buf.getvalue()
