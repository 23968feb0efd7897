"""Monte Carlo sweeps of k-colorability against edge density, and checks of the
bad-edge and isolated-vertex laws of the multiset model.

Every trial draws from its own seed substream keyed by (grid index, trial), so
results do not depend on how trials are split across workers.
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from statistics import NormalDist

import numpy as np

from . import __version__
from .coloring import SearchBudgetExceeded, is_k_colorable
from .hypergraph import (
    GuardError,
    Seed,
    asymptotic_no_bad_probability,
    classify_bad_edges,
    edge_count,
    isolated_vertices,
    sample_bernoulli,
    sample_multi,
    sample_uniform,
)

MODELS = ("uniform", "multi", "bernoulli")
CSV_HEADER = "r,k,n,model,c,m,trials,colorable,p_hat,wilson_low,wilson_high,censored"
# Per-instance search budget; an instance that exhausts it is censored.
SWEEP_NODE_LIMIT = 2_000_000
# Resampling cap when the multiset model is conditioned on having no bad edge.
MAX_CONDITION_ATTEMPTS = 10_000

FINITE_SIZE_NOTE = (
    "desk-scale n cannot exhibit a sharp threshold; read these frequencies as "
    "finite-size trends (monotonicity, bracket consistency), not threshold locations"
)


def size_guard(k: int) -> int:
    """Largest n for which sweeps decide k-colorability exactly."""
    return {2: 40, 3: 24}.get(k, 20)


def wilson_interval(successes: int, trials: int, level: float = 0.95) -> tuple[float, float]:
    if trials == 0:
        return 0.0, 1.0
    z = NormalDist().inv_cdf(0.5 + level / 2)
    p = successes / trials
    denom = 1 + z * z / trials
    centre = (p + z * z / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / denom
    return max(0.0, centre - half), min(1.0, centre + half)


def fixed(x: float, digits: int = 10) -> str:
    """Locale-free fixed notation below 1e6, trailing zeros trimmed."""
    if not math.isfinite(x) or abs(x) >= 1e6:
        return repr(float(x))
    s = f"{x:.{digits}f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


@dataclass(frozen=True)
class SweepConfig:
    r: int
    k: int
    n: int
    c_grid: tuple[float, ...]
    trials: int
    model: str = "uniform"
    seed: Seed = Seed()
    condition_simple: bool = False
    node_limit: int = SWEEP_NODE_LIMIT

    def __post_init__(self):
        object.__setattr__(self, "c_grid", tuple(float(c) for c in self.c_grid))
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if self.r < 2 or self.k < 2 or self.n < 1:
            raise ValueError("need r >= 2, k >= 2, n >= 1")
        if self.model not in MODELS:
            raise ValueError(f"model must be one of {MODELS}")
        if not self.c_grid:
            raise ValueError("c_grid is empty")
        if any(c <= 0 for c in self.c_grid):
            raise ValueError("densities must be positive")
        if any(b <= a for a, b in zip(self.c_grid, self.c_grid[1:])):
            raise ValueError("c_grid must be strictly increasing")
        if self.n > size_guard(self.k):
            raise GuardError(
                f"n={self.n} exceeds the exact-decision guard n <= {size_guard(self.k)} for k={self.k}"
            )
        if self.model == "bernoulli":
            N = math.comb(self.n, self.r)
            if self.c_grid[-1] * self.n > N:
                raise ValueError(f"p = c n / C(n, r) exceeds 1 for c={self.c_grid[-1]}")
        if self.model == "uniform" and edge_count(self.c_grid[-1], self.n) > math.comb(self.n, self.r):
            raise ValueError("m exceeds C(n, r) for the uniform model")

    def echo(self) -> dict:
        d = asdict(self)
        d["c_grid"] = list(self.c_grid)
        d["seed"] = {"value": self.seed.value, "stream": self.seed.stream}
        return d


@dataclass(frozen=True)
class SweepPoint:
    c: float
    m: int
    trials: int
    colorable: int
    censored: int

    @property
    def decided(self) -> int:
        return self.trials - self.censored

    @property
    def p_hat(self) -> float:
        return self.colorable / self.decided if self.decided else math.nan

    @property
    def wilson(self) -> tuple[float, float]:
        return wilson_interval(self.colorable, self.decided)


@dataclass
class SweepResult:
    config: SweepConfig
    points: list[SweepPoint]
    wall_time: float = 0.0
    version: str = __version__
    notes: list[str] = field(default_factory=lambda: [FINITE_SIZE_NOTE])

    def to_csv(self) -> str:
        cfg = self.config
        out = [CSV_HEADER]
        for p in self.points:
            lo, hi = p.wilson
            out.append(",".join([
                str(cfg.r), str(cfg.k), str(cfg.n), cfg.model, fixed(p.c), str(p.m),
                str(p.trials), str(p.colorable), fixed(p.p_hat, 6), fixed(lo, 6), fixed(hi, 6),
                str(p.censored),
            ]))
        return "\n".join(out) + "\n"

    def metadata(self, include_timing: bool = False) -> dict:
        meta = {
            "config": self.config.echo(),
            "tool": "hgcolor",
            "version": self.version,
            "notes": self.notes,
        }
        if include_timing:
            meta["wall_time_s"] = self.wall_time
            meta["finished_utc"] = time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())
        return meta

    def to_json(self, include_timing: bool = False) -> str:
        return json.dumps(self.metadata(include_timing), indent=2, sort_keys=True) + "\n"


def _draw(cfg: SweepConfig, m: int, c: float, i: int, j: int):
    if cfg.model == "uniform":
        return sample_uniform(cfg.n, cfg.r, m, cfg.seed, i, j)
    if cfg.model == "bernoulli":
        p = c * cfg.n / math.comb(cfg.n, cfg.r)
        return sample_bernoulli(cfg.n, cfg.r, p, cfg.seed, i, j)
    if not cfg.condition_simple:
        return sample_multi(cfg.n, cfg.r, m, cfg.seed, i, j)
    for attempt in range(MAX_CONDITION_ATTEMPTS):
        H = sample_multi(cfg.n, cfg.r, m, cfg.seed, i, j, attempt)
        if classify_bad_edges(H).empty:
            return H
    raise RuntimeError(f"no bad-edge-free draw in {MAX_CONDITION_ATTEMPTS} attempts at c={c}")


def _run_point(cfg: SweepConfig, i: int, c: float, trials: range) -> tuple[int, int]:
    m = edge_count(c, cfg.n)
    colorable = censored = 0
    for j in trials:
        H = _draw(cfg, m, c, i, j)
        try:
            colorable += is_k_colorable(H, cfg.k, node_limit=cfg.node_limit)
        except SearchBudgetExceeded:
            censored += 1
    return colorable, censored


def run_sweep(config: SweepConfig, threads: int | None = 1) -> SweepResult:
    """Estimate P(k-colorable) at each density of the grid.

    ``threads`` > 1 spreads trial blocks over worker processes; counts are
    summed, so the result is identical to a serial run.
    """
    start = time.perf_counter()
    points = []
    workers = max(1, threads or 1)
    pool = ProcessPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        for i, c in enumerate(config.c_grid):
            if pool is None:
                colorable, censored = _run_point(config, i, c, range(config.trials))
            else:
                step = math.ceil(config.trials / workers)
                blocks = [range(a, min(a + step, config.trials)) for a in range(0, config.trials, step)]
                futs = [pool.submit(_run_point, config, i, c, b) for b in blocks]
                parts = [f.result() for f in futs]
                colorable = sum(p[0] for p in parts)
                censored = sum(p[1] for p in parts)
            points.append(SweepPoint(c, edge_count(c, config.n), config.trials, colorable, censored))
    finally:
        if pool is not None:
            pool.shutdown()
    return SweepResult(config, points, wall_time=time.perf_counter() - start)


@dataclass(frozen=True)
class BadEdgeSummary:
    r: int
    c: float
    n: int
    m: int
    trials: int
    no_bad: int
    mean_bad: float
    exceed_fraction: float
    limit: float

    @property
    def p_no_bad(self) -> float:
        return self.no_bad / self.trials

    @property
    def sigma(self) -> float:
        """Binomial standard error of the no-bad frequency under the limit law."""
        return math.sqrt(self.limit * (1 - self.limit) / self.trials)

    @property
    def z_score(self) -> float:
        return (self.p_no_bad - self.limit) / self.sigma

    def as_dict(self) -> dict:
        d = asdict(self)
        d.update(p_no_bad=self.p_no_bad, sigma=self.sigma, z_score=self.z_score,
                 threshold_2ln_n=2 * math.log(self.n))
        return d


def bad_edge_experiment(r: int, c: float, n: int, trials: int, seed: Seed) -> BadEdgeSummary:
    """Frequency of bad-edge-free multiset hypergraphs with m = floor(cn)."""
    if trials < 1:
        raise ValueError("trials must be at least 1")
    m = edge_count(c, n)
    cap = 2 * math.log(n)
    no_bad = exceed = 0
    total_bad = 0
    for t in range(trials):
        bad = len(classify_bad_edges(sample_multi(n, r, m, seed, t)).bad)
        total_bad += bad
        no_bad += bad == 0
        exceed += bad > cap
    return BadEdgeSummary(
        r=r, c=c, n=n, m=m, trials=trials,
        no_bad=no_bad,
        mean_bad=total_bad / trials,
        exceed_fraction=exceed / trials,
        limit=asymptotic_no_bad_probability(r, c),
    )


@dataclass(frozen=True)
class IsolatedSummary:
    r: int
    c: float
    n: int
    m: int
    counts: tuple[int, ...]

    @property
    def mean(self) -> float:
        return float(np.mean(self.counts))

    @property
    def expected(self) -> float:
        """E[Y] = n (1 - 1/n)^{rm}."""
        return self.n * (1 - 1 / self.n) ** (self.r * self.m)

    @property
    def relative_error(self) -> float:
        return abs(self.mean - self.expected) / self.expected

    def fraction_at_least(self, j: int) -> float:
        return float(np.mean(np.asarray(self.counts) >= j))

    def as_dict(self) -> dict:
        return {
            "r": self.r, "c": self.c, "n": self.n, "m": self.m, "trials": len(self.counts),
            "mean": self.mean, "expected": self.expected, "relative_error": self.relative_error,
            "min": int(min(self.counts)), "max": int(max(self.counts)),
        }


def isolated_vertex_experiment(r: int, c: float, n: int, trials: int, seed: Seed) -> IsolatedSummary:
    if trials < 1:
        raise ValueError("trials must be at least 1")
    if c < 0:
        raise ValueError("c must be nonnegative")
    m = edge_count(c, n)
    counts = tuple(len(isolated_vertices(sample_multi(n, r, m, seed, t))) for t in range(trials))
    return IsolatedSummary(r=r, c=c, n=n, m=m, counts=counts)


def write_csv_rows(rows: list[dict], header: list[str]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=header, lineterminator="\n")
    w.writeheader()
    for row in rows:
        w.writerow(row)
    return buf.getvalue()
