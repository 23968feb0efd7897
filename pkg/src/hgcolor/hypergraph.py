"""Random r-uniform hypergraph models and structural defect checks.

Three models are provided:

* ``sample_multi``     -- the multiset model: an rm-vector of uniform vertex
                          labels cut into m consecutive edges (defective and
                          duplicate edges allowed).
* ``sample_uniform``   -- m distinct r-subsets chosen uniformly without
                          replacement.
* ``sample_bernoulli`` -- every r-subset kept independently with probability p.

Vertex labels are 1-based throughout.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

# Bernoulli sampling walks every r-subset; refuse anything bigger.
MAX_BERNOULLI_SUBSETS = 10_000_000


class GuardError(ValueError):
    """A request that is well formed but exceeds a size guard."""


@dataclass(frozen=True)
class Seed:
    """Deterministic RNG key: ``value`` picks the experiment, ``stream`` the substream."""

    value: int = 0
    stream: int = 0

    def __post_init__(self):
        for name in ("value", "stream"):
            v = getattr(self, name)
            if not 0 <= v < 2**64:
                raise ValueError(f"seed {name} must be a 64-bit unsigned integer, got {v}")

    def generator(self, *substream: int) -> np.random.Generator:
        """Independent generator for ``(value, stream, *substream)``.

        Uses ``SeedSequence`` spawn keys, so the bit stream depends only on the
        key tuple and not on call order or thread layout.
        """
        ss = np.random.SeedSequence(self.value, spawn_key=(self.stream, *substream))
        return np.random.Generator(np.random.PCG64(ss))


@dataclass
class Hypergraph:
    """Vertex count plus an ordered multiset of edges (each an ordered r-tuple)."""

    n: int
    r: int
    edges: np.ndarray  # shape (m, r), int64, labels in [1..n]
    simple: bool = False
    _canonical: np.ndarray | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be positive")
        if self.r < 1:
            raise ValueError("r must be positive")
        e = np.asarray(self.edges, dtype=np.int64)
        if e.size == 0:
            e = e.reshape(0, self.r)
        if e.ndim != 2 or e.shape[1] != self.r:
            raise ValueError(f"every edge must have exactly r={self.r} entries")
        if e.size and (e.min() < 1 or e.max() > self.n):
            raise ValueError(f"vertex labels must lie in [1..{self.n}]")
        self.edges = e
        if self.simple and not classify_bad_edges(self).empty:
            raise ValueError("hypergraph flagged simple but has bad edges")

    @classmethod
    def from_edges(cls, n, edges, r=None, simple=False) -> "Hypergraph":
        edges = [tuple(int(v) for v in e) for e in edges]
        if r is None:
            if not edges:
                raise ValueError("r is required for an empty edge list")
            r = len(edges[0])
        if any(len(e) != r for e in edges):
            raise ValueError(f"every edge must have exactly r={r} entries")
        arr = np.array(edges, dtype=np.int64).reshape(len(edges), r)
        return cls(n=n, r=r, edges=arr, simple=simple)

    @property
    def m(self) -> int:
        return int(self.edges.shape[0])

    @property
    def N(self) -> int:
        """Number of possible r-subsets, C(n, r)."""
        return math.comb(self.n, self.r)

    @property
    def canonical(self) -> np.ndarray:
        """Edges with each row sorted; the multiset form used for comparisons."""
        if self._canonical is None:
            self._canonical = np.sort(self.edges, axis=1)
        return self._canonical

    def edge_list(self) -> list[tuple[int, ...]]:
        return [tuple(int(v) for v in row) for row in self.edges]

    def supports(self) -> list[tuple[int, ...]]:
        """Distinct vertices of each edge, sorted (a defective edge shrinks)."""
        return [tuple(sorted(set(row))) for row in self.edge_list()]


@dataclass
class BadEdgeReport:
    defective: list[int]
    duplicate: list[int]

    @property
    def empty(self) -> bool:
        return not self.defective and not self.duplicate

    @property
    def bad(self) -> list[int]:
        """Indices that are defective or duplicate (each once)."""
        return sorted(set(self.defective) | set(self.duplicate))


def _edge_keys(canonical: np.ndarray, n: int) -> np.ndarray | None:
    """Encode sorted rows as base-n integers when that fits in int64."""
    r = canonical.shape[1]
    if r * math.log2(max(n, 2)) >= 62:
        return None
    keys = np.zeros(canonical.shape[0], dtype=np.int64)
    for j in range(r):
        keys = keys * n + (canonical[:, j] - 1)
    return keys


def duplicate_mask(canonical: np.ndarray, n: int) -> np.ndarray:
    """True at row j when an earlier row i < j holds the same multiset."""
    m = canonical.shape[0]
    if m == 0:
        return np.zeros(0, dtype=bool)
    keys = _edge_keys(canonical, n)
    if keys is None:
        _, first = np.unique(canonical, axis=0, return_index=True)
        mask = np.ones(m, dtype=bool)
        mask[first] = False
        return mask
    order = np.argsort(keys, kind="stable")
    sk = keys[order]
    repeat = np.empty(m, dtype=bool)
    repeat[0] = False
    repeat[1:] = sk[1:] == sk[:-1]
    mask = np.zeros(m, dtype=bool)
    mask[order] = repeat
    return mask


def defective_mask(canonical: np.ndarray) -> np.ndarray:
    if canonical.shape[0] == 0 or canonical.shape[1] < 2:
        return np.zeros(canonical.shape[0], dtype=bool)
    return np.any(canonical[:, 1:] == canonical[:, :-1], axis=1)


def classify_bad_edges(H: Hypergraph) -> BadEdgeReport:
    """Indices of defective edges (repeated vertex) and duplicate edges.

    An edge is a duplicate when its vertex multiset equals that of an earlier
    edge; the first occurrence is not reported. One index may appear in both
    lists.
    """
    canon = H.canonical
    return BadEdgeReport(
        defective=np.flatnonzero(defective_mask(canon)).tolist(),
        duplicate=np.flatnonzero(duplicate_mask(canon, H.n)).tolist(),
    )


def isolated_vertices(H: Hypergraph) -> set[int]:
    present = np.zeros(H.n + 1, dtype=bool)
    present[H.edges.ravel()] = True
    return {int(v) for v in np.flatnonzero(~present[1:]) + 1}


def sample_multi(n: int, r: int, m: int, seed: Seed, *substream: int) -> Hypergraph:
    """Draw v in [n]^{rm} uniformly and cut it into m consecutive r-tuples."""
    if n < 1 or r < 1 or m < 0:
        raise ValueError("need n >= 1, r >= 1, m >= 0")
    rng = seed.generator(*substream)
    v = rng.integers(1, n + 1, size=(m, r), dtype=np.int64)
    return Hypergraph(n=n, r=r, edges=v)


def _all_subsets(n: int, r: int) -> np.ndarray:
    combos = np.fromiter(
        itertools.chain.from_iterable(itertools.combinations(range(1, n + 1), r)),
        dtype=np.int64,
        count=math.comb(n, r) * r,
    )
    return combos.reshape(-1, r)


def _distinct_subsets(n: int, r: int, m: int, rng: np.random.Generator) -> np.ndarray:
    """m distinct sorted r-subsets by rejection: uniform r-tuples, drop repeats."""
    out: list[tuple[int, ...]] = []
    seen: set[tuple[int, ...]] = set()
    while len(out) < m:
        need = m - len(out)
        batch = rng.integers(1, n + 1, size=(max(16, 2 * need), r), dtype=np.int64)
        batch.sort(axis=1)
        ok = ~defective_mask(batch)
        for row in batch[ok]:
            t = tuple(row.tolist())
            if t not in seen:
                seen.add(t)
                out.append(t)
                if len(out) == m:
                    break
    return np.array(out, dtype=np.int64).reshape(m, r)


def sample_uniform(n: int, r: int, m: int, seed: Seed, *substream: int) -> Hypergraph:
    """m distinct r-subsets of [n], uniformly without replacement.

    For m > N/2 the complement (N - m subsets) is drawn instead and removed
    from the full list, which is then shuffled.
    """
    N = math.comb(n, r)
    if m < 0 or m > N:
        raise ValueError(f"m={m} must lie in [0, C(n,r)={N}]")
    rng = seed.generator(*substream)
    if m > N // 2:
        everything = _all_subsets(n, r)
        drop = _distinct_subsets(n, r, N - m, rng)
        keep = ~_row_membership(everything, drop, n)
        edges = everything[keep]
        edges = edges[rng.permutation(edges.shape[0])]
    else:
        edges = _distinct_subsets(n, r, m, rng)
    return Hypergraph(n=n, r=r, edges=edges, simple=True)


def _row_membership(rows: np.ndarray, targets: np.ndarray, n: int) -> np.ndarray:
    if targets.shape[0] == 0:
        return np.zeros(rows.shape[0], dtype=bool)
    wanted = {tuple(t) for t in targets.tolist()}
    return np.array([tuple(row) in wanted for row in rows.tolist()], dtype=bool)


def sample_bernoulli(n: int, r: int, p: float, seed: Seed, *substream: int) -> Hypergraph:
    """Keep each of the C(n, r) subsets independently with probability p."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p={p} is not a probability")
    N = math.comb(n, r)
    if N > MAX_BERNOULLI_SUBSETS:
        raise GuardError(f"C({n},{r}) = {N} subsets exceeds the Bernoulli sampling guard")
    rng = seed.generator(*substream)
    keep = rng.random(N) < p
    return Hypergraph(n=n, r=r, edges=_all_subsets(n, r)[keep], simple=True)


def asymptotic_no_bad_probability(r: int, c: float) -> float:
    """Limit of P(no bad edge) in the multiset model with m = cn edges."""
    if r < 2 or c < 0:
        raise ValueError("need r >= 2 and c >= 0")
    if r == 2:
        return math.exp(-c * (c + 1))
    return math.exp(-c * r * (r - 1) / 2)


def edge_count(c: float, n: int) -> int:
    """m = floor(cn), the discretisation used everywhere a density is given."""
    return math.floor(c * n + 1e-9)
