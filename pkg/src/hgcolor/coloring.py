"""Weak k-colorings of hypergraphs: checks, exact counting and exact search.

A k-partition colors vertex i with ``assignment[i-1]`` in [1..k]. It is a
(weak) coloring when no edge is monochromatic, i.e. every edge sees at least
two colors. A defective edge whose vertices are all equal can never be
properly colored.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

from .hypergraph import Hypergraph

# Largest |Xi_k| = n!/prod(n_i!) the balanced counter will walk.
MAX_BALANCED_PARTITIONS = 2_000_000
DEFAULT_NODE_LIMIT = 20_000_000


class Colorability(enum.Enum):
    UNCOLORABLE = "uncolorable"


UNCOLORABLE = Colorability.UNCOLORABLE


class SearchBudgetExceeded(RuntimeError):
    """Backtracking ran past its node budget without a decision."""


@dataclass(frozen=True)
class KPartition:
    k: int
    assignment: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "assignment", tuple(int(c) for c in self.assignment))
        if self.k < 1:
            raise ValueError("k must be positive")
        if any(c < 1 or c > self.k for c in self.assignment):
            raise ValueError(f"colors must lie in [1..{self.k}]")

    @property
    def n(self) -> int:
        return len(self.assignment)

    def block_sizes(self) -> list[int]:
        sizes = [0] * self.k
        for c in self.assignment:
            sizes[c - 1] += 1
        return sizes

    @property
    def balanced(self) -> bool:
        lo, hi = self.n // self.k, -(-self.n // self.k)
        return all(lo <= s <= hi for s in self.block_sizes())

    def __call__(self, v: int) -> int:
        return self.assignment[v - 1]


def is_monochromatic(edge: Sequence[int], sigma: KPartition) -> bool:
    colors = {sigma(v) for v in edge}
    return len(colors) == 1


def is_coloring(H: Hypergraph, sigma: KPartition) -> bool:
    if sigma.n != H.n:
        raise ValueError(f"partition covers {sigma.n} vertices, hypergraph has {H.n}")
    return not any(is_monochromatic(e, sigma) for e in H.edge_list())


def balanced_partition_count(n: int, k: int) -> int:
    """|Xi_k| = n! / ((n/k)!)^k for k | n."""
    if n % k:
        raise ValueError(f"k={k} does not divide n={n}")
    return math.factorial(n) // math.factorial(n // k) ** k


def _distinct_supports(H: Hypergraph) -> list[tuple[int, ...]]:
    """0-based vertex supports, deduplicated; order of first appearance."""
    seen = {}
    for row in H.canonical.tolist():
        s = tuple(sorted({v - 1 for v in row}))
        seen.setdefault(s, None)
    return list(seen)


def count_balanced_colorings(H: Hypergraph, k: int) -> int:
    """Exact number of balanced k-partitions with no monochromatic edge."""
    n = H.n
    if n % k:
        raise ValueError(f"k={k} does not divide n={n}")
    if balanced_partition_count(n, k) > MAX_BALANCED_PARTITIONS:
        raise ValueError(
            f"|Xi_{k}| for n={n} exceeds the enumeration guard ({MAX_BALANCED_PARTITIONS})"
        )
    # multiplicity matters: a repeated edge constrains exactly like one copy
    closing: list[list[tuple[int, ...]]] = [[] for _ in range(n)]
    for s in _distinct_supports(H):
        closing[s[-1]].append(s)

    block = n // k
    remaining = [block] * k
    color = [0] * n

    def walk(v: int) -> int:
        if v == n:
            return 1
        total = 0
        for c in range(k):
            if not remaining[c]:
                continue
            color[v] = c
            if any(all(color[u] == c for u in s) for s in closing[v]):
                continue
            remaining[c] -= 1
            total += walk(v + 1)
            remaining[c] += 1
        return total

    return walk(0)


class _Search:
    """Backtracking for weak k-colorability.

    Picks the unassigned vertex with the fewest admissible colors (ties broken
    by degree). A color is inadmissible for v when some edge through v has all
    its other vertices already colored alike with that color. New colors are
    opened one at a time, which removes color-permutation symmetry.
    """

    def __init__(self, supports: list[tuple[int, ...]], n: int, k: int, node_limit: int | None):
        self.k = k
        self.supports = supports
        self.incident: dict[int, list[tuple[int, ...]]] = {}
        for s in supports:
            for v in s:
                self.incident.setdefault(v, []).append(s)
        self.vertices = sorted(self.incident, key=lambda v: (-len(self.incident[v]), v))
        self.color = [-1] * n
        self.node_limit = node_limit
        self.nodes = 0

    def admissible(self, v: int, opened: int) -> list[int]:
        color = self.color
        banned = set()
        for s in self.incident[v]:
            shared = -1
            for u in s:
                if u == v:
                    continue
                cu = color[u]
                if cu < 0 or (shared >= 0 and cu != shared):
                    break
                shared = cu
            else:
                banned.add(shared)
        limit = min(self.k, opened + 1)
        return [c for c in range(limit) if c not in banned]

    def run(self, opened: int = 0, depth: int = 0) -> bool:
        if depth == len(self.vertices):
            return True
        self.nodes += 1
        if self.node_limit is not None and self.nodes > self.node_limit:
            raise SearchBudgetExceeded(f"no decision within {self.node_limit} nodes")
        best = None
        best_opts = None
        for v in self.vertices:
            if self.color[v] >= 0:
                continue
            opts = self.admissible(v, opened)
            if best_opts is None or len(opts) < len(best_opts):
                best, best_opts = v, opts
                if not opts:
                    return False
        for c in best_opts:
            self.color[best] = c
            if self.run(max(opened, c + 1), depth + 1):
                return True
        self.color[best] = -1
        return False


def is_k_colorable(H: Hypergraph, k: int, node_limit: int | None = DEFAULT_NODE_LIMIT) -> bool:
    """Whether some (not necessarily balanced) k-partition colors H.

    Raises ``SearchBudgetExceeded`` if ``node_limit`` search nodes pass
    without a decision; pass ``None`` to search without a budget.
    """
    supports = _distinct_supports(H)
    if any(len(s) == 1 for s in supports):
        return False
    if not supports:
        return True
    if k < 2:
        return False
    return _Search(supports, H.n, k, node_limit).run()


def chromatic_number(H: Hypergraph, node_limit: int | None = DEFAULT_NODE_LIMIT):
    """Smallest k with a k-coloring, or ``UNCOLORABLE`` if an edge has a single vertex."""
    supports = _distinct_supports(H)
    if any(len(s) == 1 for s in supports):
        return UNCOLORABLE
    if not supports:
        return 1
    k = 2
    while not is_k_colorable(H, k, node_limit):
        k += 1
    return k
