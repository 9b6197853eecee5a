"""Rooted forests and their comparability graphs.

A connected quasi-threshold graph is the comparability graph of a rooted tree:
two vertices are adjacent exactly when one is a proper ancestor of the other.
This module converts between the two views and enumerates small rooted trees.
"""

from __future__ import annotations

import itertools
from collections.abc import Iterable, Iterator, Sequence
from functools import lru_cache

from .graph import Graph

__all__ = [
    "RootedForest",
    "comparability_closure",
    "caterpillar_from_sequence",
    "tree_representation",
    "rooted_trees",
    "canonical_form",
    "NotQuasiThresholdError",
]


class NotQuasiThresholdError(ValueError):
    """The graph has no tree representation."""


class RootedForest:
    """Parent-array forest; ``parent[v] is None`` marks a root.

    The constructor rejects cycles and out-of-range parents, so every instance
    satisfies the forest invariants.
    """

    __slots__ = ("parent", "_children", "_depth")

    def __init__(self, parent: Sequence[int | None]):
        parent = tuple(None if p is None else int(p) for p in parent)
        n = len(parent)
        for v, p in enumerate(parent):
            if p is not None and not 0 <= p < n:
                raise ValueError(f"parent of node {v} is {p}, outside 0..{n - 1}")
            if p == v:
                raise ValueError(f"node {v} is its own parent")
        depth: list[int | None] = [None] * n
        for v in range(n):
            path = []
            u: int | None = v
            while u is not None and depth[u] is None:
                if u in path:
                    raise ValueError(f"parent array has a cycle through node {u}")
                path.append(u)
                u = parent[u]
            base = -1 if u is None else depth[u]
            for w in reversed(path):
                base += 1
                depth[w] = base
        children: list[list[int]] = [[] for _ in range(n)]
        for v, p in enumerate(parent):
            if p is not None:
                children[p].append(v)
        self.parent = parent
        self._children = tuple(tuple(c) for c in children)
        self._depth = tuple(depth)

    @property
    def n(self) -> int:
        return len(self.parent)

    @property
    def roots(self) -> list[int]:
        return [v for v, p in enumerate(self.parent) if p is None]

    def _check(self, v: int) -> None:
        if not 0 <= v < self.n:
            raise IndexError(f"node {v} is outside 0..{self.n - 1}")

    def children(self, v: int) -> tuple[int, ...]:
        self._check(v)
        return self._children[v]

    def is_leaf(self, v: int) -> bool:
        return not self.children(v)

    def depth(self, v: int) -> int:
        self._check(v)
        return self._depth[v]

    def height(self) -> int:
        return max(self._depth, default=0)

    def ancestors(self, v: int) -> set[int]:
        self._check(v)
        out = set()
        p = self.parent[v]
        while p is not None:
            out.add(p)
            p = self.parent[p]
        return out

    def descendants(self, v: int) -> set[int]:
        self._check(v)
        out: set[int] = set()
        stack = list(self._children[v])
        while stack:
            u = stack.pop()
            out.add(u)
            stack.extend(self._children[u])
        return out

    def nodes_at_depth(self, d: int) -> list[int]:
        return [v for v in range(self.n) if self._depth[v] == d]

    def __eq__(self, other):
        if not isinstance(other, RootedForest):
            return NotImplemented
        return self.parent == other.parent

    def __hash__(self):
        return hash(self.parent)

    def __repr__(self):
        return f"RootedForest(parent={list(self.parent)})"


def comparability_closure(f: RootedForest) -> Graph:
    """Graph joining every node to each of its proper ancestors."""
    return Graph(f.n, ((a, v) for v in range(f.n) for a in f.ancestors(v)))


def caterpillar_from_sequence(bits: str) -> RootedForest:
    """Rooted caterpillar whose comparability graph is the threshold graph of ``bits``.

    The spine holds the universal vertices, latest-added at the root; the
    initial vertex sits at the bottom of the spine when the first bit is 1.
    Every isolated vertex hangs off the nearest universal vertex added after it.
    """
    bad = set(bits) - {"0", "1"}
    if bad:
        raise ValueError(f"creation sequence must be binary, found {sorted(bad)!r}")
    if bits.endswith("0"):
        raise ValueError(
            "sequence ends in 0: the trailing isolated vertices have no later "
            "universal vertex to attach to and the threshold graph is disconnected"
        )
    n = len(bits) + 1
    parent: list[int | None] = [None] * n
    spine = [k for k, b in enumerate(bits, start=1) if b == "1"]
    if bits.startswith("1"):
        spine.insert(0, 0)
    # spine is in insertion order; each member's parent is the next one added
    for lower, upper in zip(spine, spine[1:]):
        parent[lower] = upper
    next_universal = None
    for k in range(n - 1, -1, -1):
        if k in spine:
            next_universal = k
        else:
            parent[k] = next_universal
    return RootedForest(parent)


def tree_representation(g: Graph) -> RootedForest:
    """Rooted forest whose comparability graph is ``g``.

    In each connected component the universal vertices form the top of the
    tree, chained in ascending index order; the construction then recurses on
    the components left after deleting them.

    Raises
    ------
    NotQuasiThresholdError
        If some component met during the recursion has no universal vertex.
    """
    parent: list[int | None] = [None] * g.n
    work: list[tuple[frozenset[int], int | None]] = [
        (frozenset(c), None) for c in g.connected_components()
    ]
    while work:
        comp, top = work.pop()
        mask = 0
        for v in comp:
            mask |= 1 << v
        universal = sorted(v for v in comp if (g.bits[v] & mask) | (1 << v) == mask)
        if not universal:
            raise NotQuasiThresholdError(
                f"component {sorted(comp)} has no universal vertex, so the graph "
                f"is not quasi-threshold"
            )
        for v in universal:
            parent[v] = top
            top = v
        rest = g.induced(comp - set(universal))
        labels = sorted(comp - set(universal))
        for sub in rest.connected_components():
            work.append((frozenset(labels[i] for i in sub), top))
    return RootedForest(parent)


@lru_cache(maxsize=None)
def _trees(n: int) -> tuple[tuple, ...]:
    """Canonical nested-tuple shapes of all unlabelled rooted trees with ``n`` nodes."""
    if n == 1:
        return ((),)
    out = []
    for forest in _forests(n - 1):
        out.append(forest)
    return tuple(out)


@lru_cache(maxsize=None)
def _forests(m: int) -> tuple[tuple, ...]:
    """Multisets of rooted trees with ``m`` nodes in total, each as a sorted tuple."""
    out = []
    for parts in _partitions(m, m):
        counts: dict[int, int] = {}
        for p in parts:
            counts[p] = counts.get(p, 0) + 1
        choices = [
            list(itertools.combinations_with_replacement(_trees(size), k))
            for size, k in sorted(counts.items(), reverse=True)
        ]
        for combo in itertools.product(*choices):
            out.append(tuple(t for group in combo for t in group))
    return tuple(out)


def _partitions(m: int, largest: int) -> Iterator[tuple[int, ...]]:
    if m == 0:
        yield ()
        return
    for first in range(min(m, largest), 0, -1):
        for rest in _partitions(m - first, first):
            yield (first,) + rest


def _shape_to_parents(shape: tuple) -> list[int | None]:
    parent: list[int | None] = [None]
    stack = [(shape, 0)]
    while stack:
        node, idx = stack.pop()
        for child in reversed(node):
            parent.append(idx)
            stack.append((child, len(parent) - 1))
    return parent


def rooted_trees(n: int) -> list[RootedForest]:
    """All unlabelled rooted trees on ``n`` nodes, one representative each.

    Nodes are numbered in depth-first order with the root at 0. The output
    order is deterministic.
    """
    if n < 1:
        raise ValueError(f"a rooted tree needs at least one node, got {n}")
    return [RootedForest(_shape_to_parents(s)) for s in _trees(n)]


def canonical_form(f: RootedForest) -> str:
    """AHU-style string identifying ``f`` up to relabelling."""

    def enc(v: int) -> str:
        return "(" + "".join(sorted(enc(c) for c in f.children(v))) + ")"

    return "".join(sorted(enc(r) for r in f.roots))


def forests_from_parent_arrays(n: int) -> Iterable[RootedForest]:
    """Every tree with ``parent[v] < v`` for ``v >= 1`` (labelled, with repeats)."""
    for tail in itertools.product(*(range(v) for v in range(1, n))):
        yield RootedForest((None,) + tail)
