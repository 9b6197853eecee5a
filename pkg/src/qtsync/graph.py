"""Undirected simple graphs, constructive families, and quasi-threshold recognition.

A :class:`Graph` keeps two views of its adjacency: integer bitset rows for
constant-time edge queries in the induced-subgraph scans, and sorted neighbour
tuples for iteration. A dense boolean matrix is derived lazily for the energy
routines.
"""

from __future__ import annotations

import itertools
from collections.abc import Iterable, Iterator

import numpy as np

__all__ = [
    "Graph",
    "from_edge_list",
    "threshold_from_sequence",
    "complete_graph",
    "path_graph",
    "cycle_graph",
    "complete_split",
    "complete_bipartite",
    "add_universal_vertex",
    "disjoint_union",
    "is_quasi_threshold",
    "trivially_perfect_check",
    "labeled_graphs",
    "TRIVIALLY_PERFECT_MAX_N",
]

TRIVIALLY_PERFECT_MAX_N = 12

# Above this size the forbidden-subgraph scan switches to a numpy sweep.
_SCALAR_SCAN_MAX_N = 24


class Graph:
    """Immutable undirected simple graph on vertices ``0..n-1``.

    Parameters
    ----------
    n : int
        Number of vertices.
    edges : iterable of pairs
        Unordered vertex pairs. Duplicates and either orientation are accepted;
        self-loops and out-of-range indices raise ``ValueError``.
    """

    __slots__ = ("n", "edges", "bits", "neighbors", "_adjacency")

    def __init__(self, n: int, edges: Iterable[tuple[int, int]] = ()):
        n = int(n)
        if n < 0:
            raise ValueError(f"vertex count must be non-negative, got {n}")
        bits = [0] * n
        for pair in edges:
            i, j = (int(x) for x in pair)
            if not (0 <= i < n and 0 <= j < n):
                raise ValueError(f"edge ({i}, {j}) has an index outside 0..{n - 1}")
            if i == j:
                raise ValueError(f"self-loop at vertex {i} is not allowed")
            bits[i] |= 1 << j
            bits[j] |= 1 << i
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "bits", tuple(bits))
        nbrs = tuple(tuple(_iter_bits(b)) for b in bits)
        object.__setattr__(self, "neighbors", nbrs)
        object.__setattr__(
            self,
            "edges",
            tuple((i, j) for i in range(n) for j in nbrs[i] if i < j),
        )
        object.__setattr__(self, "_adjacency", None)

    def __setattr__(self, name, value):
        raise AttributeError("Graph is immutable")

    def __reduce__(self):
        return (Graph, (self.n, self.edges))

    @classmethod
    def from_adjacency(cls, adjacency) -> Graph:
        """Build from a square 0/1 matrix; it must be symmetric with zero diagonal."""
        a = np.asarray(adjacency)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError(f"adjacency must be square, got shape {a.shape}")
        if not np.all((a == 0) | (a == 1)):
            raise ValueError("adjacency entries must be 0 or 1")
        if not np.array_equal(a, a.T):
            raise ValueError("adjacency must be symmetric")
        if np.any(np.diag(a) != 0):
            raise ValueError("adjacency must have an empty diagonal")
        i, j = np.nonzero(np.triu(a, 1))
        return cls(a.shape[0], zip(i.tolist(), j.tolist()))

    @property
    def adjacency(self) -> np.ndarray:
        """Dense boolean adjacency matrix (read-only)."""
        if self._adjacency is None:
            a = np.zeros((self.n, self.n), dtype=bool)
            for i, j in self.edges:
                a[i, j] = a[j, i] = True
            a.setflags(write=False)
            object.__setattr__(self, "_adjacency", a)
        return self._adjacency

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def degree(self, v: int) -> int:
        return len(self.neighbors[v])

    def has_edge(self, i: int, j: int) -> bool:
        return bool(self.bits[i] >> j & 1)

    def laplacian(self) -> np.ndarray:
        a = self.adjacency.astype(float)
        return np.diag(a.sum(axis=1)) - a

    def induced(self, vertices: Iterable[int]) -> Graph:
        """Induced subgraph, relabelled to ``0..k-1`` in ascending vertex order."""
        vs = sorted(set(vertices))
        index = {v: k for k, v in enumerate(vs)}
        return Graph(
            len(vs),
            ((index[i], index[j]) for i, j in self.edges if i in index and j in index),
        )

    def connected_components(self) -> list[list[int]]:
        """Components as sorted vertex lists, ordered by smallest vertex."""
        seen = 0
        comps = []
        for s in range(self.n):
            if seen >> s & 1:
                continue
            comp = 1 << s
            frontier = comp
            while frontier:
                reach = 0
                for v in _iter_bits(frontier):
                    reach |= self.bits[v]
                frontier = reach & ~comp
                comp |= frontier
            seen |= comp
            comps.append(list(_iter_bits(comp)))
        return comps

    def is_connected(self) -> bool:
        return self.n <= 1 or len(self.connected_components()) == 1

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and self.edges == other.edges

    def __hash__(self):
        return hash((self.n, self.edges))

    def __repr__(self):
        return f"Graph(n={self.n}, edges={list(self.edges)})"


def _iter_bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def from_edge_list(n: int, edges: Iterable[tuple[int, int]]) -> Graph:
    """Graph with exactly the given edges, symmetrised and deduplicated."""
    return Graph(n, edges)


def threshold_from_sequence(bits: str) -> Graph:
    """Threshold graph of a binary creation sequence.

    Vertex 0 is the initial vertex and vertex ``k`` is added for ``bits[k-1]``:
    a ``1`` joins it to every earlier vertex, a ``0`` adds it isolated.
    """
    bad = set(bits) - {"0", "1"}
    if bad:
        raise ValueError(f"creation sequence must be binary, found {sorted(bad)!r}")
    edges = [(j, k) for k, b in enumerate(bits, start=1) if b == "1" for j in range(k)]
    return Graph(len(bits) + 1, edges)


def complete_graph(n: int) -> Graph:
    return Graph(n, itertools.combinations(range(n), 2))


def path_graph(n: int) -> Graph:
    return Graph(n, ((i, i + 1) for i in range(n - 1)))


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise ValueError(f"a cycle needs at least 3 vertices, got {n}")
    return Graph(n, [(i, (i + 1) % n) for i in range(n)])


def complete_split(clique_size: int, independent_size: int) -> Graph:
    """Clique on ``0..c-1``, independent set on the rest, all cross edges."""
    if clique_size < 1:
        raise ValueError(f"clique_size must be at least 1, got {clique_size}")
    if independent_size < 0:
        raise ValueError(f"independent_size must be non-negative, got {independent_size}")
    n = clique_size + independent_size
    edges = list(itertools.combinations(range(clique_size), 2))
    edges += [(i, j) for i in range(clique_size) for j in range(clique_size, n)]
    return Graph(n, edges)


def complete_bipartite(a: int, b: int) -> Graph:
    if a < 1 or b < 1:
        raise ValueError(f"both sides of K_(a,b) must be non-empty, got a={a}, b={b}")
    return Graph(a + b, [(i, j) for i in range(a) for j in range(a, a + b)])


def add_universal_vertex(g: Graph) -> Graph:
    """Append vertex ``g.n`` adjacent to every existing vertex."""
    return Graph(g.n + 1, list(g.edges) + [(i, g.n) for i in range(g.n)])


def disjoint_union(g1: Graph, g2: Graph) -> Graph:
    """Place ``g2`` after ``g1``, shifting its indices by ``g1.n``."""
    shift = g1.n
    return Graph(g1.n + g2.n, list(g1.edges) + [(i + shift, j + shift) for i, j in g2.edges])


def _induces_p4_or_c4(bits: tuple[int, ...], quad: tuple[int, int, int, int]) -> bool:
    mask = 0
    for v in quad:
        mask |= 1 << v
    degs = [bin(bits[v] & mask).count("1") for v in quad]
    e = sum(degs) // 2
    if e == 3:
        # 3 edges on 4 vertices: triangle+isolated (has 0), star (has 3), or P4
        return 0 not in degs and 3 not in degs
    if e == 4:
        # C4 or triangle with pendant; only C4 is 2-regular
        return max(degs) == 2
    return False


def is_quasi_threshold(g: Graph) -> bool:
    """True iff no four vertices induce a P4 or a C4 (exhaustive scan)."""
    if g.n < 4:
        return True
    if g.n <= _SCALAR_SCAN_MAX_N:
        return not any(
            _induces_p4_or_c4(g.bits, quad) for quad in itertools.combinations(range(g.n), 4)
        )
    return not _has_forbidden_quad_numpy(g.adjacency.astype(np.int8))


def _has_forbidden_quad_numpy(a: np.ndarray) -> bool:
    n = a.shape[0]
    for i in range(n - 3):
        for j in range(i + 1, n - 2):
            rest = np.arange(j + 1, n)
            c, d = np.meshgrid(rest, rest, indexing="ij")
            keep = c < d
            c, d = c[keep], d[keep]
            ij, ic, id_, jc, jd, cd = a[i, j], a[i, c], a[i, d], a[j, c], a[j, d], a[c, d]
            deg = np.stack([ij + ic + id_, ij + jc + jd, ic + jc + cd, id_ + jd + cd])
            e = deg.sum(axis=0) // 2
            lo, hi = deg.min(axis=0), deg.max(axis=0)
            p4 = (e == 3) & (lo > 0) & (hi < 3)
            c4 = (e == 4) & (hi == 2)
            if np.any(p4 | c4):
                return True
    return False


def _independence_numbers(bits: tuple[int, ...], n: int) -> list[int]:
    """Independence number of every induced subgraph, indexed by vertex mask."""
    full = (1 << n) - 1
    alpha = [0] * (1 << n)
    for mask in range(1, 1 << n):
        v = mask.bit_length() - 1
        rest = mask ^ (1 << v)
        alpha[mask] = max(alpha[rest], 1 + alpha[rest & ~bits[v] & full])
    return alpha


def _maximal_clique_counts(bits: tuple[int, ...], n: int) -> np.ndarray:
    """Number of maximal cliques of every induced subgraph, indexed by vertex mask.

    A clique ``C`` of ``g`` is maximal in ``H`` iff ``C`` lies in ``H`` and no
    vertex of ``H`` is adjacent to all of ``C``.
    """
    full = (1 << n) - 1
    is_clique = [True] * (1 << n)
    common = [full] * (1 << n)
    for mask in range(1, 1 << n):
        v = mask.bit_length() - 1
        rest = mask ^ (1 << v)
        is_clique[mask] = is_clique[rest] and rest & ~bits[v] == 0
        common[mask] = common[rest] & bits[v]
    cliques = np.array([m for m in range(1, 1 << n) if is_clique[m]], dtype=np.int64)
    ext = np.array([common[m] for m in cliques], dtype=np.int64)
    h = np.arange(1 << n, dtype=np.int64)[:, None]
    inside = (cliques[None, :] & ~h) == 0
    blocked = (ext[None, :] & h) != 0
    return (inside & ~blocked).sum(axis=1)


def trivially_perfect_check(g: Graph) -> bool:
    """Brute-force test that every induced subgraph has as many maximal cliques
    as its independence number.

    Exponential in ``g.n``; only accepted up to ``TRIVIALLY_PERFECT_MAX_N`` vertices.
    """
    if g.n > TRIVIALLY_PERFECT_MAX_N:
        raise ValueError(
            f"trivially_perfect_check is exponential and limited to "
            f"n <= {TRIVIALLY_PERFECT_MAX_N} vertices, got n={g.n}"
        )
    alpha = np.array(_independence_numbers(g.bits, g.n))
    return bool(np.array_equal(alpha, _maximal_clique_counts(g.bits, g.n)))


def labeled_graphs(n: int) -> Iterator[Graph]:
    """Every labelled simple graph on ``n`` vertices (2**C(n,2) of them)."""
    pairs = list(itertools.combinations(range(n), 2))
    for code in range(1 << len(pairs)):
        yield Graph(n, (p for k, p in enumerate(pairs) if code >> k & 1))
