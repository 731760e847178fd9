"""Undirected graphs and their random-walk transition matrices.

Node labels are strings on the outside and dense indices ``0..N-1`` on
the inside.  Indices follow the natural sort of the labels (integer
labels numerically, everything else as text), so index order and the
label tie-break order used throughout the package coincide.  Node sets
are passed around internally as integer bitmasks over those indices.
"""

from __future__ import annotations

import math
from collections import deque
from collections.abc import Iterable
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

import numpy as np
from scipy import sparse

from .errors import DisconnectedError, ParseError, SelfLoopError, UnknownNodeError

__all__ = [
    "Graph",
    "TransitionMatrix",
    "label_key",
    "parse_graph",
    "read_graph",
    "transition_matrix",
    "is_bipartite",
]


def label_key(label: str):
    """Sort key putting integer-like labels first, in numeric order."""
    try:
        return (0, int(label), label)
    except ValueError:
        return (1, 0, label)


def iter_bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


@lru_cache(maxsize=1 << 16)
def bits(mask: int) -> tuple[int, ...]:
    """Set bit positions of ``mask``, ascending (cached)."""
    return tuple(iter_bits(mask))


class Graph:
    """Immutable, connected, simple undirected graph.

    Use :meth:`from_edges` or :func:`parse_graph` rather than calling the
    constructor with raw indices.
    """

    __slots__ = ("labels", "edges", "weights", "_index", "neighbors", "adj_masks", "_dense_p")

    def __init__(self, labels, edges, weights=None):
        self.labels: tuple[str, ...] = tuple(labels)
        self.edges: tuple[tuple[int, int], ...] = tuple(edges)
        self.weights: tuple[float, ...] | None = None if weights is None else tuple(weights)
        self._index = {lab: i for i, lab in enumerate(self.labels)}
        nbrs: list[list[int]] = [[] for _ in self.labels]
        for i, j in self.edges:
            nbrs[i].append(j)
            nbrs[j].append(i)
        self.neighbors: tuple[tuple[int, ...], ...] = tuple(tuple(sorted(x)) for x in nbrs)
        self.adj_masks: tuple[int, ...] = tuple(sum(1 << j for j in x) for x in self.neighbors)
        self._dense_p = None
        self._validate()

    @classmethod
    def from_edges(cls, edges: Iterable, nodes: Iterable | None = None) -> "Graph":
        """Build a graph from ``(u, v)`` or ``(u, v, weight)`` tuples.

        Labels are converted with ``str``.  Edges are stored with the
        smaller index first and sorted, so input order never matters.
        """
        triples = []
        for e in edges:
            if len(e) == 2:
                u, v = e
                w = None
            elif len(e) == 3:
                u, v, w = e
            else:
                raise ParseError(f"edge must have 2 or 3 fields: {e!r}")
            u, v = str(u), str(v)
            if u == v:
                raise SelfLoopError(f"self-loop on node {u!r}")
            if w is not None:
                w = float(w)
                if not (w > 0 and math.isfinite(w)):
                    raise ParseError(f"edge ({u}, {v}) has non-positive weight {w!r}")
            triples.append((u, v, w))

        names = {str(x) for x in nodes} if nodes is not None else set()
        for u, v, _ in triples:
            names.update((u, v))
        labels = sorted(names, key=label_key)
        index = {lab: i for i, lab in enumerate(labels)}

        seen: dict[tuple[int, int], float | None] = {}
        for u, v, w in triples:
            i, j = sorted((index[u], index[v]))
            if (i, j) in seen:
                raise ParseError(f"duplicate edge ({u}, {v})")
            seen[(i, j)] = w
        order = sorted(seen)
        weights = None
        if any(w is not None for w in seen.values()):
            weights = [1.0 if seen[e] is None else seen[e] for e in order]
        return cls(labels, order, weights)

    def _validate(self) -> None:
        n = len(self.labels)
        if n < 2:
            raise ParseError(f"graph needs at least 2 nodes, got {n}")
        for i, j in self.edges:
            if i == j:
                raise SelfLoopError(f"self-loop on node {self.labels[i]!r}")
        if len(set(self.edges)) != len(self.edges):
            raise ParseError("duplicate edge")
        seen = 1
        todo = [0]
        while todo:
            v = todo.pop()
            fresh = self.adj_masks[v] & ~seen
            seen |= fresh
            todo.extend(iter_bits(fresh))
        if seen != self.full_mask:
            missing = [self.labels[i] for i in range(n) if not seen >> i & 1]
            raise DisconnectedError(
                f"graph is not connected; unreachable from {self.labels[0]!r}: {missing[:10]}"
            )

    # --- sizes and lookups -------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.labels)

    @property
    def full_mask(self) -> int:
        return (1 << len(self.labels)) - 1

    def __len__(self) -> int:
        return len(self.labels)

    def __repr__(self) -> str:
        return f"Graph(N={self.n}, |E|={len(self.edges)}, weighted={self.weights is not None})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (self.labels, self.edges, self.weights) == (other.labels, other.edges, other.weights)

    def __hash__(self) -> int:
        return hash((self.labels, self.edges, self.weights))

    def index(self, label) -> int:
        try:
            return self._index[str(label)]
        except KeyError:
            raise UnknownNodeError(f"unknown node {label!r}") from None

    def mask(self, labels: Iterable) -> int:
        """Bitmask of a collection of labels."""
        if isinstance(labels, str):
            labels = [labels]
        m = 0
        for lab in labels:
            m |= 1 << self.index(lab)
        return m

    def labels_of(self, mask: int) -> tuple[str, ...]:
        return tuple(self.labels[i] for i in iter_bits(mask))

    def nodeset(self, mask: int) -> frozenset[str]:
        return frozenset(self.labels_of(mask))

    @staticmethod
    def set_key(mask: int) -> tuple:
        """Order by size, then lexicographically on the sorted index tuple."""
        return (mask.bit_count(), tuple(iter_bits(mask)))

    def degree(self, label) -> int:
        return len(self.neighbors[self.index(label)])

    def is_cover_mask(self, mask: int) -> bool:
        return all(mask >> i & 1 or mask >> j & 1 for i, j in self.edges)

    # --- walk ---------------------------------------------------------------

    def dense_transition(self) -> np.ndarray:
        """Dense row-stochastic matrix; cached, treat as read-only."""
        if self._dense_p is None:
            p = transition_matrix(self).matrix.toarray()
            p.setflags(write=False)
            self._dense_p = p
        return self._dense_p

    def to_edge_list(self) -> str:
        lines = []
        for k, (i, j) in enumerate(self.edges):
            if self.weights is None:
                lines.append(f"{self.labels[i]} {self.labels[j]}")
            else:
                lines.append(f"{self.labels[i]} {self.labels[j]} {self.weights[k]!r}")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class TransitionMatrix:
    """Row-stochastic walk matrix over ``labels`` (sparse CSR)."""

    labels: tuple[str, ...]
    matrix: sparse.csr_array

    def dense(self) -> np.ndarray:
        return self.matrix.toarray()

    def row(self, label) -> dict[str, float]:
        i = self.labels.index(str(label))
        start, stop = self.matrix.indptr[i], self.matrix.indptr[i + 1]
        return {
            self.labels[j]: float(p)
            for j, p in zip(self.matrix.indices[start:stop], self.matrix.data[start:stop])
        }


def transition_matrix(g: Graph) -> TransitionMatrix:
    """p(i, j) = w(i, j) / sum_k w(i, k); unit weights give 1/deg(i)."""
    n = g.n
    w = np.ones(len(g.edges)) if g.weights is None else np.asarray(g.weights, dtype=float)
    e = np.asarray(g.edges, dtype=np.int64).reshape(-1, 2)
    rows = np.concatenate([e[:, 0], e[:, 1]])
    cols = np.concatenate([e[:, 1], e[:, 0]])
    vals = np.concatenate([w, w])
    adj = sparse.csr_array((vals, (rows, cols)), shape=(n, n))
    adj.sort_indices()
    strength = np.asarray(adj.sum(axis=1)).ravel()
    p = sparse.csr_array(sparse.diags_array(1.0 / strength) @ adj)
    p.sort_indices()
    return TransitionMatrix(g.labels, p)


def is_bipartite(g: Graph) -> bool:
    color = [-1] * g.n
    color[0] = 0
    queue = deque([0])
    while queue:
        v = queue.popleft()
        for u in g.neighbors[v]:
            if color[u] < 0:
                color[u] = 1 - color[v]
                queue.append(u)
            elif color[u] == color[v]:
                return False
    return True


def parse_graph(source: str) -> Graph:
    """Parse edge-list text: ``<label> <label> [weight]`` per line.

    ``#`` starts a comment and blank lines are skipped.
    """
    edges = []
    for lineno, raw in enumerate(source.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) not in (2, 3):
            raise ParseError(f"line {lineno}: expected '<label> <label> [weight]', got {raw!r}")
        if len(parts) == 3:
            try:
                weight = float(parts[2])
            except ValueError:
                raise ParseError(f"line {lineno}: bad weight {parts[2]!r}") from None
            edges.append((parts[0], parts[1], weight))
        else:
            edges.append((parts[0], parts[1]))
    if not edges:
        raise ParseError("no edges found")
    return Graph.from_edges(edges)


def read_graph(path) -> Graph:
    return parse_graph(Path(path).read_text(encoding="utf-8"))
