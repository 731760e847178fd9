"""Graph corpora shared by the test modules."""

from __future__ import annotations

import random
from fractions import Fraction
from functools import lru_cache

import networkx as nx
import numpy as np

from spreadopt import Graph, Objective, parse_graph

P3 = "1 2\n2 3\n"
S3 = "0 1\n0 2\n0 3\n"
C4 = "1 2\n2 3\n3 4\n4 1\n"
K2 = "a b\n"
K3 = "1 2\n2 3\n1 3\n"


def from_nx(h: nx.Graph) -> Graph:
    return Graph.from_edges(((u, v) for u, v in h.edges()), nodes=h.nodes())


@lru_cache(maxsize=None)
def atlas(max_n: int) -> tuple[Graph, ...]:
    """Every connected graph on 2..max_n nodes, one per isomorphism class."""
    out = []
    for h in nx.graph_atlas_g():
        if 2 <= h.number_of_nodes() <= max_n and nx.is_connected(h):
            out.append(from_nx(h))
    return tuple(out)


def random_connected(rng: random.Random, n: int, p: float = 0.3) -> Graph:
    edges = set()
    for v in range(1, n):
        edges.add((rng.randrange(v), v))
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < p:
                edges.add((u, v))
    return Graph.from_edges(edges, nodes=range(n))


@lru_cache(maxsize=None)
def random_corpus(count: int = 100, max_n: int = 10, seed: int = 20240917) -> tuple[Graph, ...]:
    rng = random.Random(seed)
    return tuple(
        random_connected(rng, rng.randint(3, max_n), rng.choice([0.15, 0.3, 0.5]))
        for _ in range(count)
    )


def canonical() -> dict[str, Graph]:
    return {name: parse_graph(src) for name, src in
            {"P3": P3, "S3": S3, "C4": C4, "K2": K2, "K3": K3}.items()}


def exact_hitting(g: Graph, target: set[str]) -> dict[str, Fraction]:
    """Hitting times by Gauss-Jordan elimination over the rationals.

    Shares nothing with the package solver beyond the Graph structure.
    """
    out = [i for i in range(g.n) if g.labels[i] not in target]
    pos = {v: k for k, v in enumerate(out)}
    n = len(out)
    rows = []
    for v in out:
        nbrs = g.neighbors[v]
        if g.weights is None:
            w = {u: Fraction(1) for u in nbrs}
        else:
            w = {}
            for k, (a, b) in enumerate(g.edges):
                if v in (a, b):
                    w[b if a == v else a] = Fraction(g.weights[k])
        total = sum(w.values())
        row = [Fraction(0)] * (n + 1)
        row[pos[v]] += 1
        for u, wu in w.items():
            if u in pos:
                row[pos[u]] -= wu / total
        row[n] = Fraction(1)
        rows.append(row)
    for col in range(n):
        piv = next(r for r in range(col, n) if rows[r][col] != 0)
        rows[col], rows[piv] = rows[piv], rows[col]
        pv = rows[col][col]
        rows[col] = [x / pv for x in rows[col]]
        for r in range(n):
            if r != col and rows[r][col] != 0:
                f = rows[r][col]
                rows[r] = [a - f * b for a, b in zip(rows[r], rows[col])]
    return {g.labels[v]: rows[pos[v]][n] for v in out}


# informational lines printed after the acceptance summary
NOTES: list[str] = []


@lru_cache(maxsize=None)
def f_table(g: Graph):
    """F over every bitmask of ``g`` (index 0, the empty set, is NaN)."""
    obj = Objective(g)
    out = np.full(1 << g.n, np.nan)
    for mask in range(1, 1 << g.n):
        out[mask] = obj(mask)
    return out
