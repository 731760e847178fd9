"""Mean first-arrival times of a random walk to a target set.

For a target ``A`` the vector ``h`` of expected hitting times over the
nodes outside ``A`` solves ``h = 1 + P_A h`` where ``P_A`` is the walk
matrix with the rows and columns of ``A`` deleted.  The spread objective
is ``F(A) = sum(h)``.  A Monte Carlo simulator gives an independent check.
"""

from __future__ import annotations

import math
from collections.abc import Iterable
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from scipy.sparse import linalg as splinalg

from .errors import EmptyTargetError, InvariantError, StepCapExceeded
from .graph import Graph, transition_matrix

__all__ = [
    "HittingProfile",
    "McEstimate",
    "Objective",
    "hitting_times",
    "spread_objective",
    "mc_hitting",
    "DENSE_LIMIT",
    "RESIDUAL_TOL",
]

DENSE_LIMIT = 2048
RESIDUAL_TOL = 1e-10


@dataclass(frozen=True)
class HittingProfile:
    """Expected hitting times ``h(i, A)`` for every node ``i`` outside ``A``."""

    target: frozenset[str]
    times: dict[str, float] = field(hash=False)

    @property
    def total(self) -> float:
        return math.fsum(self.times.values())


@dataclass(frozen=True)
class McEstimate:
    mean: float
    stderr: float
    walks: int
    seed: int


def _solve(g: Graph, mask: int, method: str = "auto") -> tuple[np.ndarray, np.ndarray]:
    """Return ``(outside_indices, h)`` for target bitmask ``mask``."""
    if mask == 0:
        raise EmptyTargetError("target set must be non-empty")
    n = g.n
    outside = np.array([i for i in range(n) if not mask >> i & 1], dtype=np.int64)
    if outside.size == 0:
        return outside, np.zeros(0)
    if method == "auto":
        method = "dense" if outside.size <= DENSE_LIMIT else "sparse"

    if method == "dense":
        p = g.dense_transition()
        m = np.eye(outside.size) - p[np.ix_(outside, outside)]
        h = np.linalg.solve(m, np.ones(outside.size))
        op = m
    else:
        p = transition_matrix(g).matrix[outside][:, outside]
        p = sparse.csr_array(p)
        op = sparse.csr_array(sparse.eye_array(outside.size) - p)
        if method == "sparse":
            h = splinalg.spsolve(op.tocsc(), np.ones(outside.size))
        elif method == "fixed_point":
            h = _fixed_point(p, outside.size)
        else:
            raise ValueError(f"unknown solver method {method!r}")

    h = np.asarray(h, dtype=float)
    bound = RESIDUAL_TOL * (1.0 + np.abs(h).max())
    resid = op @ h - 1.0
    if np.abs(resid).max() > bound:
        # one step of iterative refinement before giving up
        if method == "dense":
            h = h - np.linalg.solve(op, resid)
        else:
            h = h - splinalg.spsolve(op.tocsc(), resid)
        resid = op @ h - 1.0
        if np.abs(resid).max() > RESIDUAL_TOL * (1.0 + np.abs(h).max()):
            raise InvariantError(f"hitting-time solve residual {np.abs(resid).max():.3e} too large")
    return outside, h


def _fixed_point(p_a, size: int, max_iter: int = 10_000_000) -> np.ndarray:
    # P_A is strictly substochastic on a connected graph, so this contracts;
    # the residual of the returned iterate is bounded by the last update
    h = np.ones(size)
    for _ in range(max_iter):
        nxt = 1.0 + p_a @ h
        if np.abs(nxt - h).max() <= RESIDUAL_TOL * (1.0 + np.abs(nxt).max()):
            return nxt
        h = nxt
    raise InvariantError(f"fixed-point iteration did not converge in {max_iter} steps")


def hitting_times(g: Graph, target: Iterable, method: str = "auto") -> HittingProfile:
    """Expected hitting times to ``target`` from every node outside it.

    ``method`` is ``"auto"`` (dense LU up to ``DENSE_LIMIT`` free nodes,
    sparse LU beyond), ``"dense"``, ``"sparse"`` or ``"fixed_point"``.
    """
    mask = g.mask(target)
    outside, h = _solve(g, mask, method)
    times = {g.labels[i]: float(v) for i, v in zip(outside, h)}
    return HittingProfile(g.nodeset(mask), times)


def spread_objective(g: Graph, target: Iterable, method: str = "auto") -> float:
    """F(A): total expected hitting time to ``target`` over nodes outside it."""
    _, h = _solve(g, g.mask(target), method)
    return math.fsum(h)


class Objective:
    """Memoized F over node bitmasks of a single graph.

    Values are cached per mask, so repeated evaluation across seeds,
    enumeration and curvature sweeps solves each linear system once.
    """

    def __init__(self, g: Graph, method: str = "auto"):
        self.graph = g
        self.method = method
        self._cache: dict[int, float] = {}

    def __call__(self, mask: int) -> float:
        try:
            return self._cache[mask]
        except KeyError:
            pass
        _, h = _solve(self.graph, mask, self.method)
        val = math.fsum(h)
        self._cache[mask] = val
        return val

    def of(self, labels: Iterable) -> float:
        return self(self.graph.mask(labels))

    @property
    def evaluations(self) -> int:
        return len(self._cache)


def _row_cumulative(g: Graph) -> tuple[np.ndarray, np.ndarray]:
    """Per-row cumulative probabilities, offset by row index.

    Row ``r`` occupies ``(r, r + 1]`` so a single ``searchsorted`` on
    ``r + u`` samples the next node for a whole batch of walkers.
    """
    p = transition_matrix(g).matrix
    indptr, indices, data = p.indptr, p.indices, p.data
    cum = np.empty_like(data)
    for r in range(g.n):
        a, b = indptr[r], indptr[r + 1]
        seg = np.cumsum(data[a:b])
        seg[-1] = 1.0
        cum[a:b] = seg + r
    return cum, indices.astype(np.int64)


def mc_hitting(
    g: Graph,
    target: Iterable,
    start,
    walks: int = 10_000,
    seed: int = 0,
    step_cap: int = 10_000_000,
    block_size: int = 8192,
) -> McEstimate:
    """Simulate ``walks`` walks from ``start`` and average their hitting times.

    Walks run in blocks; block ``b`` draws from the ``b``-th child of
    ``SeedSequence(seed)`` so results do not depend on block scheduling.
    """
    if walks < 1:
        raise ValueError("walks must be >= 1")
    mask = g.mask(target)
    if mask == 0:
        raise EmptyTargetError("target set must be non-empty")
    s = g.index(start)
    if mask >> s & 1:
        raise ValueError(f"start node {start!r} lies inside the target set")

    cum, nbr = _row_cumulative(g)
    in_target = np.array([bool(mask >> i & 1) for i in range(g.n)])
    nblocks = -(-walks // block_size)
    children = np.random.SeedSequence(seed).spawn(nblocks)
    times = np.zeros(walks, dtype=np.int64)
    done = 0

    for b, child in enumerate(children):
        rng = np.random.default_rng(child)
        k = min(block_size, walks - b * block_size)
        pos = np.full(k, s, dtype=np.int64)
        active = np.arange(k)
        block = times[b * block_size : b * block_size + k]
        step = 0
        while active.size:
            step += 1
            if step > step_cap:
                finished = np.concatenate([times[:done], block[block > 0]])
                partial = _summarize(finished, seed) if finished.size else None
                raise StepCapExceeded(
                    f"{active.size} walks exceeded the step cap of {step_cap}", partial
                )
            cur = pos[active]
            nxt = nbr[np.searchsorted(cum, cur + rng.random(active.size), side="right")]
            pos[active] = nxt
            hit = in_target[nxt]
            block[active[hit]] = step
            active = active[~hit]
        done += k
    return _summarize(times, seed)


def _summarize(times: np.ndarray, seed: int) -> McEstimate:
    n = int(times.size)
    mean = float(times.mean())
    stderr = float(times.std(ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    return McEstimate(mean=mean, stderr=stderr, walks=n, seed=seed)
