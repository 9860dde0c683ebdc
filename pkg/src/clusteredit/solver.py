"""Exact optimum oracles.

``brute_force_opt`` scores every set partition (restricted-growth strings in
lexicographic order, vectorised over numpy blocks). ``branch_opt`` is a
conflict-triple search tree with a packing lower bound. ``lift_solution``
turns a clustering of a kernel back into edits of the original graph.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator

import numpy as np

from .instance import (
    EPS,
    ClusterEditError,
    Clustering,
    ContractError,
    EditSet,
    Instance,
    Mode,
    clustering_to_edits,
    connected_components,
)
from .kernel import KernelResult

BRUTE_FORCE_LIMIT = 13
_CACHE_N = 11
_BLOCK_ROWS = 1 << 19


class GuardError(ClusterEditError):
    """The instance is too large for the requested engine."""


@dataclass
class OptResult:
    opt_weight: float
    witness: Clustering | None
    all_optima: list[Clustering] | None = None
    nodes: int = 0

    def to_record(self) -> dict:
        return {
            "opt_weight": None if math.isinf(self.opt_weight) else self.opt_weight,
            "clusters": None if self.witness is None
            else [sorted(b) for b in self.witness.blocks],
            "node_count_explored": self.nodes,
        }


# -- brute force -------------------------------------------------------------------


@lru_cache(maxsize=None)
def _rgs_table(n: int) -> tuple[np.ndarray, np.ndarray]:
    """All restricted-growth strings of length ``n`` and their maxima."""
    if n == 0:
        return np.zeros((1, 0), dtype=np.int8), np.full(1, -1, dtype=np.int8)
    table, mx = _rgs_table(n - 1)
    return _extend(table, mx)


def _extend(table: np.ndarray, mx: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    counts = mx.astype(np.int64) + 2
    total = int(counts.sum())
    starts = np.repeat(np.cumsum(counts) - counts, counts)
    last = (np.arange(total) - starts).astype(np.int8)
    out = np.empty((total, table.shape[1] + 1), dtype=np.int8, order="F")
    out[:, :-1] = np.repeat(table, counts, axis=0)
    out[:, -1] = last
    return out, np.maximum(np.repeat(mx, counts), last)


def _rgs_blocks(n: int) -> Iterator[np.ndarray]:
    if n <= _CACHE_N:
        yield _rgs_table(n)[0]
        return

    def walk(depth: int, table: np.ndarray, mx: np.ndarray) -> Iterator[np.ndarray]:
        if depth == n:
            yield table
            return
        for lo in range(0, len(table), _BLOCK_ROWS):
            t, m = _extend(table[lo:lo + _BLOCK_ROWS], mx[lo:lo + _BLOCK_ROWS])
            yield from walk(depth + 1, t, m)

    yield from walk(_CACHE_N, *_rgs_table(_CACHE_N))


def _partition_costs(g: Instance, table: np.ndarray) -> np.ndarray:
    cost = np.zeros(len(table))
    for i in range(g.n):
        col_i = table[:, i]
        for j in range(i + 1, g.n):
            w = g.weight[i, j]
            same = col_i == table[:, j]
            if g.adj[i, j]:
                cost += np.where(same, 0.0, w)
            else:
                cost += np.where(same, w, 0.0)
    return cost


def _tolerance(g: Instance, value: float) -> float:
    return EPS * max(1.0, abs(value)) if g.mode is Mode.REAL else 0.0


def brute_force_opt(g: Instance, enumerate_all: bool = False) -> OptResult:
    """Minimum-weight clustering by enumerating all set partitions."""
    if g.n > BRUTE_FORCE_LIMIT:
        raise GuardError(f"brute force is limited to {BRUTE_FORCE_LIMIT} vertices, got {g.n}")
    if g.n == 0:
        c = Clustering([])
        return OptResult(0.0, c, [c] if enumerate_all else None, 1)
    best = math.inf
    best_row = None
    rows = 0
    for table in _rgs_blocks(g.n):
        rows += len(table)
        cost = _partition_costs(g, table)
        i = int(np.argmin(cost))
        if cost[i] < best:
            best, best_row = float(cost[i]), table[i].copy()
    if best_row is None:
        return OptResult(math.inf, None, [] if enumerate_all else None, rows)
    optima = None
    if enumerate_all:
        cutoff = best + _tolerance(g, best)
        optima = []
        for table in _rgs_blocks(g.n):
            cost = _partition_costs(g, table)
            optima.extend(Clustering.from_labels(r) for r in table[cost <= cutoff])
    return OptResult(best, Clustering.from_labels(best_row), optima, rows)


# -- branching ---------------------------------------------------------------------


class _Search:
    def __init__(self, g: Instance, bound: float) -> None:
        self.n = g.n
        self.adj = [row[:] for row in g.adj.tolist()]
        # Editable cost of each pair; inf marks a pair that may no longer change.
        self.cost = [row[:] for row in g.weight.tolist()]
        self.best = bound
        self.best_labels: list[int] | None = None
        self.nodes = 0
        self.tol = EPS if g.mode is Mode.REAL else 0.0

    def triples(self) -> list[tuple[int, int, int]]:
        adj, n = self.adj, self.n
        out = []
        for v in range(n):
            nb = [u for u in range(n) if adj[v][u]]
            for a in range(len(nb)):
                u = nb[a]
                for b in range(a + 1, len(nb)):
                    w = nb[b]
                    if not adj[u][w]:
                        out.append((u, v, w))
        return out

    def lower_bound(self, triples) -> float:
        used: set[tuple[int, int]] = set()
        lb = 0.0
        c = self.cost
        for u, v, w in triples:
            ps = ((min(u, v), max(u, v)), (min(v, w), max(v, w)), (min(u, w), max(u, w)))
            if used.intersection(ps):
                continue
            used.update(ps)
            lb += min(c[a][b] for a, b in ps)
        return lb

    def labels(self) -> list[int]:
        lab = [-1] * self.n
        k = 0
        for s in range(self.n):
            if lab[s] >= 0:
                continue
            lab[s] = k
            for u in range(self.n):
                if self.adj[s][u]:
                    lab[u] = k
            k += 1
        return lab

    def run(self, spent: float) -> None:
        self.nodes += 1
        found = self.triples()
        if not found:
            if self.best_labels is None:
                better = spent <= self.best + self.tol
            else:
                better = spent < self.best - self.tol
            if better:
                self.best = spent
                self.best_labels = self.labels()
            return
        lb = spent + self.lower_bound(found)
        if lb > self.best + self.tol or self.best_labels is not None and lb >= self.best - self.tol:
            return
        c = self.cost
        u, v, w = max(found, key=lambda t: c[t[0]][t[1]] + c[t[1]][t[2]] + c[t[0]][t[2]])
        # Branch 1: delete uv.
        self._try(spent, u, v, False, [])
        # Branch 2: keep uv, delete vw.
        self._try(spent, v, w, False, [(u, v)])
        # Branch 3: keep uv and vw, insert uw.
        self._try(spent, u, w, True, [(u, v), (v, w)])

    def _try(self, spent: float, a: int, b: int, insert: bool, keep) -> None:
        c, adj = self.cost, self.adj
        if math.isinf(c[a][b]):
            return
        saved = [(p, q, c[p][q]) for p, q in keep]
        for p, q in keep:
            c[p][q] = c[q][p] = math.inf
        w = c[a][b]
        adj[a][b] = adj[b][a] = insert
        c[a][b] = c[b][a] = math.inf
        self.run(spent + w)
        adj[a][b] = adj[b][a] = not insert
        c[a][b] = c[b][a] = w
        for p, q, old in saved:
            c[p][q] = c[q][p] = old


def branch_opt(g: Instance, upper_bound: float | None = None) -> OptResult:
    """Exact optimum by conflict-triple branching, one component at a time.

    With ``upper_bound`` the search only looks for solutions of weight at
    most that value; if there is none the result has infinite weight and no
    witness. Practical up to roughly 40 vertices with small optimum.
    """
    limit = math.inf if upper_bound is None else float(upper_bound)
    total = 0.0
    blocks: list[set[int]] = []
    nodes = 0
    for comp in connected_components(g):
        verts = sorted(comp)
        if len(verts) <= 2:
            blocks.append(set(verts))
            nodes += 1
            continue
        sub = g.induced(verts)
        search = _Search(sub, limit - total)
        search.run(0.0)
        nodes += search.nodes
        if search.best_labels is None:
            return OptResult(math.inf, None, None, nodes)
        total += search.best
        groups: dict[int, set[int]] = {}
        for i, lab in enumerate(search.best_labels):
            groups.setdefault(lab, set()).add(verts[i])
        blocks.extend(groups.values())
    return OptResult(total, Clustering(blocks), None, nodes)


def solve(g: Instance, engine: str = "branch") -> OptResult:
    if engine == "brute":
        return brute_force_opt(g)
    if engine == "branch":
        return branch_opt(g)
    raise ValueError(f"unknown engine {engine!r}")


# -- lifting -----------------------------------------------------------------------


def lift_clustering(res: KernelResult, kernel_witness: Clustering) -> Clustering:
    """Map a clustering of ``res.kernel`` to one of ``res.original``.

    The trace is unwound backwards: dropped cliques become their own
    clusters and contracted neighbourhoods follow their replacement vertex.
    For an unweighted replacement the neighbourhood goes wherever is cheaper,
    alone or with the attached survivor's cluster.
    """
    nk = res.kernel.n
    for b in kernel_witness.blocks:
        if any(not 0 <= v < nk for v in b):
            raise ContractError("kernel witness refers to vertices outside the kernel")
    kernel_witness.check(nk)
    cluster: dict[int, int] = {}
    next_id = 0
    for b in kernel_witness.blocks:
        for v in b:
            cluster[res.labels[v]] = next_id
        next_id += 1

    for app in reversed(res.trace):
        target = None
        if app.kind != "drop":
            created = [cluster.pop(lab) for lab in app.created]
            x_cluster = cluster[app.survivor]
            if app.kind == "replace":
                others = sum(1 for c in cluster.values() if c == x_cluster) - 1
                join = app.c_y + len(app.block) * others
                target = x_cluster if join < app.c_x else None
            elif created[0] == x_cluster:
                target = x_cluster
        if target is None:
            target = next_id
            next_id += 1
        for lab in app.block:
            cluster[lab] = target

    n = res.original.n
    return Clustering.from_labels([cluster[v] for v in range(n)])


def lift_solution(res: KernelResult, kernel_witness: Clustering) -> EditSet:
    """Edits for the original graph induced by a kernel clustering.

    For an optimal kernel witness the weight is ``res.spent`` plus the
    witness weight in the kernel; otherwise it is at most that.
    """
    return clustering_to_edits(res.original, lift_clustering(res, kernel_witness))
