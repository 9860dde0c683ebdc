"""Edge-cut kernelization for weighted cluster editing.

A vertex ``v`` is *reducible* when its stable cost
``rho(v) = 2 * delta(v) + gamma(N[v])`` is smaller than ``|N[v]|``
(``rho(v) <= |N[v]| - 1`` with real weights), where ``delta(v)`` is the
weight of anti-edges inside ``N[v]`` and ``gamma(N[v])`` the weight of the
cut around it. At a reducible vertex one rule application:

1. completes ``N[v]`` to a clique (cost ``delta(v)``);
2. cuts every outside vertex ``x`` whose edges into ``N[v]`` weigh at most
   ``|N[v]| / 2``;
3. if one outside neighbour ``x`` survives, contracts ``N[v]`` against it
   (single vertex for integer weights, a clique ``K_{|X|-|Y|}`` for
   unweighted graphs, a one- or two-vertex gadget for real weights);
   otherwise ``N[v]`` is an isolated clique and is dropped.

The driver repeats this to a fixpoint. Working state lives in a
:class:`_Workspace` whose slots are tombstoned on deletion, so ids in the
trace stay stable; the kernel is compacted once at the end.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from typing import Callable, Literal

import numpy as np

from .instance import (
    EPS,
    ContractError,
    Instance,
    Mode,
    VertexError,
    connected_components,
    is_cluster_graph,
)

RuleId = Literal["S1", "S2", "S3", "S3U", "S3R", "CLIQUE-DROP"]


@dataclass(frozen=True)
class NeighborhoodStats:
    v: int
    size: int
    deficiency: float
    cut: float
    stable_cost: float


@dataclass(frozen=True)
class StepRecord:
    """One sub-step of a rule application. Pairs and pivot are labels."""

    rule: RuleId
    pivot: int
    pairs: tuple[tuple[int, int], ...]
    cost: float


@dataclass
class RuleApplication:
    """All sub-steps applied at one pivot, plus what is needed to undo them.

    ``block`` holds the labels of ``N[v]``; ``created`` the labels of the
    vertices replacing it (empty when the block was dropped). ``survivor``
    is the label of the outside vertex that stayed attached, if any.
    """

    pivot: int
    block: tuple[int, ...]
    survivor: int | None
    created: tuple[int, ...]
    kind: Literal["drop", "merge", "gadget", "replace"]
    c_x: float = 0.0
    c_y: float = 0.0
    records: list[StepRecord] = field(default_factory=list)

    @property
    def cost(self) -> float:
        return sum(r.cost for r in self.records)


@dataclass
class KernelResult:
    """Output of :func:`kernelize`.

    ``labels[i]`` is the trace label of kernel vertex ``i``. Labels below
    ``original.n`` are vertex ids of ``original``; larger labels name
    vertices created by contractions. ``vertex_map`` sends each vertex of
    ``original`` to its kernel vertex, ``"deleted"`` or ``"replaced"``.
    """

    original: Instance
    kernel: Instance
    spent: float
    trace: list[RuleApplication]
    vertex_map: dict[int, int | str]
    labels: list[int]

    def trace_rows(self) -> list[dict]:
        rows = []
        for i, app in enumerate(self.trace):
            origin = sorted(self.original.provenance[app.pivot]) if app.pivot < self.original.n else []
            for rec in app.records:
                rows.append({
                    "application": i,
                    "rule": rec.rule,
                    "pivot": rec.pivot,
                    "pivot_origin": origin,
                    "pairs": [list(p) for p in rec.pairs],
                    "cost": rec.cost,
                })
        return rows


@dataclass(frozen=True)
class Decision:
    verdict: Literal["yes-kernel", "no", "solved"]
    residual: float
    result: KernelResult

    @property
    def answer(self) -> Literal["yes", "no", "kernel-only"]:
        return {"solved": "yes", "no": "no", "yes-kernel": "kernel-only"}[self.verdict]


# -- statistics ------------------------------------------------------------------


def _closed(adj: np.ndarray, v: int) -> np.ndarray:
    row = adj[v].copy()
    row[v] = True
    return np.flatnonzero(row)


def _deficiency(adj: np.ndarray, w: np.ndarray, nv: np.ndarray) -> float:
    ix = np.ix_(nv, nv)
    missing = ~adj[ix]
    np.fill_diagonal(missing, False)
    return float(w[ix][missing].sum()) / 2.0


def _cut(adj: np.ndarray, w: np.ndarray, nv: np.ndarray) -> float:
    rows = adj[nv]
    rows[:, nv] = False
    return float(w[nv][rows].sum())


def _reducible_size(rho: float, size: int, mode: Mode) -> bool:
    if not math.isfinite(rho):
        return False
    if mode is Mode.REAL:
        return rho <= size - 1 + EPS
    return rho < size


def _unit_blocked(w: np.ndarray, nv: np.ndarray, mode: Mode, alive: np.ndarray | None = None) -> bool:
    # A unit-weight replacement clique cannot carry infinite pairs, so
    # unweighted pivots touching one are left alone.
    if mode is not Mode.UNWEIGHTED:
        return False
    rows = w[nv] if alive is None else w[nv][:, alive]
    return bool(np.isinf(rows).any())


def stats(g: Instance, v: int) -> NeighborhoodStats:
    g._check_vertex(v)
    nv = _closed(g.adj, v)
    d = _deficiency(g.adj, g.weight, nv)
    c = _cut(g.adj, g.weight, nv)
    return NeighborhoodStats(v, len(nv), d, c, 2 * d + c)


def is_reducible(g: Instance, v: int) -> bool:
    s = stats(g, v)
    if _unit_blocked(g.weight, _closed(g.adj, v), g.mode):
        return False
    return _reducible_size(s.stable_cost, s.size, g.mode)


# -- workspace -------------------------------------------------------------------


class _Workspace:
    """Mutable copy of an instance with tombstoned slots and trace labels."""

    def __init__(self, g: Instance) -> None:
        self.adj = g.adj.copy()
        self.w = g.weight.copy()
        self.mode = g.mode
        self.n0 = g.n
        self.alive = np.ones(g.n, dtype=bool)
        self.labels = list(range(g.n))
        # ``members`` refers to vertices of the input instance, which
        # ``provenance`` then resolves to the caller's original ids.
        self.members: list[frozenset[int]] = [frozenset((v,)) for v in range(g.n)]
        self.source_provenance = g.provenance
        self.replaced: set[int] = set()
        self.next_label = g.n

    def fresh_label(self) -> int:
        lab = self.next_label
        self.next_label += 1
        return lab

    def pair_labels(self, pairs) -> tuple[tuple[int, int], ...]:
        out = []
        for a, b in pairs:
            la, lb = self.labels[a], self.labels[b]
            out.append((la, lb) if la < lb else (lb, la))
        return tuple(sorted(out))

    def reducible(self, v: int) -> bool:
        adj, w = self.adj, self.w
        nv = _closed(adj, v)
        d = _deficiency(adj, w, nv)
        # The cut only adds to rho, so a large deficiency settles it early.
        if not _reducible_size(2 * d, len(nv), self.mode):
            return False
        if _unit_blocked(w, nv, self.mode, self.alive):
            return False
        return _reducible_size(2 * d + _cut(adj, w, nv), len(nv), self.mode)

    def kill(self, slots) -> None:
        slots = np.asarray(slots, dtype=np.intp)
        self.adj[slots, :] = False
        self.adj[:, slots] = False
        self.alive[slots] = False

    def boundary(self, nv: np.ndarray) -> np.ndarray:
        near = self.adj[nv].any(axis=0)
        near[nv] = False
        return np.flatnonzero(near)

    # individual steps; each returns (edited slot pairs, cost)

    def step1(self, nv: np.ndarray) -> tuple[list[tuple[int, int]], float]:
        ix = np.ix_(nv, nv)
        missing = np.triu(~self.adj[ix], 1)
        a, b = np.nonzero(missing)
        pairs = list(zip(nv[a].tolist(), nv[b].tolist()))
        cost = float(self.w[nv[a], nv[b]].sum())
        if not math.isfinite(cost):
            raise ContractError("cannot complete a neighbourhood with an infinite anti-edge")
        sub = np.ones((len(nv), len(nv)), dtype=bool)
        np.fill_diagonal(sub, False)
        self.adj[ix] = sub
        return pairs, cost

    def step2(self, nv: np.ndarray) -> tuple[list[tuple[int, int]], float]:
        half = len(nv) / 2.0
        slack = EPS if self.mode is Mode.REAL else 0.0
        pairs: list[tuple[int, int]] = []
        cost = 0.0
        for x in self.boundary(nv).tolist():
            hit = nv[self.adj[x, nv]]
            cx = float(self.w[x, hit].sum())
            if cx <= half + slack:
                self.adj[x, hit] = False
                self.adj[hit, x] = False
                pairs.extend((min(x, u), max(x, u)) for u in hit.tolist())
                cost += cx
        return pairs, cost

    def split(self, nv: np.ndarray, x: int) -> tuple[np.ndarray, np.ndarray, float, float]:
        to_x = self.adj[x, nv]
        xs, ys = nv[to_x], nv[~to_x]
        return xs, ys, float(self.w[x, xs].sum()), float(self.w[x, ys].sum())

    def disconnect(self, x: int, xs: np.ndarray) -> list[tuple[int, int]]:
        self.adj[x, xs] = False
        self.adj[xs, x] = False
        return [(min(x, u), max(x, u)) for u in xs.tolist()]

    def merge_single(self, v: int, nv: np.ndarray, x: int, edge_weight: float) -> int:
        """Contract ``nv`` into slot ``v``, attached to ``x`` only."""
        members = frozenset().union(*(self.members[u] for u in nv.tolist()))
        self.kill(nv)
        self._isolate(v)
        self.adj[v, x] = self.adj[x, v] = True
        self.w[v, x] = self.w[x, v] = edge_weight
        return self._revive(v, members)

    def merge_gadget(self, v: int, nv: np.ndarray, x: int, d: float) -> tuple[int, int]:
        """Two-vertex contraction used when ``c_X - c_Y < 1`` with real weights."""
        other = int(nv[nv != v][0])
        members = frozenset().union(*(self.members[u] for u in nv.tolist()))
        self.kill(nv)
        for s in (v, other):
            self._isolate(s)
        self.adj[v, x] = self.adj[x, v] = True
        self.w[v, x] = self.w[x, v] = 2.0
        self.adj[v, other] = self.adj[other, v] = True
        self.w[v, other] = self.w[other, v] = 2.0 - d
        a = self._revive(v, members)
        b = self._revive(other, frozenset())
        return a, b

    def replace_clique(self, nv: np.ndarray, x: int, size: int) -> tuple[int, ...]:
        """Replace ``nv`` by a unit-weight clique of ``size`` vertices joined to ``x``."""
        members = frozenset().union(*(self.members[u] for u in nv.tolist()))
        self.replaced |= members
        slots = nv[:size]
        self.kill(nv)
        self.w[slots, :] = 1.0
        self.w[:, slots] = 1.0
        self.w[slots, slots] = 0.0
        ix = np.ix_(slots, slots)
        sub = np.ones((size, size), dtype=bool)
        np.fill_diagonal(sub, False)
        self.adj[ix] = sub
        self.adj[slots, x] = True
        self.adj[x, slots] = True
        out = []
        for i, s in enumerate(slots.tolist()):
            out.append(self._revive(s, members if i == 0 else frozenset()))
        return tuple(out)

    def _isolate(self, s: int) -> None:
        self.adj[s, :] = False
        self.adj[:, s] = False
        self.w[s, :] = math.inf
        self.w[:, s] = math.inf
        self.w[s, s] = 0.0

    def _revive(self, s: int, members: frozenset[int]) -> int:
        self.alive[s] = True
        self.members[s] = members
        lab = self.fresh_label()
        self.labels[s] = lab
        return lab

    # full rule

    def apply_rule(self, v: int) -> tuple[RuleApplication, np.ndarray]:
        """Apply steps 1-3 at ``v``; return the record and slots to re-examine."""
        nv = _closed(self.adj, v)
        bnd = self.boundary(nv)
        region = np.union1d(nv, bnd)
        touched = np.union1d(region, np.flatnonzero(self.adj[region].any(axis=0)))

        piv = self.labels[v]
        block = tuple(self.labels[u] for u in nv.tolist())
        app = RuleApplication(pivot=piv, block=block, survivor=None, created=(), kind="drop")

        pairs, cost = self.step1(nv)
        app.records.append(StepRecord("S1", piv, self.pair_labels(pairs), cost))
        pairs, cost = self.step2(nv)
        app.records.append(StepRecord("S2", piv, self.pair_labels(pairs), cost))

        survivors = self.boundary(nv)
        if len(survivors) > 1:
            raise ContractError(f"{len(survivors)} outside neighbours survived pruning at {piv}")
        if len(survivors) == 1:
            x = int(survivors[0])
            self._step3(app, v, nv, x)
        if app.kind == "drop":
            app.records.append(StepRecord("CLIQUE-DROP", piv, (), 0.0))
            self.kill(nv)
        return app, touched

    def _step3(self, app: RuleApplication, v: int, nv: np.ndarray, x: int) -> None:
        xs, ys, cx, cy = self.split(nv, x)
        app.survivor = self.labels[x]
        app.c_x, app.c_y = cx, cy
        piv = app.pivot
        slack = EPS if self.mode is Mode.REAL else 0.0
        if cx <= cy + slack:
            # Cutting x off is never worse than pulling it into the clique.
            pairs = self.disconnect(x, xs)
            app.records.append(StepRecord("S3", piv, self.pair_labels(pairs), cx))
            return
        if self.mode is Mode.UNWEIGHTED:
            size = len(xs) - len(ys)
            if size < 1:
                raise ContractError("replacement clique would be empty")
            app.created = self.replace_clique(nv, x, size)
            app.kind = "replace"
            app.records.append(StepRecord("S3U", piv, (), float(len(ys))))
            return
        d = cx - cy
        if self.mode is Mode.INTEGER or d >= 1.0 - EPS:
            app.created = (self.merge_single(v, nv, x, d),)
            app.kind = "merge"
            rule: RuleId = "S3R" if self.mode is Mode.REAL else "S3"
            app.records.append(StepRecord(rule, piv, (), cy))
            return
        app.created = self.merge_gadget(v, nv, x, d)
        app.kind = "gadget"
        app.records.append(StepRecord("S3R", piv, (), cx - 2.0))

    def snapshot(self) -> tuple[Instance, np.ndarray]:
        slots = np.flatnonzero(self.alive)
        ix = np.ix_(slots, slots)
        prov = [
            frozenset().union(*(self.source_provenance[m] for m in self.members[s]))
            for s in slots.tolist()
        ]
        g = Instance(self.adj[ix].copy(), self.w[ix].copy(), self.mode, prov, validate=False)
        return g, slots


# -- public single-step operations ------------------------------------------------


def _pivot(g: Instance, v: int) -> np.ndarray:
    if not 0 <= v < g.n:
        raise VertexError(f"vertex {v} out of range for n={g.n}")
    return _closed(g.adj, v)


def step1_complete(g: Instance, v: int) -> tuple[Instance, float]:
    nv = _pivot(g, v)
    ws = _Workspace(g)
    _, cost = ws.step1(nv)
    return ws.snapshot()[0], cost


def step2_prune(g: Instance, v: int) -> tuple[Instance, float]:
    nv = _pivot(g, v)
    if _deficiency(g.adj, g.weight, nv) != 0:
        raise ContractError("step 2 needs a complete closed neighbourhood")
    ws = _Workspace(g)
    _, cost = ws.step2(nv)
    return ws.snapshot()[0], cost


def _step3_common(g: Instance, v: int, mode: Mode) -> tuple[Instance, float]:
    if g.mode is not mode:
        raise ContractError(f"expected a {mode.value}-mode instance, got {g.mode.value}")
    nv = _pivot(g, v)
    ws = _Workspace(g)
    survivors = ws.boundary(nv)
    if len(survivors) != 1:
        raise ContractError(f"step 3 needs exactly one outside neighbour, found {len(survivors)}")
    app = RuleApplication(pivot=v, block=tuple(nv.tolist()), survivor=None, created=(), kind="drop")
    ws._step3(app, v, nv, int(survivors[0]))
    return ws.snapshot()[0], app.cost


def step3_merge(g: Instance, v: int) -> tuple[Instance, float]:
    return _step3_common(g, v, Mode.INTEGER)


def step3_unweighted(g: Instance, v: int) -> tuple[Instance, float]:
    return _step3_common(g, v, Mode.UNWEIGHTED)


def step3_real(g: Instance, v: int) -> tuple[Instance, float]:
    return _step3_common(g, v, Mode.REAL)


def drop_clique_components(g: Instance) -> tuple[Instance, float]:
    keep = []
    for comp in connected_components(g):
        if not is_cluster_graph(g.induced(comp)):
            keep.extend(comp)
    return g.induced(keep), 0.0


# -- driver ----------------------------------------------------------------------


def kernelize(
    g: Instance,
    observer: Callable[[RuleApplication, Instance], None] | None = None,
) -> KernelResult:
    """Apply the rule until no vertex is reducible.

    Pivots are taken in ascending slot order; after each application only
    slots near the edited region are re-examined. ``observer`` (test hook)
    receives each application and a compacted snapshot of the graph after it.
    """
    ws = _Workspace(g)
    heap = list(range(g.n))
    queued = np.ones(g.n, dtype=bool)
    trace: list[RuleApplication] = []
    while heap:
        v = heapq.heappop(heap)
        queued[v] = False
        if not ws.alive[v] or not ws.reducible(v):
            continue
        app, touched = ws.apply_rule(v)
        trace.append(app)
        for u in touched.tolist():
            if ws.alive[u] and not queued[u]:
                queued[u] = True
                heapq.heappush(heap, u)
        if observer is not None:
            observer(app, ws.snapshot()[0])

    kernel, slots = ws.snapshot()
    vertex_map: dict[int, int | str] = {v: "deleted" for v in range(g.n)}
    for i, s in enumerate(slots.tolist()):
        for m in ws.members[s]:
            vertex_map[m] = "replaced" if m in ws.replaced else i
    return KernelResult(
        original=g,
        kernel=kernel,
        spent=sum(app.cost for app in trace),
        trace=trace,
        vertex_map=vertex_map,
        labels=[ws.labels[s] for s in slots.tolist()],
    )


def size_bound_factor(mode: Mode) -> float:
    return 2.5 if mode is Mode.REAL else 2.0


def decide(g: Instance, k: float) -> Decision:
    """Answer "is there a solution of weight <= k?" as far as the kernel allows."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    res = kernelize(g)
    slack = EPS if g.mode is Mode.REAL else 0.0
    residual = k - res.spent
    if residual < -slack:
        return Decision("no", residual, res)
    if res.kernel.n == 0:
        return Decision("solved", residual, res)
    if res.kernel.n > size_bound_factor(g.mode) * residual + slack:
        return Decision("no", residual, res)
    return Decision("yes-kernel", residual, res)
