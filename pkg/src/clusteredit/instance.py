"""Weighted cluster-editing instances.

Every unordered vertex pair carries a presence bit (edge or anti-edge) and a
weight: the deletion cost of an edge or the insertion cost of an anti-edge.
Weights are stored as float64 so that ``math.inf`` marks forbidden edits;
integer-mode weights are integral floats and stay exact well past any
instance size we can handle.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse.csgraph import connected_components as _cc

# Comparison tolerance for real-valued weights.
EPS = 1e-9


class Mode(str, enum.Enum):
    INTEGER = "int"
    UNWEIGHTED = "unit"
    REAL = "real"


class ClusterEditError(Exception):
    """Base class for errors raised by this package."""


class VertexError(ClusterEditError, IndexError):
    pass


class ForbiddenEditError(ClusterEditError, ValueError):
    """Raised when an edit would toggle a pair of infinite weight."""


class ContractError(ClusterEditError, RuntimeError):
    """A documented precondition of a reduction step does not hold."""


def _pair(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u < v else (v, u)


class Instance:
    """A weighted graph on vertices ``0..n-1``.

    ``adj`` and ``weight`` are dense symmetric ``n x n`` arrays with a zero
    diagonal. ``provenance[v]`` is the set of original vertex ids that
    vertex ``v`` stands for; it is a singleton for vertices that were never
    merged.
    """

    __slots__ = ("adj", "weight", "mode", "provenance")

    def __init__(
        self,
        adj: np.ndarray,
        weight: np.ndarray,
        mode: Mode = Mode.INTEGER,
        provenance: Sequence[frozenset[int]] | None = None,
        *,
        validate: bool = True,
    ) -> None:
        self.adj = np.asarray(adj, dtype=bool)
        self.weight = np.asarray(weight, dtype=np.float64)
        self.mode = Mode(mode)
        n = self.adj.shape[0]
        if provenance is None:
            provenance = [frozenset((v,)) for v in range(n)]
        self.provenance = [frozenset(p) for p in provenance]
        if validate:
            self.validate()

    @classmethod
    def empty(cls, n: int, mode: Mode = Mode.INTEGER) -> Instance:
        weight = np.ones((n, n))
        np.fill_diagonal(weight, 0.0)
        return cls(np.zeros((n, n), dtype=bool), weight, mode, validate=False)

    @classmethod
    def from_edges(
        cls,
        n: int,
        edges: Iterable[tuple[int, int] | tuple[int, int, float]],
        mode: Mode = Mode.INTEGER,
        anti_weights: dict[tuple[int, int], float] | None = None,
    ) -> Instance:
        """Build an instance from an edge list.

        Edges given as ``(u, v)`` get weight 1. Anti-edges default to
        insertion cost 1 unless listed in ``anti_weights``.
        """
        g = cls.empty(n, mode)
        for e in edges:
            u, v = int(e[0]), int(e[1])
            w = float(e[2]) if len(e) > 2 else 1.0
            g._check_vertex(u)
            g._check_vertex(v)
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            g.adj[u, v] = g.adj[v, u] = True
            g.weight[u, v] = g.weight[v, u] = w
        for (u, v), w in (anti_weights or {}).items():
            if g.adj[u, v]:
                raise ValueError(f"pair {(u, v)} is an edge, not an anti-edge")
            g.weight[u, v] = g.weight[v, u] = float(w)
        g.validate()
        return g

    def validate(self) -> None:
        a, w = self.adj, self.weight
        n = a.shape[0]
        if a.shape != (n, n) or w.shape != (n, n):
            raise ValueError("adjacency and weight arrays must be square and equal-shaped")
        if a.diagonal().any():
            raise ValueError("self-loops are not allowed")
        if not (a == a.T).all() or not (w == w.T).all():
            raise ValueError("pair table must be symmetric")
        off = ~np.eye(n, dtype=bool)
        vals = w[off]
        if np.isnan(vals).any():
            raise ValueError("weights must not be NaN")
        finite = vals[np.isfinite(vals)]
        if (vals < 1.0).any():
            raise ValueError("weights must be at least 1")
        if self.mode is Mode.UNWEIGHTED and (finite != 1.0).any():
            raise ValueError("unweighted instances need weight 1 on every finite pair")
        if self.mode is Mode.INTEGER and (finite != np.round(finite)).any():
            raise ValueError("integer-mode weights must be integral")
        if len(self.provenance) != n:
            raise ValueError("provenance must have one entry per vertex")

    # -- basic access -------------------------------------------------------

    @property
    def n(self) -> int:
        return self.adj.shape[0]

    @property
    def m(self) -> int:
        return int(np.triu(self.adj, 1).sum())

    def _check_vertex(self, v: int) -> None:
        if not 0 <= v < self.n:
            raise VertexError(f"vertex {v} out of range for n={self.n}")

    def present(self, u: int, v: int) -> bool:
        return bool(self.adj[u, v])

    def pair_weight(self, u: int, v: int) -> float:
        return float(self.weight[u, v])

    def neighbors(self, v: int) -> np.ndarray:
        self._check_vertex(v)
        return np.flatnonzero(self.adj[v])

    def edges(self) -> list[tuple[int, int, float]]:
        us, vs = np.nonzero(np.triu(self.adj, 1))
        return [(int(u), int(v), float(self.weight[u, v])) for u, v in zip(us, vs)]

    def total_edge_weight(self) -> float:
        return float(np.triu(np.where(self.adj, self.weight, 0.0), 1).sum())

    def copy(self) -> Instance:
        return Instance(self.adj.copy(), self.weight.copy(), self.mode,
                        list(self.provenance), validate=False)

    def induced(self, vertices: Iterable[int]) -> Instance:
        """Induced subinstance on ``vertices`` (renumbered in ascending order)."""
        vs = np.array(sorted(set(int(v) for v in vertices)), dtype=np.intp)
        ix = np.ix_(vs, vs)
        return Instance(self.adj[ix], self.weight[ix], self.mode,
                        [self.provenance[v] for v in vs], validate=False)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Instance):
            return NotImplemented
        return (
            self.mode is other.mode
            and self.adj.shape == other.adj.shape
            and bool((self.adj == other.adj).all())
            and bool((self.weight == other.weight).all())
            and self.provenance == other.provenance
        )

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"Instance(n={self.n}, m={self.m}, mode={self.mode.value})"


@dataclass(frozen=True)
class EditSet:
    """A set of unordered pairs ``(u, v)`` with ``u < v`` and their total weight."""

    pairs: frozenset[tuple[int, int]]
    weight: float

    @classmethod
    def of(cls, g: Instance, pairs: Iterable[tuple[int, int]]) -> EditSet:
        ps = frozenset(_pair(int(u), int(v)) for u, v in pairs)
        return cls(ps, float(sum(g.weight[u, v] for u, v in ps)))

    def __len__(self) -> int:
        return len(self.pairs)

    @property
    def feasible(self) -> bool:
        return math.isfinite(self.weight)


@dataclass(frozen=True)
class Clustering:
    """A partition of ``0..n-1`` into nonempty blocks, stored canonically."""

    blocks: tuple[frozenset[int], ...]

    def __init__(self, blocks: Iterable[Iterable[int]]) -> None:
        bs = [frozenset(int(v) for v in b) for b in blocks]
        bs = [b for b in bs if b]
        bs.sort(key=min)
        object.__setattr__(self, "blocks", tuple(bs))

    @classmethod
    def from_labels(cls, labels: Sequence[int]) -> Clustering:
        groups: dict[int, list[int]] = {}
        for v, lab in enumerate(labels):
            groups.setdefault(int(lab), []).append(v)
        return cls(groups.values())

    def labels(self, n: int) -> np.ndarray:
        self.check(n)
        lab = np.empty(n, dtype=np.intp)
        for i, b in enumerate(self.blocks):
            lab[list(b)] = i
        return lab

    def check(self, n: int) -> None:
        seen: set[int] = set()
        for b in self.blocks:
            if seen & b:
                raise ValueError("clustering blocks overlap")
            seen |= b
        if seen != set(range(n)):
            raise ValueError(f"clustering does not cover vertices 0..{n - 1}")

    def block_of(self, v: int) -> frozenset[int]:
        for b in self.blocks:
            if v in b:
                return b
        raise KeyError(v)

    def __len__(self) -> int:
        return len(self.blocks)

    def __iter__(self):
        return iter(self.blocks)


# -- operations --------------------------------------------------------------


def closed_neighborhood(g: Instance, v: int) -> set[int]:
    return {v, *g.neighbors(v).tolist()}


def _mask(g: Instance, xs: Iterable[int]) -> np.ndarray:
    mask = np.zeros(g.n, dtype=bool)
    for x in xs:
        g._check_vertex(int(x))
        mask[int(x)] = True
    return mask


def cut_weight(g: Instance, xs: Iterable[int]) -> float:
    """Total weight of edges with exactly one endpoint in ``xs``."""
    inside = _mask(g, xs)
    # Sum over pairs i < j so that X and its complement add the same terms in the same order.
    crossing = np.triu(g.adj & (inside[:, None] != inside[None, :]), 1)
    return float(g.weight[crossing].sum())


def apply_edits(g: Instance, s: EditSet | Iterable[tuple[int, int]]) -> Instance:
    """Return ``g`` with the presence bit of every pair in ``s`` flipped."""
    pairs = s.pairs if isinstance(s, EditSet) else {_pair(u, v) for u, v in s}
    out = g.copy()
    for u, v in pairs:
        g._check_vertex(u)
        g._check_vertex(v)
        if not math.isfinite(g.weight[u, v]):
            raise ForbiddenEditError(f"pair {(u, v)} has infinite weight")
        out.adj[u, v] = out.adj[v, u] = not g.adj[u, v]
    return out


def connected_components(g: Instance) -> list[set[int]]:
    if g.n == 0:
        return []
    count, labels = _cc(g.adj, directed=False)
    comps: list[set[int]] = [set() for _ in range(count)]
    for v, lab in enumerate(labels):
        comps[lab].add(v)
    comps.sort(key=min)
    return comps


def is_cluster_graph(g: Instance) -> bool:
    """True iff every connected component is complete."""
    if g.n == 0:
        return True
    count, labels = _cc(g.adj, directed=False)
    same = labels[:, None] == labels[None, :]
    np.fill_diagonal(same, False)
    return bool((same == g.adj).all())


def clustering_to_edits(g: Instance, c: Clustering) -> EditSet:
    """Edits turning ``g`` into the cluster graph whose cliques are ``c``'s blocks.

    A required edit of infinite weight makes the result infinite; callers
    reject such sets.
    """
    lab = c.labels(g.n)
    same = lab[:, None] == lab[None, :]
    wrong = np.triu(same != g.adj, 1)
    us, vs = np.nonzero(wrong)
    pairs = frozenset(zip(us.tolist(), vs.tolist()))
    return EditSet(pairs, float(g.weight[us, vs].sum()))


def clustering_cost(g: Instance, c: Clustering) -> float:
    return clustering_to_edits(g, c).weight
