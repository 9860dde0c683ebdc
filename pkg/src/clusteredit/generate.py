"""Seeded instance generators.

All randomness comes from ``numpy.random.Generator`` over the PCG64 bit
generator (``numpy.random.default_rng(seed)``). ``GENERATOR_VERSION`` names
this choice together with the draw order used below; bump it whenever either
changes so stored corpora can be told apart.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .instance import Clustering, Instance, Mode

GENERATOR_VERSION = "pcg64-v1"


@dataclass(frozen=True)
class PlantedSpec:
    n: int
    cluster_count: int
    edit_budget: int
    weight_max: float = 1
    mode: Mode = Mode.INTEGER
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n < 0 or self.cluster_count < 1 and self.n > 0:
            raise ValueError("need n >= 0 and at least one cluster")
        if self.cluster_count > max(self.n, 1):
            raise ValueError("cluster_count must not exceed n")
        if not 0 <= self.edit_budget <= self.n * (self.n - 1) // 2:
            raise ValueError(f"edit_budget must lie in 0..{self.n * (self.n - 1) // 2}")
        if self.weight_max < 1:
            raise ValueError("weight_max must be at least 1")


def _weights(rng: np.random.Generator, n: int, weight_max: float, mode: Mode) -> np.ndarray:
    iu, ju = np.triu_indices(n, 1)
    if mode is Mode.UNWEIGHTED:
        vals = np.ones(len(iu))
    elif mode is Mode.REAL:
        vals = rng.uniform(1.0, float(weight_max), size=len(iu))
    else:
        vals = rng.integers(1, int(weight_max), size=len(iu), endpoint=True).astype(np.float64)
    w = np.zeros((n, n))
    w[iu, ju] = vals
    w[ju, iu] = vals
    return w


def _pair_from_index(k: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Invert the row-major enumeration of pairs ``(i, j)``, ``i < j``."""
    k = k.astype(np.int64)
    # Rows i hold n-1-i pairs; find the largest i with start(i) <= k.
    starts = np.arange(n, dtype=np.int64)
    starts = starts * (2 * n - starts - 1) // 2
    i = np.searchsorted(starts, k, side="right") - 1
    j = k - starts[i] + i + 1
    return i, j


def gen_planted(spec: PlantedSpec) -> tuple[Instance, Clustering]:
    """Disjoint cliques on a random balanced partition, then ``edit_budget`` flips."""
    n = spec.n
    rng = np.random.default_rng(spec.seed)
    order = rng.permutation(n)
    labels = np.empty(n, dtype=np.intp)
    labels[order] = np.arange(n) % max(spec.cluster_count, 1)
    adj = labels[:, None] == labels[None, :]
    np.fill_diagonal(adj, False)
    weight = _weights(rng, n, spec.weight_max, spec.mode)
    total = n * (n - 1) // 2
    if spec.edit_budget:
        picks = rng.choice(total, size=spec.edit_budget, replace=False)
        i, j = _pair_from_index(picks, n)
        adj[i, j] = ~adj[i, j]
        adj[j, i] = adj[i, j]
    return Instance(adj, weight, spec.mode), Clustering.from_labels(labels)


def gen_random(n: int, p: float, weight_max: float = 1, mode: Mode = Mode.INTEGER,
               seed: int = 0) -> Instance:
    """Erdos-Renyi presence with independent uniform weights."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    mode = Mode(mode)
    rng = np.random.default_rng(seed)
    iu, ju = np.triu_indices(n, 1)
    present = rng.random(len(iu)) < p
    adj = np.zeros((n, n), dtype=bool)
    adj[iu[present], ju[present]] = True
    adj |= adj.T
    return Instance(adj, _weights(rng, n, weight_max, mode), mode)


def planted_repair_weight(g: Instance, planted: Clustering) -> float:
    """Weight of turning ``g`` back into the planted clustering."""
    lab = planted.labels(g.n)
    same = lab[:, None] == lab[None, :]
    wrong = np.triu(same != g.adj, 1)
    return float(g.weight[wrong].sum())


def gen_attached_clique(n: int, clique_size: int, weight_max: float = 3,
                        mode: Mode = Mode.INTEGER, seed: int = 0, p: float = 0.4) -> Instance:
    """A clique hanging off one outside vertex, inside an otherwise random graph.

    Vertices ``0..clique_size-1`` form a clique; vertex ``clique_size`` is
    joined to a random majority of the clique, except vertex 0. The other
    vertices (and the attached one) are wired at random with probability
    ``p``. Such graphs exercise the contraction branches of the kernel.
    """
    mode = Mode(mode)
    if not 2 <= clique_size < n:
        raise ValueError("need 2 <= clique_size < n")
    rng = np.random.default_rng(seed)
    s = clique_size
    adj = np.zeros((n, n), dtype=bool)
    adj[:s, :s] = True
    rest = np.arange(s, n)
    sub = rng.random((len(rest), len(rest))) < p
    adj[np.ix_(rest, rest)] = np.triu(sub, 1) | np.triu(sub, 1).T
    k = int(rng.integers(s // 2 + 1, s)) if s > 2 else 1
    hit = 1 + rng.permutation(s - 1)[:k]
    adj[s, hit] = True
    adj[hit, s] = True
    np.fill_diagonal(adj, False)
    return Instance(adj, _weights(rng, n, weight_max, mode), mode)
