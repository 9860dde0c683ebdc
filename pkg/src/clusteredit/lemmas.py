"""Empirical checks of the edge-cut inequalities behind the kernel.

Each ``check_*`` function compares brute-force optima of a graph and of
some of its induced subgraphs and returns a :class:`LemmaReport`. Checks
that quantify over optimal solutions use the full list of optima.
:func:`run_suite` drives all of them over a seeded random corpus.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .generate import gen_random
from .instance import (
    Clustering,
    Instance,
    Mode,
    clustering_to_edits,
    connected_components,
    cut_weight,
)
from .kernel import _closed, is_reducible
from . import solver

ORACLE_LIMIT = 10
CORPUS_SEED = 0xCE17
CORPUS_P = (0.2, 0.5, 0.8)
CORPUS_N = tuple(range(4, 9))
CORPUS_WEIGHT_MAX = 4

LEMMAS = (
    "cutting",
    "components",
    "two-cut",
    "cut-preferred",
    "edge-cutting",
    "boundary",
    "nonseparable",
)


@dataclass
class LemmaReport:
    lemma: str
    instances_checked: int = 0
    violations: list[tuple] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def merge(self, other: LemmaReport) -> LemmaReport:
        assert other.lemma == self.lemma
        self.instances_checked += other.instances_checked
        self.violations.extend(other.violations)
        return self


def _tol(g: Instance) -> float:
    return 1e-9 if g.mode is Mode.REAL else 0.0


def _guard(g: Instance) -> None:
    if g.n > ORACLE_LIMIT:
        raise solver.GuardError(f"lemma checks are limited to {ORACLE_LIMIT} vertices")


def omega(g: Instance) -> float:
    return solver.brute_force_opt(g).opt_weight


def _optima(g: Instance, optima: list[Clustering] | None) -> list[Clustering]:
    if optima is None:
        optima = solver.brute_force_opt(g, enumerate_all=True).all_optima
    return optima


def _edit_weight(g: Instance, c: Clustering, keep) -> float:
    edits = clustering_to_edits(g, c)
    return float(sum(g.weight[u, v] for u, v in edits.pairs if keep(u, v)))


def check_cutting_lemma(g: Instance, parts: Clustering, opt: float | None = None) -> LemmaReport:
    """sum_i w(G[V_i]) <= w(G) <= pi(E_P) + sum_i w(G[V_i])."""
    _guard(g)
    rep = LemmaReport("cutting", 1)
    total = omega(g) if opt is None else opt
    inner = sum(omega(g.induced(p)) for p in parts.blocks)
    lab = parts.labels(g.n)
    crossing = np.triu(g.adj & (lab[:, None] != lab[None, :]), 1)
    between = float(g.weight[crossing].sum())
    tol = _tol(g)
    if not inner <= total + tol <= between + inner + 2 * tol:
        rep.violations.append((g, parts, inner, total, between + inner))
    return rep


def check_components(g: Instance, optima: list[Clustering] | None = None) -> LemmaReport:
    """w(G) is the sum over components, and every optimum restricts to optima."""
    _guard(g)
    rep = LemmaReport("components", 1)
    optima = _optima(g, optima)
    comps = connected_components(g)
    parts = [omega(g.induced(c)) for c in comps]
    total = clustering_to_edits(g, optima[0]).weight
    tol = _tol(g)
    if abs(total - sum(parts)) > tol:
        rep.violations.append((g, None, total, sum(parts)))
    for c in optima:
        for comp, opt in zip(comps, parts):
            w = _edit_weight(g, c, lambda u, v, s=comp: u in s and v in s)
            if abs(w - opt) > tol:
                rep.violations.append((g, c, w, opt))
    return rep


def check_two_cut(g: Instance, xs: Iterable[int], opt: float | None = None) -> LemmaReport:
    """w(G[X]) + w(G[X']) <= w(G) <= w(G[X]) + w(G[X']) + gamma(X)."""
    _guard(g)
    xs = set(xs)
    rest = set(range(g.n)) - xs
    rep = LemmaReport("two-cut", 1)
    total = omega(g) if opt is None else opt
    lhs = omega(g.induced(xs)) + omega(g.induced(rest))
    gamma = cut_weight(g, xs)
    tol = _tol(g)
    if not lhs <= total + tol <= lhs + gamma + 2 * tol:
        rep.violations.append((g, frozenset(xs), lhs, total, lhs + gamma))
    return rep


def check_cut_preferred(g: Instance, xs: Iterable[int],
                        optima: list[Clustering] | None = None) -> LemmaReport:
    """Every optimum edits at most gamma(X) worth of pairs across the cut of X."""
    _guard(g)
    xs = set(xs)
    rep = LemmaReport("cut-preferred", 1)
    gamma = cut_weight(g, xs)
    tol = _tol(g)
    for c in _optima(g, optima):
        across = _edit_weight(g, c, lambda u, v: (u in xs) != (v in xs))
        if across > gamma + tol:
            rep.violations.append((g, c, across, gamma))
    return rep


def check_edge_cutting(g: Instance, xs: Iterable[int],
                       optima: list[Clustering] | None = None) -> LemmaReport:
    """w(G) >= w(G[X]) + (weight of optimal edits touching the complement of X)."""
    _guard(g)
    xs = set(xs)
    rep = LemmaReport("edge-cutting", 1)
    optima = _optima(g, optima)
    total = clustering_to_edits(g, optima[0]).weight
    inner = omega(g.induced(xs))
    tol = _tol(g)
    for c in optima:
        outside = _edit_weight(g, c, lambda u, v: u not in xs or v not in xs)
        if total + tol < inner + outside:
            rep.violations.append((g, c, total, inner + outside))
    return rep


def boundary(g: Instance, xs: set[int]) -> set[int]:
    inside = np.zeros(g.n, dtype=bool)
    inside[list(xs)] = True
    return set(np.flatnonzero(inside & g.adj[:, ~inside].any(axis=1)).tolist())


def check_boundary_lemma(g: Instance, xs: Iterable[int],
                         optima: list[Clustering] | None = None) -> LemmaReport:
    """w(G) + pi(S*(B_X)) >= w(G[X]) + w(G[X' + B_X]) for every optimum S*."""
    _guard(g)
    xs = set(xs)
    bx = boundary(g, xs)
    rest = (set(range(g.n)) - xs) | bx
    rep = LemmaReport("boundary", 1)
    optima = _optima(g, optima)
    total = clustering_to_edits(g, optima[0]).weight
    rhs = omega(g.induced(xs)) + omega(g.induced(rest))
    tol = _tol(g)
    for c in optima:
        inside_b = _edit_weight(g, c, lambda u, v: u in bx and v in bx)
        if total + inside_b + tol < rhs:
            rep.violations.append((g, c, total + inside_b, rhs))
    return rep


def check_nonseparable(g: Instance, v: int,
                       optima: list[Clustering] | None = None) -> LemmaReport:
    """Some optimum keeps all of N[v] in one cluster when v is reducible."""
    _guard(g)
    if not is_reducible(g, v):
        raise ValueError(f"vertex {v} is not reducible")
    rep = LemmaReport("nonseparable", 1)
    nv = set(_closed(g.adj, v).tolist())
    optima = _optima(g, optima)
    if not any(nv <= c.block_of(v) for c in optima):
        rep.violations.append((g, v, len(optima), None))
    return rep


# -- corpus driver -------------------------------------------------------------------


def _random_subset(rng: np.random.Generator, n: int) -> set[int]:
    return set(np.flatnonzero(rng.random(n) < 0.5).tolist())


def _random_partition(rng: np.random.Generator, n: int) -> Clustering:
    table = solver._rgs_table(n)[0]
    return Clustering.from_labels(table[rng.integers(len(table))])


def _corner_sets(g: Instance) -> list[set[int]]:
    return [set(), set(range(g.n)), *(c for c in connected_components(g))]


def check_instance(g: Instance, rng: np.random.Generator, wanted: set[str],
                   corners: bool = True) -> dict[str, LemmaReport]:
    """Run the requested checks on one instance with sampled cut sets."""
    res = solver.brute_force_opt(g, enumerate_all=True)
    optima, opt = res.all_optima, res.opt_weight
    xs_list = [_random_subset(rng, g.n)]
    if corners:
        xs_list += _corner_sets(g)
    out: dict[str, LemmaReport] = {}

    def add(rep: LemmaReport) -> None:
        # One trial per instance, however many cut sets it exercised.
        cur = out.setdefault(rep.lemma, LemmaReport(rep.lemma, 1))
        cur.violations.extend(rep.violations)

    if "cutting" in wanted:
        parts = [_random_partition(rng, g.n)]
        if corners:
            parts += [Clustering([range(g.n)]), Clustering(connected_components(g))]
        for p in parts:
            add(check_cutting_lemma(g, p, opt))
    if "components" in wanted:
        add(check_components(g, optima))
    for xs in xs_list:
        if "two-cut" in wanted:
            add(check_two_cut(g, xs, opt))
        if "cut-preferred" in wanted:
            add(check_cut_preferred(g, xs, optima))
        if "edge-cutting" in wanted:
            add(check_edge_cutting(g, xs, optima))
        if "boundary" in wanted:
            add(check_boundary_lemma(g, xs, optima))
    if "nonseparable" in wanted:
        pivots = [v for v in range(g.n) if is_reducible(g, v)]
        for v in pivots:
            add(check_nonseparable(g, v, optima))
    return out


def corpus_instance(index: int, rng: np.random.Generator) -> Instance:
    p = CORPUS_P[index % len(CORPUS_P)]
    n = CORPUS_N[(index // len(CORPUS_P)) % len(CORPUS_N)]
    return gen_random(n, p, CORPUS_WEIGHT_MAX, Mode.INTEGER, seed=int(rng.integers(2**63)))


def run_suite(trials: int = 1000, seed: int = CORPUS_SEED,
              lemmas: Iterable[str] = LEMMAS, max_instances: int | None = None) -> list[LemmaReport]:
    """Check every lemma on ``trials`` corpus instances.

    The non-separability check only counts instances that have a reducible
    vertex, so the corpus is extended until each lemma has its quota (or
    ``max_instances`` is hit).
    """
    lemmas = tuple(lemmas)
    unknown = set(lemmas) - set(LEMMAS)
    if unknown:
        raise ValueError(f"unknown lemma ids: {sorted(unknown)}")
    reports = {name: LemmaReport(name) for name in lemmas}
    rng = np.random.default_rng(seed)
    limit = max_instances if max_instances is not None else max(10 * trials, 100)
    index = 0
    while index < limit:
        wanted = {k for k, r in reports.items() if r.instances_checked < trials}
        if not wanted:
            break
        g = corpus_instance(index, rng)
        index += 1
        for name, rep in check_instance(g, rng, wanted).items():
            reports[name].merge(rep)
    return [reports[name] for name in lemmas]


def summary_rows(reports: list[LemmaReport]) -> list[tuple[str, int, int]]:
    return [(r.lemma, r.instances_checked, len(r.violations)) for r in reports]
