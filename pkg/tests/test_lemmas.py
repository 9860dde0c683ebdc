from __future__ import annotations

import numpy as np
import pytest

from clusteredit import Clustering, GuardError, Instance, Mode
from clusteredit import lemmas
from clusteredit.generate import gen_random


def test_cutting_corners(p3):
    assert lemmas.check_cutting_lemma(p3, Clustering([range(3)])).passed
    g = Instance.from_edges(6, [(0, 1), (1, 2), (3, 4), (4, 5)])
    assert lemmas.check_cutting_lemma(g, Clustering([{0, 1, 2}, {3, 4, 5}])).passed


def test_two_cut_corners(p3):
    assert lemmas.check_two_cut(p3, set()).passed
    assert lemmas.check_two_cut(p3, {1}).passed


def test_cut_preferred_on_p3(p3):
    rep = lemmas.check_cut_preferred(p3, {0})
    assert rep.passed and rep.instances_checked == 1
    assert lemmas.check_cut_preferred(p3, {0, 1, 2}).passed


def test_edge_cutting_and_boundary_corners(p3):
    for xs in (set(), {0, 1, 2}):
        assert lemmas.check_edge_cutting(p3, xs).passed
        assert lemmas.check_boundary_lemma(p3, xs).passed
    assert lemmas.boundary(p3, {0, 1}) == {1}


def test_nonseparable(p3):
    assert lemmas.check_nonseparable(p3, 1).passed
    tri = Instance.from_edges(4, [(0, 1), (1, 2), (0, 2)])
    assert lemmas.check_nonseparable(tri, 0).passed
    c5 = Instance.from_edges(5, [(i, (i + 1) % 5) for i in range(5)])
    with pytest.raises(ValueError):
        lemmas.check_nonseparable(c5, 0)


def test_components(p3):
    g = Instance.from_edges(6, [(0, 1), (1, 2), (3, 4), (4, 5)])
    assert lemmas.check_components(g).passed


def test_guard():
    with pytest.raises(GuardError):
        lemmas.check_two_cut(Instance.empty(11), set())


def test_small_suite_passes():
    reports = lemmas.run_suite(trials=20)
    assert [r.lemma for r in reports] == list(lemmas.LEMMAS)
    assert all(r.passed and r.instances_checked == 20 for r in reports)


def test_unknown_lemma():
    with pytest.raises(ValueError):
        lemmas.run_suite(1, lemmas=["nope"])


def test_corrupted_oracle_is_caught(monkeypatch):
    real = lemmas.solver.brute_force_opt

    def lying(g, enumerate_all=False):
        res = real(g, enumerate_all)
        if g.n >= 3:
            res.opt_weight += 1
        return res

    monkeypatch.setattr(lemmas.solver, "brute_force_opt", lying)
    reports = lemmas.run_suite(trials=10)
    assert any(not r.passed for r in reports)


def test_real_weights_with_tolerance():
    rng = np.random.default_rng(3)
    for seed in range(15):
        g = gen_random(6, 0.5, 3, Mode.REAL, seed)
        out = lemmas.check_instance(g, rng, set(lemmas.LEMMAS))
        assert all(r.passed for r in out.values())
