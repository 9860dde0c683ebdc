from __future__ import annotations

import json

import pytest

from clusteredit import Instance, Mode, lemmas
from clusteredit.cli import main
from clusteredit.io import parse_clustering, read_instance, write_instance

from conftest import k4_plus_x, path3


@pytest.fixture
def p3_file(tmp_path):
    path = tmp_path / "p3.cew"
    write_instance(path, path3())
    return path


def test_kernelize(p3_file, tmp_path, capsys):
    assert main(["kernelize", str(p3_file), "--out-dir", str(tmp_path / "out")]) == 0
    out = capsys.readouterr().out
    assert "kernel: n=0 spent=1" in out
    kernel = read_instance(tmp_path / "out" / "p3.kernel.cew")
    assert kernel.n == 0
    rows = [json.loads(l) for l in (tmp_path / "out" / "p3.trace.jsonl").read_text().splitlines()]
    assert sum(r["cost"] for r in rows) == 1
    assert (tmp_path / "out" / "p3.vmap").read_text().split() == ["1", "deleted", "2", "deleted", "3", "deleted"]


def test_kernelize_cluster_graph(tmp_path, capsys):
    path = tmp_path / "tri.cew"
    write_instance(path, Instance.from_edges(3, [(0, 1), (1, 2), (0, 2)]))
    assert main(["kernelize", str(path)]) == 0
    assert "kernel: n=0 spent=0" in capsys.readouterr().out


def test_malformed_header(tmp_path, capsys):
    path = tmp_path / "bad.cew"
    path.write_text("p cew three 2\n")
    assert main(["kernelize", str(path)]) == 2
    assert "line 1" in capsys.readouterr().err


def test_unit_mode_rejects_weights(tmp_path):
    path = tmp_path / "w.cew"
    path.write_text("p cew 2 1\ne 1 2 4\n")
    assert main(["kernelize", str(path), "--mode", "unit"]) == 2


def test_decide(p3_file, tmp_path, capsys):
    assert main(["decide", str(p3_file), "--k", "1"]) == 0
    assert "answer: yes" in capsys.readouterr().out
    assert main(["decide", str(p3_file), "--k", "0"]) == 1
    assert "answer: no" in capsys.readouterr().out
    empty = tmp_path / "empty.cew"
    write_instance(empty, Instance.empty(0))
    assert main(["decide", str(empty), "--k", "0"]) == 0


def test_decide_kernel_only_and_solve(tmp_path, capsys):
    path = tmp_path / "c5.cew"
    write_instance(path, Instance.from_edges(5, [(i, (i + 1) % 5) for i in range(5)]))
    assert main(["decide", str(path), "--k", "3"]) == 0
    assert "answer: kernel-only" in capsys.readouterr().out
    assert main(["decide", str(path), "--k", "3", "--solve"]) == 0
    assert "answer: yes" in capsys.readouterr().out
    assert main(["decide", str(path), "--k", "2.5", "--solve"]) == 1


@pytest.mark.parametrize("engine", ["brute", "branch"])
def test_solve(p3_file, tmp_path, capsys, engine):
    assert main(["solve", str(p3_file), "--engine", engine, "--out-dir", str(tmp_path)]) == 0
    record = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
    assert record["opt_weight"] == 1
    assert set(record) == {"opt_weight", "clusters", "node_count_explored"}
    assert parse_clustering((tmp_path / "p3.clusters").read_text(), 3).check(3) is None


def test_solve_cluster_graph(tmp_path, capsys):
    path = tmp_path / "tri.cew"
    write_instance(path, Instance.from_edges(3, [(0, 1), (1, 2), (0, 2)]))
    assert main(["solve", str(path)]) == 0
    assert json.loads(capsys.readouterr().out.splitlines()[-1])["opt_weight"] == 0


def test_solve_after_kernelize(tmp_path, capsys):
    path = tmp_path / "k4x.cep"
    write_instance(path, k4_plus_x(Mode.UNWEIGHTED))
    assert main(["solve", str(path), "--kernelize"]) == 0
    record = json.loads(capsys.readouterr().out.splitlines()[-1])
    assert record["opt_weight"] == 1 and record["clusters"] == [[0, 1, 2, 3, 4]]


def test_brute_guard(tmp_path, capsys):
    path = tmp_path / "big.cew"
    write_instance(path, Instance.empty(14))
    assert main(["solve", str(path), "--engine", "brute"]) == 3
    assert "limited to 13" in capsys.readouterr().err


def test_verify_lemmas(capsys):
    assert main(["verify-lemmas", "--trials", "5"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert len(out) == 1 + len(lemmas.LEMMAS)
    assert all(line.split()[-1] == "0" for line in out[1:])


def test_verify_lemmas_vacuous(caplog):
    assert main(["verify-lemmas", "--trials", "0"]) == 0
    assert "vacuous" in caplog.text


def test_verify_lemmas_corrupted_oracle(monkeypatch, capsys):
    from clusteredit import solver
    real = solver.brute_force_opt

    def lying(g, enumerate_all=False):
        res = real(g, enumerate_all)
        res.opt_weight = res.opt_weight + (1 if g.n >= 3 else 0)
        return res

    monkeypatch.setattr(solver, "brute_force_opt", lying)
    assert main(["verify-lemmas", "--trials", "5"]) == 1


def test_gen_and_seed_env(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("CLUSTEREDIT_SEED", "7")
    a, b = tmp_path / "a.cew", tmp_path / "b.cew"
    assert main(["gen", "planted", "--n", "12", "--clusters", "3", "--budget", "2", "-o", str(a)]) == 0
    assert main(["gen", "planted", "--n", "12", "--clusters", "3", "--budget", "2",
                 "--seed", "7", "-o", str(b)]) == 0
    assert a.read_text() == b.read_text()
    assert parse_clustering((tmp_path / "a.cew.planted").read_text(), 12).check(12) is None
    assert main(["gen", "random", "--n", "5", "--p", "1", "-o", str(a)]) == 0
    assert read_instance(a).m == 10


def test_bench(tmp_path, capsys):
    rows_file = tmp_path / "rows.jsonl"
    assert main(["bench", "--sizes", "100,200", "--budget-frac", "0", "--json", str(rows_file)]) == 0
    rows = [json.loads(l) for l in rows_file.read_text().splitlines()]
    assert [r["n"] for r in rows] == [100, 200]
    assert all(r["kernel_n"] == 0 for r in rows)


def test_usage_errors(capsys):
    assert main([]) == 2
    assert main(["solve", "/nonexistent/file.cew"]) == 2
