"""Command-line interface.

Exit codes: 0 success / yes, 1 no (or lemma violations), 2 usage or parse
error, 3 instance too large for the requested engine.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

from . import io, lemmas
from .generate import PlantedSpec, gen_planted, gen_random
from .instance import ClusterEditError, Instance, Mode, clustering_to_edits
from .kernel import decide, kernelize
from .solver import BRUTE_FORCE_LIMIT, GuardError, brute_force_opt, branch_opt, lift_clustering

log = logging.getLogger("clusteredit")

EXIT_OK, EXIT_NO, EXIT_USAGE, EXIT_GUARD = 0, 1, 2, 3
SEED_ENV = "CLUSTEREDIT_SEED"
BRANCH_LIMIT = 40


@dataclass
class RunReport:
    n: int
    m: int
    total_weight: float
    kernel_n: int | None = None
    spent: float | None = None
    residual: float | None = None
    answer: str | None = None
    opt_weight: float | None = None
    timings: dict[str, float] = field(default_factory=dict)

    def lines(self) -> list[str]:
        out = [f"input: n={self.n} m={self.m} total_weight={_num(self.total_weight)}"]
        if self.kernel_n is not None:
            out.append(f"kernel: n={self.kernel_n} spent={_num(self.spent)}")
        if self.residual is not None:
            out.append(f"residual: {_num(self.residual)}")
        if self.opt_weight is not None:
            out.append(f"opt_weight: {_num(self.opt_weight)}")
        if self.answer is not None:
            out.append(f"answer: {self.answer}")
        out.extend(f"time[{k}]: {v:.4f}s" for k, v in self.timings.items())
        return out


def _num(x: float | None) -> str:
    if x is None:
        return "-"
    if math.isinf(x):
        return "inf"
    return str(int(x)) if x == int(x) else f"{x:.9g}"


def _mode(text: str | None) -> Mode | None:
    return None if text is None else Mode(text)


def _load(args) -> tuple[Instance, RunReport]:
    g = io.read_instance(args.input, _mode(args.mode))
    return g, RunReport(g.n, g.m, g.total_edge_weight())


def _out_dir(args) -> Path:
    out = Path(args.out_dir) if args.out_dir else Path(args.input).parent
    out.mkdir(parents=True, exist_ok=True)
    return out


def _default_seed() -> int:
    return int(os.environ.get(SEED_ENV, "0"))


# -- commands ------------------------------------------------------------------------


def cmd_kernelize(args) -> int:
    g, rep = _load(args)
    t0 = time.perf_counter()
    res = kernelize(g)
    rep.timings["kernelize"] = time.perf_counter() - t0
    rep.kernel_n, rep.spent = res.kernel.n, res.spent
    rep.answer = "kernel-only"
    out = _out_dir(args)
    stem = Path(args.input).stem
    io.write_instance(out / f"{stem}.kernel.cew", res.kernel)
    (out / f"{stem}.vmap").write_text(io.serialize_vertex_map(res.vertex_map))
    with open(out / f"{stem}.trace.jsonl", "w") as fh:
        io.write_trace(fh, res.trace_rows())
    print("\n".join(rep.lines()))
    print(f"wrote {out / (stem + '.kernel.cew')}")
    return EXIT_OK


def _solve_kernel(kernel: Instance):
    if kernel.n <= BRUTE_FORCE_LIMIT:
        return brute_force_opt(kernel)
    return branch_opt(kernel)


def cmd_decide(args) -> int:
    g, rep = _load(args)
    t0 = time.perf_counter()
    d = decide(g, args.k)
    rep.timings["kernelize"] = time.perf_counter() - t0
    res = d.result
    rep.kernel_n, rep.spent, rep.residual, rep.answer = res.kernel.n, res.spent, d.residual, d.answer
    if d.verdict == "yes-kernel":
        if args.solve and res.kernel.n <= BRANCH_LIMIT:
            t0 = time.perf_counter()
            opt = _solve_kernel(res.kernel)
            rep.timings["solve"] = time.perf_counter() - t0
            rep.opt_weight = opt.opt_weight
            rep.answer = "yes" if opt.opt_weight <= d.residual + 1e-9 else "no"
        elif res.kernel.n <= BRANCH_LIMIT:
            log.warning("kernel has %d vertices; rerun with --solve to settle it exactly", res.kernel.n)
    print("\n".join(rep.lines()))
    return EXIT_NO if rep.answer == "no" else EXIT_OK


def cmd_solve(args) -> int:
    g, rep = _load(args)
    target = g
    res = None
    if args.kernelize:
        t0 = time.perf_counter()
        res = kernelize(g)
        rep.timings["kernelize"] = time.perf_counter() - t0
        rep.kernel_n, rep.spent = res.kernel.n, res.spent
        target = res.kernel
    limit = BRUTE_FORCE_LIMIT if args.engine == "brute" else BRANCH_LIMIT
    if target.n > limit:
        raise GuardError(f"{args.engine} engine is limited to {limit} vertices, got {target.n}")
    t0 = time.perf_counter()
    opt = brute_force_opt(target) if args.engine == "brute" else branch_opt(target)
    rep.timings["solve"] = time.perf_counter() - t0
    if opt.witness is None:
        print(json.dumps(opt.to_record()))
        return EXIT_NO
    clustering = opt.witness
    weight = opt.opt_weight
    if res is not None:
        clustering = lift_clustering(res, opt.witness)
        weight = clustering_to_edits(g, clustering).weight
    rep.opt_weight = weight
    record = opt.to_record()
    record["opt_weight"] = weight
    record["clusters"] = [sorted(b) for b in clustering.blocks]
    out = _out_dir(args)
    path = out / f"{Path(args.input).stem}.clusters"
    path.write_text(io.serialize_clustering(clustering))
    print("\n".join(rep.lines()))
    print(json.dumps(record))
    return EXIT_OK


def cmd_verify_lemmas(args) -> int:
    if args.trials == 0:
        log.warning("trials=0: nothing checked, the pass is vacuous")
    reports = lemmas.run_suite(args.trials, args.seed)
    print(f"{'lemma':<15}{'trials':>8}{'violations':>12}")
    for name, trials, bad in lemmas.summary_rows(reports):
        print(f"{name:<15}{trials:>8}{bad:>12}")
    return EXIT_NO if any(not r.passed for r in reports) else EXIT_OK


def cmd_gen(args) -> int:
    mode = Mode(args.mode)
    if args.kind == "planted":
        spec = PlantedSpec(args.n, args.clusters, args.budget, args.wmax, mode, args.seed)
        g, planted = gen_planted(spec)
        io.write_instance(args.output, g)
        Path(str(args.output) + ".planted").write_text(io.serialize_clustering(planted))
    else:
        g = gen_random(args.n, args.p, args.wmax, mode, args.seed)
        io.write_instance(args.output, g)
    print(f"wrote {args.output}: n={g.n} m={g.m}")
    return EXIT_OK


def bench_rows(sizes, budget_frac=0.05, cluster_size=20, weight_max=1, seed=0,
               mode=Mode.INTEGER) -> list[dict]:
    rows = []
    for n in sizes:
        spec = PlantedSpec(n, max(1, n // cluster_size), int(round(budget_frac * n)),
                           weight_max, mode, seed)
        g, _ = gen_planted(spec)
        t0 = time.perf_counter()
        res = kernelize(g)
        rows.append({
            "n": n,
            "budget": spec.edit_budget,
            "seconds": time.perf_counter() - t0,
            "kernel_n": res.kernel.n,
            "spent": res.spent,
        })
    return rows


def cmd_bench(args) -> int:
    sizes = [int(s) for s in args.sizes.split(",") if s]
    rows = bench_rows(sizes, args.budget_frac, args.cluster_size, args.wmax, args.seed,
                      Mode(args.mode))
    prev = None
    print(f"{'n':>7}{'budget':>8}{'seconds':>10}{'ratio':>7}{'kernel_n':>10}{'spent':>8}")
    for row in rows:
        ratio = row["seconds"] / prev if prev else float("nan")
        prev = row["seconds"]
        print(f"{row['n']:>7}{row['budget']:>8}{row['seconds']:>10.3f}{ratio:>7.2f}"
              f"{row['kernel_n']:>10}{_num(row['spent']):>8}")
    if args.json:
        Path(args.json).write_text("".join(json.dumps(r) + "\n" for r in rows))
    return EXIT_OK


# -- parser --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="clusteredit", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def add_input(sp):
        sp.add_argument("input")
        sp.add_argument("--mode", choices=[m.value for m in Mode])

    sp = sub.add_parser("kernelize", help="reduce an instance and write kernel files")
    add_input(sp)
    sp.add_argument("--out-dir")
    sp.set_defaults(func=cmd_kernelize)

    sp = sub.add_parser("decide", help="is there a solution of weight <= k?")
    add_input(sp)
    sp.add_argument("--k", type=float, required=True)
    sp.add_argument("--solve", action="store_true", help="settle kernel-only answers exactly")
    sp.set_defaults(func=cmd_decide)

    sp = sub.add_parser("solve", help="exact optimum and witness clustering")
    add_input(sp)
    sp.add_argument("--engine", choices=["brute", "branch"], default="branch")
    sp.add_argument("--kernelize", action="store_true", help="solve the kernel and lift back")
    sp.add_argument("--out-dir")
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("verify-lemmas", help="check the cut inequalities on a random corpus")
    sp.add_argument("--trials", type=int, default=1000)
    sp.add_argument("--seed", type=int, default=lemmas.CORPUS_SEED)
    sp.set_defaults(func=cmd_verify_lemmas)

    sp = sub.add_parser("gen", help="write a generated instance")
    sp.add_argument("kind", choices=["planted", "random"])
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--clusters", type=int, default=2)
    sp.add_argument("--budget", type=int, default=0)
    sp.add_argument("--p", type=float, default=0.5)
    sp.add_argument("--wmax", type=float, default=1)
    sp.add_argument("--mode", choices=[m.value for m in Mode], default="int")
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("-o", "--output", required=True)
    sp.set_defaults(func=cmd_gen)

    sp = sub.add_parser("bench", help="time kernelization on planted instances")
    sp.add_argument("--sizes", default="1000,2000,4000")
    sp.add_argument("--budget-frac", type=float, default=0.05)
    sp.add_argument("--cluster-size", type=int, default=20)
    sp.add_argument("--wmax", type=float, default=1)
    sp.add_argument("--mode", choices=[m.value for m in Mode], default="int")
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--json", help="write machine-readable rows to this file")
    sp.set_defaults(func=cmd_bench)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    if getattr(args, "seed", "unset") is None:
        args.seed = _default_seed()
    try:
        return args.func(args)
    except GuardError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (io.ParseError, OSError, ValueError, ClusterEditError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
