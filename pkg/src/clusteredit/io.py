"""Text formats for instances, clusterings and kernel sidecars.

Instance files are line oriented with 1-based vertex ids::

    c any comment
    p cew <n> <m>        weighted header (m = number of edge lines)
    e <u> <v> <w>        edge of deletion cost w (a number >= 1 or ``inf``)
    a <u> <v> <w>        anti-edge insertion cost (default 1)

Unweighted files use ``p cep <n> <m>`` and ``e <u> <v>`` lines. The writer
adds a ``c mode <mode>`` comment that the reader honours when no mode is
forced, so parse -> serialize -> parse is the identity.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Iterable, TextIO

import numpy as np

from .instance import ClusterEditError, Clustering, Instance, Mode


class ParseError(ClusterEditError, ValueError):
    def __init__(self, message: str, line: int | None = None) -> None:
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


def _parse_weight(tok: str, lineno: int) -> float:
    if tok.lower() in ("inf", "+inf", "infinity"):
        return math.inf
    try:
        w = float(tok)
    except ValueError:
        raise ParseError(f"bad weight {tok!r}", lineno) from None
    if not math.isfinite(w) or w < 1.0:
        raise ParseError(f"weight {tok} must be >= 1 or inf", lineno)
    return w


def parse_instance(text: str, mode: Mode | str | None = None) -> Instance:
    forced = Mode(mode) if mode is not None else None
    declared: Mode | None = None
    header: tuple[str, int, int] | None = None
    adj = weight = None
    seen: set[tuple[int, int]] = set()
    edge_lines = 0

    for lineno, raw in enumerate(text.splitlines(), start=1):
        toks = raw.split()
        if not toks:
            continue
        kind = toks[0]
        if kind == "c":
            if len(toks) == 3 and toks[1] == "mode":
                try:
                    declared = Mode(toks[2])
                except ValueError:
                    raise ParseError(f"unknown mode {toks[2]!r}", lineno) from None
            continue
        if kind == "p":
            if header is not None:
                raise ParseError("duplicate header", lineno)
            if len(toks) != 4 or toks[1] not in ("cew", "cep"):
                raise ParseError("header must be 'p cew <n> <m>' or 'p cep <n> <m>'", lineno)
            try:
                n, m = int(toks[2]), int(toks[3])
            except ValueError:
                raise ParseError("header counts must be integers", lineno) from None
            if n < 0 or m < 0:
                raise ParseError("header counts must be nonnegative", lineno)
            header = (toks[1], n, m)
            adj = np.zeros((n, n), dtype=bool)
            weight = np.ones((n, n))
            np.fill_diagonal(weight, 0.0)
            continue
        if kind not in ("e", "a"):
            raise ParseError(f"unknown line type {kind!r}", lineno)
        if header is None:
            raise ParseError("pair line before header", lineno)
        fmt, n, _ = header
        unit = fmt == "cep" or forced is Mode.UNWEIGHTED
        if kind == "a" and fmt == "cep":
            raise ParseError("anti-edge lines are not allowed in unweighted files", lineno)
        want = 3 if fmt == "cep" else 4
        if len(toks) != want:
            raise ParseError(f"expected {want} fields, got {len(toks)}", lineno)
        try:
            u, v = int(toks[1]) - 1, int(toks[2]) - 1
        except ValueError:
            raise ParseError("vertex ids must be integers", lineno) from None
        if not (0 <= u < n and 0 <= v < n):
            raise ParseError(f"vertex id out of range 1..{n}", lineno)
        if u == v:
            raise ParseError("self-loop", lineno)
        key = (min(u, v), max(u, v))
        if key in seen:
            raise ParseError(f"pair {u + 1} {v + 1} listed twice", lineno)
        seen.add(key)
        w = 1.0 if fmt == "cep" else _parse_weight(toks[3], lineno)
        if unit and w != 1.0:
            raise ParseError("weighted line in unweighted mode", lineno)
        if kind == "e":
            adj[u, v] = adj[v, u] = True
            edge_lines += 1
        weight[u, v] = weight[v, u] = w

    if header is None:
        raise ParseError("missing header line")
    fmt, n, m = header
    if edge_lines != m:
        raise ParseError(f"header announces {m} edges, found {edge_lines}")

    if forced is not None:
        chosen = forced
    elif fmt == "cep":
        chosen = Mode.UNWEIGHTED
    elif declared is not None:
        chosen = declared
    else:
        finite = weight[np.isfinite(weight)]
        chosen = Mode.INTEGER if (finite == np.round(finite)).all() else Mode.REAL
    try:
        return Instance(adj, weight, chosen)
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def read_instance(path: str | Path, mode: Mode | str | None = None) -> Instance:
    return parse_instance(Path(path).read_text(), mode)


def _fmt_weight(w: float) -> str:
    if math.isinf(w):
        return "inf"
    if w == int(w):
        return str(int(w))
    return repr(float(w))


def serialize_instance(g: Instance) -> str:
    out: list[str] = []
    unit = g.mode is Mode.UNWEIGHTED and bool(np.isfinite(g.weight).all())
    out.append(f"c mode {g.mode.value}")
    out.append(f"p {'cep' if unit else 'cew'} {g.n} {g.m}")
    iu, ju = np.triu_indices(g.n, 1)
    present = g.adj[iu, ju]
    ws = g.weight[iu, ju]
    for u, v, w in zip(iu[present], ju[present], ws[present]):
        out.append(f"e {u + 1} {v + 1}" if unit else f"e {u + 1} {v + 1} {_fmt_weight(w)}")
    if not unit:
        anti = ~present & (ws != 1.0)
        for u, v, w in zip(iu[anti], ju[anti], ws[anti]):
            out.append(f"a {u + 1} {v + 1} {_fmt_weight(w)}")
    return "\n".join(out) + "\n"


def write_instance(path: str | Path, g: Instance) -> None:
    Path(path).write_text(serialize_instance(g))


# -- clusterings ---------------------------------------------------------------


def serialize_clustering(c: Clustering) -> str:
    """One block per line, 1-based ids."""
    return "".join(" ".join(str(v + 1) for v in sorted(b)) + "\n" for b in c.blocks)


def parse_clustering(text: str, n: int | None = None) -> Clustering:
    blocks = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        if not raw.strip() or raw.startswith("c"):
            continue
        try:
            blocks.append([int(t) - 1 for t in raw.split()])
        except ValueError:
            raise ParseError("cluster lines hold vertex ids", lineno) from None
    c = Clustering(blocks)
    if n is not None:
        try:
            c.check(n)
        except ValueError as exc:
            raise ParseError(str(exc)) from None
    return c


# -- kernel sidecars -------------------------------------------------------------


def serialize_vertex_map(vertex_map: dict[int, int | str]) -> str:
    """``<original> <kernel-id | deleted | replaced>`` per line, 1-based."""
    lines = []
    for orig in sorted(vertex_map):
        rep = vertex_map[orig]
        lines.append(f"{orig + 1} {rep + 1 if isinstance(rep, int) else rep}\n")
    return "".join(lines)


def parse_vertex_map(text: str) -> dict[int, int | str]:
    out: dict[int, int | str] = {}
    for raw in text.splitlines():
        if not raw.strip():
            continue
        a, b = raw.split()
        out[int(a) - 1] = b if b in ("deleted", "replaced") else int(b) - 1
    return out


def write_trace(fh: TextIO, rows: Iterable[dict]) -> None:
    for row in rows:
        fh.write(json.dumps(row, sort_keys=True) + "\n")
