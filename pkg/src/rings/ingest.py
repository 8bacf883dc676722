"""Readers and writers for graph datasets, plus synthetic generators."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from .core import AttributedGraph, GraphDataset, infer_task


class ParseError(ValueError):
    """Malformed dataset input. ``line`` is 1-based when known."""

    def __init__(self, message: str, path=None, line: int | None = None):
        where = ""
        if path is not None:
            where = f"{path}"
            if line is not None:
                where += f":{line}"
            where += ": "
        super().__init__(where + message)
        self.path = path
        self.line = line


@dataclass
class ParseReport:
    """Counters and notes collected while parsing."""

    graphs_read: int = 0
    edges_dropped: int = 0
    warnings: list[str] = field(default_factory=list)


def _clean_edges(pairs, n: int, report: ParseReport, context: str, path=None, line=None):
    """Drop self-loops and repeated pairs; fold (u, v)/(v, u) into one edge."""
    seen_directed = set()
    edges = set()
    for pair in pairs:
        try:
            u, v = (int(x) for x in pair)
        except (TypeError, ValueError):
            raise ParseError(f"{context}: edge {pair!r} is not an integer pair", path, line) from None
        if not (0 <= u < n and 0 <= v < n):
            raise ParseError(f"{context}: edge ({u}, {v}) out of range for n={n}", path, line)
        if u == v or (u, v) in seen_directed:
            report.edges_dropped += 1
            continue
        seen_directed.add((u, v))
        edges.add((min(u, v), max(u, v)))
    return sorted(edges)


# --------------------------------------------------------------------- TU

def _read_rows(path: Path, dtype=float) -> list[list]:
    rows = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            s = raw.strip()
            if not s:
                continue
            try:
                rows.append([dtype(x) for x in s.split(",")])
            except ValueError:
                raise ParseError(f"cannot parse {s!r}", path, lineno) from None
    return rows


def _one_hot_columns(labels: np.ndarray) -> np.ndarray:
    """One-hot encode each integer column over the range min..max."""
    blocks = []
    for col in labels.T:
        lo = col.min()
        width = int(col.max() - lo) + 1
        blk = np.zeros((len(col), width))
        blk[np.arange(len(col)), (col - lo).astype(int)] = 1.0
        blocks.append(blk)
    return np.hstack(blocks)


def parse_tu_dataset(directory, name: str, degree_onehot: bool = False):
    """Read a dataset in the TU benchmark text format.

    Node ids in ``<name>_A.txt`` are global and 1-indexed; they are rebased to
    0 within each graph, keeping file order. Features are the node attributes
    followed by a one-hot encoding of node labels. Without either file, every
    node gets a constant 1.0 feature, or a one-hot degree encoding when
    ``degree_onehot`` is set.

    Returns:
        ``(GraphDataset, ParseReport)``.

    Raises:
        FileNotFoundError: A mandatory file is missing.
        ParseError: Inconsistent ids or ragged attribute rows.
    """
    root = Path(directory)
    path_of = lambda suffix: root / f"{name}_{suffix}.txt"
    for req in ("A", "graph_indicator"):
        if not path_of(req).is_file():
            raise FileNotFoundError(f"missing TU file {path_of(req)}")
    report = ParseReport()

    indicator = np.array([r[0] for r in _read_rows(path_of("graph_indicator"), int)], dtype=int)
    num_nodes = len(indicator)
    if num_nodes == 0:
        raise ParseError("graph indicator is empty", path_of("graph_indicator"))
    graph_ids = np.unique(indicator)
    if graph_ids[0] < 1:
        raise ParseError("graph ids must be 1-indexed", path_of("graph_indicator"))
    missing = np.setdiff1d(np.arange(1, graph_ids[-1] + 1), graph_ids)
    if missing.size:
        report.warnings.append(f"graph ids without nodes: {missing[:10].tolist()}")

    raw_edges = _read_rows(path_of("A"), int)
    for lineno, row in enumerate(raw_edges, 1):
        if len(row) != 2:
            raise ParseError(f"expected 2 ids, got {len(row)}", path_of("A"), lineno)
    E = np.array(raw_edges, dtype=int).reshape(-1, 2) - 1
    if E.size and (E.min() < 0 or E.max() >= num_nodes):
        bad = int(np.nonzero((E < 0) | (E >= num_nodes))[0][0])
        raise ParseError(f"node id {raw_edges[bad]} references no graph", path_of("A"), bad + 1)
    if E.size and np.any(indicator[E[:, 0]] != indicator[E[:, 1]]):
        bad = int(np.nonzero(indicator[E[:, 0]] != indicator[E[:, 1]])[0][0])
        raise ParseError("edge joins nodes of different graphs", path_of("A"), bad + 1)

    feats = []
    if path_of("node_attributes").is_file():
        rows = _read_rows(path_of("node_attributes"), float)
        widths = {len(r) for r in rows}
        if len(rows) != num_nodes or len(widths) != 1:
            raise ParseError(
                f"ragged node attributes: {len(rows)} rows for {num_nodes} nodes, widths {sorted(widths)}",
                path_of("node_attributes"))
        feats.append(np.array(rows, dtype=float))
    if path_of("node_labels").is_file():
        rows = _read_rows(path_of("node_labels"), int)
        widths = {len(r) for r in rows}
        if len(rows) != num_nodes or len(widths) != 1:
            raise ParseError(f"ragged node labels: {len(rows)} rows for {num_nodes} nodes",
                             path_of("node_labels"))
        feats.append(_one_hot_columns(np.array(rows, dtype=int)))

    targets = None
    if path_of("graph_labels").is_file():
        rows = _read_rows(path_of("graph_labels"), int)
        if len(rows) != graph_ids[-1]:
            raise ParseError(f"{len(rows)} graph labels for {graph_ids[-1]} graphs", path_of("graph_labels"))
        targets = [r[0] if len(r) == 1 else r for r in rows]

    # stable grouping of nodes by graph
    order = np.argsort(indicator, kind="stable")
    starts = np.searchsorted(indicator[order], graph_ids)
    ends = np.searchsorted(indicator[order], graph_ids, side="right")
    local = np.empty(num_nodes, dtype=int)
    for s, e in zip(starts, ends):
        local[order[s:e]] = np.arange(e - s)
    edge_owner = indicator[E[:, 0]] if E.size else np.empty(0, dtype=int)
    edge_sort = np.argsort(edge_owner, kind="stable")
    e_starts = np.searchsorted(edge_owner[edge_sort], graph_ids)
    e_ends = np.searchsorted(edge_owner[edge_sort], graph_ids, side="right")

    if feats:
        X_all = np.hstack(feats)
    elif degree_onehot:
        deg = np.zeros(num_nodes, dtype=int)
        seen = set()
        for u, v in E:
            if u != v and (min(u, v), max(u, v)) not in seen:
                seen.add((min(u, v), max(u, v)))
                deg[u] += 1
                deg[v] += 1
        X_all = np.zeros((num_nodes, int(deg.max()) + 1))
        X_all[np.arange(num_nodes), deg] = 1.0
    else:
        X_all = np.ones((num_nodes, 1))

    graphs = []
    for gi, gid in enumerate(graph_ids):
        nodes = order[starts[gi]:ends[gi]]
        ge = E[edge_sort[e_starts[gi]:e_ends[gi]]]
        pairs = [(local[u], local[v]) for u, v in ge]
        edges = _clean_edges(pairs, len(nodes), report, f"graph {gid}")
        graphs.append(AttributedGraph(
            n=len(nodes), edges=edges, features=X_all[nodes],
            target=None if targets is None else targets[gid - 1],
            graph_id=int(gid) - 1,
        ))
    report.graphs_read = len(graphs)
    task = infer_task([g.target for g in graphs]) if targets is not None else "none"
    return GraphDataset(name=name, graphs=tuple(graphs), task=task), report


# ------------------------------------------------------------------ JSONL

def _target_from_json(t):
    if isinstance(t, list):
        return tuple(t)
    return t


def _target_to_json(t):
    if isinstance(t, tuple):
        return list(t)
    if isinstance(t, np.generic):
        return t.item()
    return t


def parse_jsonl(path, name: str | None = None, task: str | None = None):
    """Read the canonical JSON-lines format, one graph per line.

    Each object carries ``id``, ``n``, ``edges`` (list of ``[u, v]``),
    ``features`` (``n`` rows) and an optional ``target``. Self-loops and
    repeated edges are dropped and counted.
    """
    path = Path(path)
    report = ParseReport()
    graphs = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            if not raw.strip():
                continue
            try:
                obj = json.loads(raw)
            except json.JSONDecodeError as exc:
                raise ParseError(f"invalid JSON ({exc.msg})", path, lineno) from None
            if not isinstance(obj, dict):
                raise ParseError("line is not a JSON object", path, lineno)
            missing = [k for k in ("id", "n", "edges", "features") if k not in obj]
            if missing:
                raise ParseError(f"missing fields {missing}", path, lineno)
            n = obj["n"]
            if not isinstance(n, int) or isinstance(n, bool) or n < 1:
                raise ParseError(f"n must be a positive integer, got {n!r}", path, lineno)
            X = obj["features"]
            if not isinstance(X, list) or len(X) != n:
                got = len(X) if isinstance(X, list) else type(X).__name__
                raise ParseError(f"features has {got} rows, expected n={n}", path, lineno)
            if not isinstance(obj["edges"], list):
                raise ParseError("edges must be a list", path, lineno)
            edges = _clean_edges(obj["edges"], n, report, f"graph {obj['id']!r}", path, lineno)
            try:
                g = AttributedGraph(n=n, edges=edges, features=np.array(X, dtype=float),
                                    target=_target_from_json(obj.get("target")), graph_id=obj["id"])
            except (ValueError, TypeError) as exc:
                raise ParseError(str(exc), path, lineno) from None
            graphs.append(g)
    report.graphs_read = len(graphs)
    if task is None:
        task = infer_task([g.target for g in graphs])
    try:
        ds = GraphDataset(name=name or path.stem, graphs=tuple(graphs), task=task)
    except ValueError as exc:
        raise ParseError(str(exc), path) from None
    return ds, report


def graph_to_json(g: AttributedGraph) -> str:
    obj = {
        "id": _target_to_json(g.graph_id),
        "n": g.n,
        "edges": [list(e) for e in g.edges],
        "features": g.features.tolist(),
    }
    if g.target is not None:
        obj["target"] = _target_to_json(g.target)
    return json.dumps(obj, separators=(",", ":"), allow_nan=False)


def write_jsonl(d: GraphDataset, path) -> None:
    """Write ``d`` in the canonical JSON-lines format.

    Field order is fixed and floats use Python's shortest round-trip repr,
    so ``parse_jsonl`` recovers every value bit for bit.
    """
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
        for g in d:
            fh.write(graph_to_json(g))
            fh.write("\n")
    os.replace(tmp, path)


def load_dataset(path, fmt: str | None = None, name: str | None = None, degree_onehot: bool = False):
    """Load a TU directory or a JSONL file, guessing the format from the path."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"no such dataset path: {path}")
    if fmt is None:
        fmt = "tu" if path.is_dir() else "jsonl"
    if fmt == "tu":
        return parse_tu_dataset(path, name or path.name, degree_onehot=degree_onehot)
    if fmt == "jsonl":
        return parse_jsonl(path, name=name)
    raise ValueError(f"unknown dataset format {fmt!r}; expected 'tu' or 'jsonl'")


# -------------------------------------------------------------- generators

def gen_ring_of_cliques(num_cliques: int, clique_size: int, feature_dim: int, seed: int = 0,
                        graph_id: Any = 0) -> AttributedGraph:
    """Cliques joined in a cycle, node 0 of clique i to node 0 of clique i+1.

    Features are i.i.d. standard normal draws from ``seed``.
    """
    if num_cliques < 3:
        raise ValueError(f"num_cliques must be >= 3, got {num_cliques}")
    if clique_size < 2:
        raise ValueError(f"clique_size must be >= 2, got {clique_size}")
    if feature_dim < 1:
        raise ValueError(f"feature_dim must be >= 1, got {feature_dim}")
    c, s = num_cliques, clique_size
    edges = []
    for i in range(c):
        base = i * s
        edges += [(base + a, base + b) for a in range(s) for b in range(a + 1, s)]
        edges.append((base, ((i + 1) % c) * s))
    X = np.random.default_rng(seed).standard_normal((c * s, feature_dim))
    return AttributedGraph(n=c * s, edges=edges, features=X, graph_id=graph_id)


def gen_erdos_renyi(n: int, p: float, feature_dim: int = 1, seed: int = 0,
                    graph_id: Any = 0) -> AttributedGraph:
    """G(n, p) with i.i.d. standard normal features."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    rng = np.random.default_rng(seed)
    iu, ju = np.triu_indices(n, 1)
    keep = rng.random(iu.size) < p
    X = rng.standard_normal((n, feature_dim))
    return AttributedGraph(n=n, edges=list(zip(iu[keep].tolist(), ju[keep].tolist())),
                           features=X, graph_id=graph_id)
