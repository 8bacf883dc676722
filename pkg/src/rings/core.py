"""Graph containers and descriptive statistics."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Iterable, Sequence

import numpy as np

TASKS = ("binary-class", "multi-class", "multi-label", "regression", "none")


def _canonical_edges(edges: Iterable[Sequence[int]], n: int) -> tuple[tuple[int, int], ...]:
    out = set()
    for e in edges:
        if len(e) != 2:
            raise ValueError(f"edge {tuple(e)!r} is not a pair")
        u, v = int(e[0]), int(e[1])
        if not (0 <= u < n and 0 <= v < n):
            raise ValueError(f"edge ({u}, {v}) out of range for n={n}")
        if u == v:
            raise ValueError(f"self-loop at node {u}")
        key = (u, v) if u < v else (v, u)
        if key in out:
            raise ValueError(f"duplicate edge {key}")
        out.add(key)
    return tuple(sorted(out))


@dataclass(frozen=True, eq=False)
class AttributedGraph:
    """An undirected, unweighted graph with a dense node-feature matrix.

    Edges are stored once, as sorted ``(u, v)`` pairs with ``u < v``. The
    constructor rejects self-loops, duplicates and out-of-range endpoints;
    parsers are expected to clean their input first.

    Attributes:
        n: Number of nodes (at least 1).
        edges: Canonical edge tuple.
        features: Array of shape ``(n, k)`` with ``k >= 1``. Stored read-only.
        target: Optional graph-level label (int, float or list).
        graph_id: Identifier, unique within a dataset.
    """

    n: int
    edges: tuple[tuple[int, int], ...]
    features: np.ndarray
    target: Any = None
    graph_id: Any = 0

    def __post_init__(self):
        n = int(self.n)
        if n < 1:
            raise ValueError(f"graph {self.graph_id!r}: n must be >= 1, got {n}")
        X = np.array(self.features, dtype=float)
        if X.ndim == 1:
            X = X.reshape(n, -1) if X.size else X.reshape(n, 0)
        if X.ndim != 2 or X.shape[0] != n or X.shape[1] < 1:
            raise ValueError(
                f"graph {self.graph_id!r}: features must have shape (n, k>=1), got {X.shape}"
            )
        if not np.all(np.isfinite(X)):
            raise ValueError(f"graph {self.graph_id!r}: features contain non-finite values")
        X.setflags(write=False)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "edges", _canonical_edges(self.edges, n))
        object.__setattr__(self, "features", X)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @property
    def feature_dim(self) -> int:
        return self.features.shape[1]

    def adjacency(self) -> np.ndarray:
        """Dense symmetric 0/1 adjacency matrix."""
        A = np.zeros((self.n, self.n))
        if self.edges:
            e = np.asarray(self.edges)
            A[e[:, 0], e[:, 1]] = 1.0
            A[e[:, 1], e[:, 0]] = 1.0
        return A

    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.n, dtype=int)
        for u, v in self.edges:
            deg[u] += 1
            deg[v] += 1
        return deg

    def replace(self, **changes) -> "AttributedGraph":
        fields_ = dict(n=self.n, edges=self.edges, features=self.features,
                       target=self.target, graph_id=self.graph_id)
        fields_.update(changes)
        return AttributedGraph(**fields_)

    def __eq__(self, other):
        if not isinstance(other, AttributedGraph):
            return NotImplemented
        return (
            self.n == other.n
            and self.graph_id == other.graph_id
            and self.edges == other.edges
            and self.features.shape == other.features.shape
            and bool(np.array_equal(self.features, other.features))
            and self.target == other.target
        )

    __hash__ = None

    def __repr__(self):
        return (f"AttributedGraph(graph_id={self.graph_id!r}, n={self.n}, "
                f"edges={len(self.edges)}, k={self.feature_dim})")


@dataclass(frozen=True)
class GraphDataset:
    """A named, ordered collection of graphs.

    Feature widths may differ between graphs (complete-feature perturbations
    give every graph an ``n x n`` identity).
    """

    name: str
    graphs: tuple[AttributedGraph, ...]
    task: str = "none"

    def __post_init__(self):
        graphs = tuple(self.graphs)
        if self.task not in TASKS:
            raise ValueError(f"unknown task {self.task!r}; expected one of {TASKS}")
        ids = [g.graph_id for g in graphs]
        if len(set(map(repr, ids))) != len(ids):
            raise ValueError(f"dataset {self.name!r}: graph ids are not unique")
        object.__setattr__(self, "graphs", graphs)

    def __len__(self):
        return len(self.graphs)

    def __iter__(self):
        return iter(self.graphs)

    def __getitem__(self, i):
        return self.graphs[i]

    @property
    def N(self) -> int:
        return len(self.graphs)


@dataclass(frozen=True)
class GraphStats:
    """Per-graph size and density summary.

    ``m_directed`` counts each undirected edge twice, so ``mean_degree`` is
    ``m_directed / n`` and ``density`` is ``m_directed / (n (n - 1))``
    (zero for a single node).
    """

    graph_id: Any
    n: int
    m_directed: int
    mean_degree: float
    density: float


def graph_stats(g: AttributedGraph) -> GraphStats:
    m = 2 * g.num_edges
    dens = m / (g.n * (g.n - 1)) if g.n > 1 else 0.0
    return GraphStats(g.graph_id, g.n, m, m / g.n, dens)


STAT_FIELDS = ("n", "m_directed", "mean_degree", "density")


@dataclass(frozen=True)
class DatasetStats:
    """Dataset-level means and standard deviations of :class:`GraphStats`.

    Standard deviations use the ``N - 1`` divisor. For a single graph they
    are reported as 0 and ``sd_defined`` is False.
    """

    name: str
    N: int
    mean: dict = field(default_factory=dict)
    sd: dict = field(default_factory=dict)
    sd_defined: bool = True

    def to_dict(self) -> dict:
        return {
            "N": self.N,
            "mean": dict(self.mean),
            "sd": dict(self.sd),
            "sd_divisor": "N-1",
            "sd_defined": self.sd_defined,
        }


def dataset_stats(d: GraphDataset) -> DatasetStats:
    if len(d) == 0:
        raise ValueError(f"dataset {d.name!r} is empty")
    rows = np.array([[getattr(graph_stats(g), f) for f in STAT_FIELDS] for g in d], dtype=float)
    means = rows.mean(axis=0)
    if len(d) > 1:
        sds = rows.std(axis=0, ddof=1)
    else:
        sds = np.zeros(len(STAT_FIELDS))
    return DatasetStats(
        name=d.name,
        N=len(d),
        mean={f: float(v) for f, v in zip(STAT_FIELDS, means)},
        sd={f: float(v) for f, v in zip(STAT_FIELDS, sds)},
        sd_defined=len(d) > 1,
    )


def infer_task(targets: Sequence[Any]) -> str:
    """Guess the prediction task from graph targets."""
    vals = [t for t in targets if t is not None]
    if not vals:
        return "none"
    if any(isinstance(t, (list, tuple)) for t in vals):
        return "multi-label"
    if all(isinstance(t, (int, np.integer)) or (isinstance(t, float) and t.is_integer()) for t in vals):
        k = len(set(vals))
        return "binary-class" if k <= 2 else "multi-class"
    if all(isinstance(t, (int, float, np.number)) and math.isfinite(t) for t in vals):
        return "regression"
    raise ValueError("cannot infer task from targets")
