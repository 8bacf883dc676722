"""Mode perturbations: replace the structure or the features of a graph."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from ._parallel import map_ordered
from ._seeding import stable_seed
from ._validation import check_graphs
from .core import AttributedGraph, GraphDataset

KIND_CODES = ("o", "ef", "cf", "rf", "sf", "eg", "cg", "rg", "sg")
FEATURE_KINDS = frozenset({"ef", "cf", "rf", "sf"})
STRUCTURE_KINDS = frozenset({"eg", "cg", "rg", "sg"})
RANDOM_KINDS = frozenset({"rf", "sf", "rg", "sg"})

_LONG_NAMES = {
    "original": "o", "empty_features": "ef", "complete_features": "cf",
    "random_features": "rf", "shuffled_features": "sf", "empty_graph": "eg",
    "complete_graph": "cg", "random_graph": "rg", "shuffled_graph": "sg",
}

DEFAULT_RANDOM_DIM = 10


@dataclass(frozen=True)
class PerturbationKind:
    """One of the nine perturbations, with its optional parameter.

    ``dim`` is the width of random features (``rf`` only). ``p`` is the edge
    probability of ``rg``; ``None`` matches the density of each input graph.
    """

    code: str
    dim: int = DEFAULT_RANDOM_DIM
    p: float | None = None

    def __post_init__(self):
        code = _LONG_NAMES.get(self.code, self.code)
        if code not in KIND_CODES:
            raise ValueError(f"unknown perturbation kind {self.code!r}; expected one of {KIND_CODES}")
        object.__setattr__(self, "code", code)
        if int(self.dim) < 1:
            raise ValueError(f"random feature dimension must be >= 1, got {self.dim}")
        object.__setattr__(self, "dim", int(self.dim))
        if self.p is not None:
            p = float(self.p)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"random graph probability must lie in [0, 1], got {p}")
            object.__setattr__(self, "p", p)

    @classmethod
    def parse(cls, spec) -> "PerturbationKind":
        """Parse ``"rg"``, ``"rg:0.3"``, ``"rf:16"`` or an existing kind."""
        if isinstance(spec, PerturbationKind):
            return spec
        text = str(spec).strip()
        code, _, arg = text.partition(":")
        code = _LONG_NAMES.get(code, code)
        if not arg:
            return cls(code)
        if code == "rf":
            return cls(code, dim=int(arg))
        if code == "rg":
            return cls(code, p=float(arg))
        raise ValueError(f"kind {code!r} takes no parameter (got {text!r})")

    @property
    def is_random(self) -> bool:
        return self.code in RANDOM_KINDS

    @property
    def acts_on(self) -> str | None:
        if self.code in FEATURE_KINDS:
            return "features"
        if self.code in STRUCTURE_KINDS:
            return "structure"
        return None

    def __str__(self):
        return self.code


def graph_seed(master_seed: int, dataset_name: str, graph_id: Any) -> int:
    """Stable 64-bit seed for one graph, independent of process and platform."""
    return stable_seed(int(master_seed), str(dataset_name), graph_id)


def relabel_edges(edges, perm) -> list[tuple[int, int]]:
    """Map every endpoint ``u`` to ``perm[u]``."""
    perm = np.asarray(perm)
    return [(int(perm[u]), int(perm[v])) for u, v in edges]


def shuffle_permutation(n: int, seed: int) -> np.ndarray:
    """The node permutation ``sg`` and ``sf`` draw for a given seed."""
    return np.random.default_rng(seed).permutation(n)


def perturb_graph(g: AttributedGraph, kind, seed: int = 0) -> AttributedGraph:
    """Apply one perturbation to ``g``.

    The node count and graph id are preserved. Feature perturbations leave the
    edges alone and structural ones leave the features alone. ``seed`` only
    matters for ``rf``, ``sf``, ``rg`` and ``sg``.
    """
    k = PerturbationKind.parse(kind)
    n = g.n
    c = k.code
    if c == "o":
        return g
    if c == "ef":
        return g.replace(features=np.zeros((n, 1)))
    if c == "cf":
        return g.replace(features=np.eye(n))
    if c == "rf":
        return g.replace(features=np.random.default_rng(seed).standard_normal((n, k.dim)))
    if c == "sf":
        return g.replace(features=g.features[shuffle_permutation(n, seed)])
    if c == "eg":
        return g.replace(edges=())
    if c == "cg":
        iu, ju = np.triu_indices(n, 1)
        return g.replace(edges=tuple(zip(iu.tolist(), ju.tolist())))
    if c == "rg":
        p = k.p
        if p is None:
            p = 2.0 * g.num_edges / (n * (n - 1)) if n > 1 else 0.0
        iu, ju = np.triu_indices(n, 1)
        keep = np.random.default_rng(seed).random(iu.size) < p
        return g.replace(edges=tuple(zip(iu[keep].tolist(), ju[keep].tolist())))
    # sg
    return g.replace(edges=relabel_edges(g.edges, shuffle_permutation(n, seed)))


def perturb_dataset(d: GraphDataset, kind, master_seed: int = 0, n_jobs: int | None = None) -> GraphDataset:
    """Perturb every graph, seeding each from ``(master_seed, name, graph_id)``."""
    k = PerturbationKind.parse(kind)
    if k.code == "o":
        return d

    def one(g):
        return perturb_graph(g, k, graph_seed(master_seed, d.name, g.graph_id))

    return GraphDataset(name=d.name, graphs=tuple(map_ordered(one, d.graphs, n_jobs)), task=d.task)


class ModePerturbation(TransformerMixin, BaseEstimator):
    """Transformer that applies a perturbation to a collection of graphs.

    Parameters:
        kind: Perturbation code, e.g. ``"rg"`` or ``"rf:16"``.
        seed: Master seed combined with the dataset name and graph ids.
        dataset_name: Name mixed into per-graph seeds when the input is a
            plain list (a ``GraphDataset`` supplies its own name).
        n_jobs: Worker threads; ``None`` defers to ``RINGS_THREADS``.

    Example:
        >>> from rings.ingest import gen_ring_of_cliques
        >>> g = gen_ring_of_cliques(4, 3, 2, seed=0)
        >>> ModePerturbation(kind="cg").fit_transform([g])[0].num_edges
        66
    """

    def __init__(self, kind="o", seed=0, dataset_name="", n_jobs=None):
        self.kind = kind
        self.seed = seed
        self.dataset_name = dataset_name
        self.n_jobs = n_jobs

    def fit(self, X, y=None):
        check_graphs(X)
        self.kind_ = PerturbationKind.parse(self.kind)
        return self

    def transform(self, X):
        kind = PerturbationKind.parse(self.kind)
        if isinstance(X, GraphDataset):
            return perturb_dataset(X, kind, self.seed, self.n_jobs)
        graphs = check_graphs(X)
        ds = GraphDataset(name=self.dataset_name, graphs=tuple(graphs))
        return list(perturb_dataset(ds, kind, self.seed, self.n_jobs).graphs)
