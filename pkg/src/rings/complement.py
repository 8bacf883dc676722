"""Metric-space comparison, mode complementarity and mode diversity."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components
from sklearn.base import BaseEstimator, TransformerMixin

from ._parallel import map_ordered
from ._seeding import stable_seed
from ._validation import check_choice, check_graphs, check_norm_orders
from .core import AttributedGraph, GraphDataset
from .lift import (CONVENTIONS, FEATURE_METRICS, STRUCTURAL_METRICS, TIME_METRICS, check_t,
                   feature_distance, normalize_diameter, structural_lifts)
from .perturb import PerturbationKind, graph_seed, perturb_graph

DEFAULT_SEEDS = (0, 2, 4, 8, 16)
DIVERSITY_MODES = ("features", "graph")


def lpq_norm(D, p: float = 1, q: float = 1) -> float:
    """Normalized ``L_{p,q}`` norm of an ``n x n`` matrix.

    Row ``i`` contributes the mean of ``|D_ij|^p`` over the ``n - 1``
    off-diagonal positions; the rows are then combined by a ``q``-power mean.
    For ``p == q`` this is ``(sum |D_ij|^p / (n (n - 1)))^(1/p)``, and for any
    ``(p, q)`` the discrete matrix ``1 - I`` has norm exactly 1.
    """
    p, q = check_norm_orders(p, q)
    D = np.abs(np.asarray(D, dtype=float))
    if D.ndim != 2 or D.shape[0] != D.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {D.shape}")
    n = D.shape[0]
    if n < 2:
        raise ValueError("lpq_norm needs n >= 2")
    rows = (D if p == 1 else D ** p).sum(axis=1) / (n - 1)
    if p == q:
        total = rows.mean()
        return float(total if p == 1 else total ** (1.0 / p))
    return float(np.mean(rows ** (q / p)) ** (1.0 / q))


def compare_spaces(D1, D2, p: float = 1, q: float = 1) -> float:
    """Distance between two diameter-normalized metric spaces on the same points."""
    D1 = np.asarray(D1, dtype=float)
    D2 = np.asarray(D2, dtype=float)
    if D1.shape != D2.shape:
        raise ValueError(f"size mismatch: {D1.shape} vs {D2.shape}")
    return lpq_norm(D1 - D2, p, q)


@dataclass(frozen=True)
class ComplementarityConfig:
    """Settings for complementarity and diversity.

    Attributes:
        structural_metric: One of ``diffusion``, ``heat_kernel``,
            ``resistance``, ``shortest_path``.
        feature_metric: ``euclidean`` or ``cosine``.
        p, q: Norm orders, both at least 1.
        t_values: Diffusion or heat times. Ignored by time-free metrics.
        convention: Eigenvalue weighting for diffusion distances.
        random_seeds: Seeds averaged over for random perturbations.
    """

    structural_metric: str = "diffusion"
    feature_metric: str = "euclidean"
    p: float = 1.0
    q: float = 1.0
    t_values: tuple = (1,)
    convention: str = "laplacian-literal"
    random_seeds: tuple = DEFAULT_SEEDS

    def __post_init__(self):
        check_choice(self.structural_metric, STRUCTURAL_METRICS, "structural metric")
        check_choice(self.feature_metric, FEATURE_METRICS, "feature metric")
        check_choice(self.convention, CONVENTIONS, "diffusion convention")
        p, q = check_norm_orders(self.p, self.q)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)
        ts = tuple(self.t_values)
        if not ts:
            raise ValueError("t_values must not be empty")
        for t in ts:
            check_t(self.structural_metric, t)
        if self.structural_metric == "diffusion":
            ts = tuple(int(t) for t in ts)
        object.__setattr__(self, "t_values", ts)
        object.__setattr__(self, "random_seeds", tuple(int(s) for s in self.random_seeds))

    @property
    def effective_t(self) -> tuple:
        """Times that label records; ``(None,)`` for time-free metrics."""
        return self.t_values if self.structural_metric in TIME_METRICS else (None,)

    def to_dict(self) -> dict:
        return {
            "structural_metric": self.structural_metric,
            "feature_metric": self.feature_metric,
            "p": self.p,
            "q": self.q,
            "t_values": list(self.t_values),
            "convention": self.convention,
            "random_seeds": list(self.random_seeds),
        }


def component_blocks(g: AttributedGraph) -> list[tuple[np.ndarray, bool]]:
    """Node blocks that complementarity is evaluated on.

    Every connected component with at least two nodes is one block. All
    isolated nodes together form one further block whose structure is the
    trivial space; a single isolated node on its own carries no pairwise
    information and is left out. Returns ``(nodes, trivial)`` pairs.
    """
    if g.n == 1:
        return []
    if not g.edges:
        return [(np.arange(g.n), True)]
    _, labels = connected_components(csr_matrix(g.adjacency()), directed=False)
    sizes = np.bincount(labels)
    blocks = []
    seen = set()
    for lab in labels:
        if lab in seen or sizes[lab] < 2:
            continue
        seen.add(lab)
        blocks.append((np.flatnonzero(labels == lab), False))
    isolated = np.flatnonzero(sizes[labels] == 1)
    if isolated.size >= 2:
        blocks.append((isolated, True))
    return blocks


def complementarity_profile(g: AttributedGraph, cfg: ComplementarityConfig | None = None) -> np.ndarray:
    """Mode complementarity of ``g`` at every time in ``cfg.effective_t``.

    Each block is lifted in both modes, the lifts are diameter-normalized and
    compared, and the block scores are averaged with weights proportional to
    block size. A one-node graph scores 0.
    """
    cfg = cfg or ComplementarityConfig()
    ts = cfg.effective_t
    out = np.zeros(len(ts))
    blocks = component_blocks(g)
    if not blocks:
        return out
    total = sum(len(nodes) for nodes, _ in blocks)
    A = g.adjacency()
    for nodes, trivial in blocks:
        w = len(nodes) / total
        F = normalize_diameter(feature_distance(g.features[nodes], cfg.feature_metric))
        if trivial:
            S_list = [np.zeros_like(F)] * len(ts)
        else:
            sub = A[np.ix_(nodes, nodes)]
            S_list = structural_lifts(sub, cfg.structural_metric,
                                      [t for t in ts if t is not None] or [1], cfg.convention)
        for i, S in enumerate(S_list):
            out[i] += w * compare_spaces(normalize_diameter(S), F, cfg.p, cfg.q)
    return np.clip(out, 0.0, 1.0)


def complementarity(g: AttributedGraph, cfg: ComplementarityConfig | None = None, t=None) -> float:
    """Mode complementarity at one time (default: the first of ``cfg.t_values``)."""
    cfg = cfg or ComplementarityConfig()
    if t is not None and cfg.structural_metric in TIME_METRICS:
        cfg = ComplementarityConfig(**{**cfg.to_dict(), "t_values": (t,)})
    return float(complementarity_profile(g, cfg)[0])


def perturbed_complementarity(g: AttributedGraph, kind, cfg: ComplementarityConfig | None = None,
                              seed: int = 0, t=None) -> float:
    return complementarity(perturb_graph(g, kind, seed), cfg, t)


def diversity_from_gamma(gamma):
    """``1 - |1 - 2 gamma|``: 1 at gamma = 1/2, 0 at either end."""
    return 1.0 - np.abs(1.0 - 2.0 * np.asarray(gamma, dtype=float))


def mode_diversity(g: AttributedGraph, mode: str, cfg: ComplementarityConfig | None = None, t=None) -> float:
    """Diversity of the mode that survives emptying ``mode``.

    ``mode="features"`` empties the features and so measures the structure;
    ``mode="graph"`` empties the edges and measures the features.
    """
    check_choice(mode, DIVERSITY_MODES, "mode")
    kind = "ef" if mode == "features" else "eg"
    return float(diversity_from_gamma(perturbed_complementarity(g, kind, cfg, t=t)))


# ------------------------------------------------------------ dataset level

@dataclass(frozen=True)
class ComplementarityRecord:
    dataset: str
    graph_id: Any
    kind: str
    t: Any
    seed: int | None
    value: float
    degenerate: bool = False


@dataclass(frozen=True)
class SummaryStats:
    """Mean, sample sd and linear-interpolation 2.5/97.5 percentiles."""

    count: int
    mean: float
    sd: float
    p2_5: float
    p97_5: float
    sd_defined: bool

    @classmethod
    def of(cls, values) -> "SummaryStats":
        v = np.asarray(values, dtype=float)
        if v.size == 0:
            raise ValueError("cannot summarize an empty sample")
        lo, hi = np.percentile(v, [2.5, 97.5])
        return cls(int(v.size), float(v.mean()), float(v.std(ddof=1)) if v.size > 1 else 0.0,
                   float(lo), float(hi), v.size > 1)

    def to_dict(self) -> dict:
        return {"count": self.count, "mean": self.mean, "sd": self.sd,
                "p2.5": self.p2_5, "p97.5": self.p97_5, "sd_defined": self.sd_defined}


@dataclass
class DatasetComplementarity:
    """All complementarity values for one dataset.

    Attributes:
        records: One record per graph, kind, time and seed.
        per_graph: ``(kind, t)`` to the per-graph values used for summaries
            (random kinds averaged over seeds unless seeds are pooled).
        summary: ``(kind, t)`` to :class:`SummaryStats`.
    """

    dataset: str
    config: ComplementarityConfig
    kinds: tuple
    records: list = field(default_factory=list)
    per_graph: dict = field(default_factory=dict)
    summary: dict = field(default_factory=dict)
    pool_seeds: bool = False


def _graph_values(g, kinds, cfg, dataset_name, master_seed):
    """Per kind: array of shape (len(seeds), len(t))."""
    res = {}
    for kind in kinds:
        seeds = cfg.random_seeds if kind.is_random else (None,)
        rows = []
        for s in seeds:
            gs = 0 if s is None else graph_seed(stable_seed(master_seed, s), dataset_name, g.graph_id)
            rows.append(complementarity_profile(perturb_graph(g, kind, gs), cfg))
        res[kind] = (seeds, np.vstack(rows))
    return res


def dataset_complementarity(d: GraphDataset, kinds: Sequence = ("o",), cfg: ComplementarityConfig | None = None,
                            n_jobs: int | None = None, pool_seeds: bool = False,
                            master_seed: int = 0) -> DatasetComplementarity:
    """Complementarity of every graph under every requested perturbation.

    Deterministic kinds are evaluated once per graph. Random kinds are
    evaluated once per seed in ``cfg.random_seeds`` and averaged per graph
    before summarizing, or pooled across seeds when ``pool_seeds`` is set.
    The random draws for graph ``g`` and seed ``s`` are seeded from
    ``(master_seed, s, dataset name, graph id)``.
    """
    cfg = cfg or ComplementarityConfig()
    if len(d) == 0:
        raise ValueError(f"dataset {d.name!r} is empty")
    kinds = tuple(PerturbationKind.parse(k) for k in kinds)
    if any(k.is_random for k in kinds) and not cfg.random_seeds:
        raise ValueError("random perturbations need at least one seed")
    if len({str(k) for k in kinds}) != len(kinds):
        raise ValueError("duplicate perturbation kinds")
    values = map_ordered(lambda g: _graph_values(g, kinds, cfg, d.name, master_seed), d.graphs, n_jobs)
    ts = cfg.effective_t
    out = DatasetComplementarity(dataset=d.name, config=cfg, kinds=tuple(str(k) for k in kinds),
                                 pool_seeds=pool_seeds)
    for kind in kinds:
        for ti, t in enumerate(ts):
            graph_vals = []
            for g, vals in zip(d.graphs, values):
                seeds, arr = vals[kind]
                for s, v in zip(seeds, arr[:, ti]):
                    out.records.append(ComplementarityRecord(d.name, g.graph_id, str(kind), t, s,
                                                             float(v), g.n == 1))
                if pool_seeds:
                    graph_vals.extend(arr[:, ti].tolist())
                else:
                    graph_vals.append(float(arr[:, ti].mean()))
            key = (str(kind), t)
            out.per_graph[key] = np.asarray(graph_vals)
            out.summary[key] = SummaryStats.of(graph_vals)
    return out


def duality_violations(result: DatasetComplementarity, tol: float = 1e-9) -> list[str]:
    """Pairs (eg, cg) and (ef, cf) whose values do not sum to 1 within ``tol``.

    Only meaningful for ``p = q = 1``.
    """
    by_key = {(r.graph_id, r.kind, r.t): r.value for r in result.records if r.seed is None}
    msgs = []
    for a, b in (("eg", "cg"), ("ef", "cf")):
        if a not in result.kinds or b not in result.kinds:
            continue
        for (gid, kind, t), va in by_key.items():
            if kind != a:
                continue
            vb = by_key[(gid, b, t)]
            gap = abs(vb - (1.0 - va))
            if gap > tol:
                msgs.append(f"{result.dataset} graph {gid!r} t={t}: |gamma_{b} - (1 - gamma_{a})| = {gap:.3e}")
    return msgs


RECORD_HEADER = ("dataset", "graph_id", "kind", "t", "seed", "value")


def _fmt(x) -> str:
    if x is None:
        return ""
    return repr(x) if isinstance(x, float) else str(x)


def write_complementarity_csv(records: Sequence[ComplementarityRecord], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(RECORD_HEADER)
        for r in records:
            w.writerow([r.dataset, _fmt(r.graph_id), r.kind, _fmt(r.t), _fmt(r.seed), repr(float(r.value))])


def read_complementarity_csv(path) -> list[ComplementarityRecord]:
    out = []
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if tuple(header or ()) != RECORD_HEADER:
            raise ValueError(f"{path}: expected header {','.join(RECORD_HEADER)}")
        for lineno, row in enumerate(reader, 2):
            if len(row) != len(RECORD_HEADER):
                raise ValueError(f"{path}:{lineno}: expected {len(RECORD_HEADER)} fields")
            ds, gid, kind, t, seed, value = row
            gid_v = int(gid) if gid.lstrip("-").isdigit() else gid
            t_v = None if t == "" else (int(t) if t.isdigit() else float(t))
            out.append(ComplementarityRecord(ds, gid_v, kind, t_v, None if seed == "" else int(seed), float(value)))
    return out


# ------------------------------------------------------------- estimators

class _GraphScoreBase(TransformerMixin, BaseEstimator):
    def _config(self, seeds=DEFAULT_SEEDS) -> ComplementarityConfig:
        return ComplementarityConfig(
            structural_metric=self.structural_metric,
            feature_metric=self.feature_metric,
            p=self.p, q=self.q,
            t_values=(self.t,),
            convention=self.convention,
            random_seeds=tuple(seeds),
        )

    def _gamma(self, X, kind, seeds=DEFAULT_SEEDS) -> np.ndarray:
        graphs = check_graphs(X)
        name = X.name if isinstance(X, GraphDataset) else self.dataset_name
        ds = GraphDataset(name=name, graphs=tuple(graphs))
        cfg = self._config(seeds)
        res = dataset_complementarity(ds, [kind], cfg, n_jobs=self.n_jobs)
        return res.per_graph[(str(PerturbationKind.parse(kind)), cfg.effective_t[0])]


class ModeComplementarity(_GraphScoreBase):
    """Per-graph mode complementarity as a transformer.

    ``transform`` maps a collection of graphs to an array of shape
    ``(n_graphs, 1)``. Random perturbations are averaged over ``seeds``.

    Example:
        >>> from rings.ingest import gen_ring_of_cliques
        >>> g = gen_ring_of_cliques(4, 3, 12, seed=0)
        >>> ModeComplementarity(kind="cg").fit_transform([g]).shape
        (1, 1)
    """

    def __init__(self, structural_metric="diffusion", feature_metric="euclidean", t=1,
                 convention="laplacian-literal", p=1.0, q=1.0, kind="o",
                 seeds=DEFAULT_SEEDS, dataset_name="", n_jobs=None):
        self.structural_metric = structural_metric
        self.feature_metric = feature_metric
        self.t = t
        self.convention = convention
        self.p = p
        self.q = q
        self.kind = kind
        self.seeds = seeds
        self.dataset_name = dataset_name
        self.n_jobs = n_jobs

    def fit(self, X, y=None):
        check_graphs(X)
        self.config_ = self._config(self.seeds)
        self.kind_ = PerturbationKind.parse(self.kind)
        return self

    def transform(self, X):
        return self._gamma(X, self.kind, self.seeds).reshape(-1, 1)


class ModeDiversity(_GraphScoreBase):
    """Per-graph mode diversity.

    ``mode="features"`` empties the features and so scores the structure;
    ``mode="graph"`` empties the edges and scores the features.
    """

    def __init__(self, mode="features", structural_metric="diffusion", feature_metric="euclidean", t=1,
                 convention="laplacian-literal", p=1.0, q=1.0, dataset_name="", n_jobs=None):
        self.mode = mode
        self.structural_metric = structural_metric
        self.feature_metric = feature_metric
        self.t = t
        self.convention = convention
        self.p = p
        self.q = q
        self.dataset_name = dataset_name
        self.n_jobs = n_jobs

    def _kind(self) -> str:
        check_choice(self.mode, DIVERSITY_MODES, "mode")
        return "ef" if self.mode == "features" else "eg"

    def fit(self, X, y=None):
        check_graphs(X)
        self.kind_ = PerturbationKind.parse(self._kind())
        self.config_ = self._config()
        return self

    def transform(self, X):
        return diversity_from_gamma(self._gamma(X, self._kind())).reshape(-1, 1)
