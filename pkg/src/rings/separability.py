"""Performance separability: comparing model-performance distributions across perturbations."""

from __future__ import annotations

import csv
import functools
import itertools
import math
import warnings
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, NamedTuple, Sequence

import numpy as np
from scipy.stats import rankdata
from sklearn.base import BaseEstimator

from ._parallel import map_ordered
from ._seeding import stable_seed
from ._validation import check_choice, check_positive_int, check_sample
from .perturb import KIND_CODES

STATISTICS = ("ks", "wilcoxon")
METHODS = ("permutation", "bootstrap")
CORRECTIONS = ("bonferroni", "none")
LOWER_IS_BETTER = frozenset({"loss", "mae", "mse", "rmse"})
EXHAUSTIVE_LIMIT = 20_000
STRUCTURE_PROBES = ("eg", "cg", "rg")
FEATURE_PROBES = ("cf", "rf")
INFORMATIVENESS = ("uninformative", "mixed", "informative")
SYMBOLS = ("--", "-", "∘", "+", "++")
_CHUNK = 4096


class DegenerateSampleWarning(UserWarning):
    """All pooled values are identical, so no permutation can be more extreme."""


# ----------------------------------------------------------------- records

@dataclass(frozen=True)
class PerformanceRecord:
    dataset: str
    kind: str
    arch: str
    hparams: str
    run: str
    metric: str
    value: float

    @property
    def model(self) -> tuple[str, str]:
        return (self.arch, self.hparams)


@dataclass(frozen=True)
class GraphOutcomeRecord:
    dataset: str
    kind: str
    arch: str
    run: str
    graph_id: str
    correct: bool


PERFORMANCE_HEADER = ("dataset", "kind", "arch", "hparams", "run", "metric", "value")
OUTCOME_HEADER = ("dataset", "kind", "arch", "run", "graph_id", "correct")
_TRUE = {"1", "true", "t", "yes", "y"}
_FALSE = {"0", "false", "f", "no", "n"}


def _read_csv(path, header):
    path = Path(path)
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        got = next(reader, None)
        if got is None or tuple(h.strip() for h in got) != header:
            raise ValueError(f"{path}:1: expected header {','.join(header)}")
        for lineno, row in enumerate(reader, 2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise ValueError(f"{path}:{lineno}: expected {len(header)} fields, got {len(row)}")
            yield lineno, [c.strip() for c in row]


def _check_kind(kind: str, path, lineno) -> str:
    if kind not in KIND_CODES:
        raise ValueError(f"{path}:{lineno}: unknown perturbation kind {kind!r}")
    return kind


def load_performance_records(path) -> list[PerformanceRecord]:
    """Read a performance CSV with header ``dataset,kind,arch,hparams,run,metric,value``."""
    out = []
    for lineno, (ds, kind, arch, hp, run, metric, value) in _read_csv(path, PERFORMANCE_HEADER):
        _check_kind(kind, path, lineno)
        try:
            v = float(value)
        except ValueError:
            raise ValueError(f"{path}:{lineno}: value {value!r} is not a number") from None
        if not math.isfinite(v):
            raise ValueError(f"{path}:{lineno}: value must be finite")
        out.append(PerformanceRecord(ds, kind, arch, hp, run, metric, v))
    return out


def write_performance_records(records: Iterable[PerformanceRecord], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(PERFORMANCE_HEADER)
        for r in records:
            w.writerow([r.dataset, r.kind, r.arch, r.hparams, r.run, r.metric, repr(float(r.value))])


def load_graph_outcomes(path) -> list[GraphOutcomeRecord]:
    """Read a per-graph outcome CSV with header ``dataset,kind,arch,run,graph_id,correct``."""
    out = []
    for lineno, (ds, kind, arch, run, gid, correct) in _read_csv(path, OUTCOME_HEADER):
        _check_kind(kind, path, lineno)
        c = correct.lower()
        if c not in _TRUE | _FALSE:
            raise ValueError(f"{path}:{lineno}: correct must be a boolean, got {correct!r}")
        out.append(GraphOutcomeRecord(ds, kind, arch, run, gid, c in _TRUE))
    return out


def write_graph_outcomes(records: Iterable[GraphOutcomeRecord], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(OUTCOME_HEADER)
        for r in records:
            w.writerow([r.dataset, r.kind, r.arch, r.run, r.graph_id, int(r.correct)])


# ---------------------------------------------------------- model selection

def higher_is_better(metric: str) -> bool:
    return metric.lower() not in LOWER_IS_BETTER


def select_best_model(records: Sequence[PerformanceRecord], dataset: str, kind: str, metric: str):
    """Best ``(arch, hparams)`` for one dataset and perturbation.

    Models are ranked by their mean ``metric`` (maximized, or minimized for
    loss-type metrics). Ties fall to higher mean accuracy, then lower mean
    loss, then the lexically smallest id.
    """
    stats = defaultdict(lambda: defaultdict(list))
    for r in records:
        if r.dataset == dataset and r.kind == kind:
            stats[r.model][r.metric].append(r.value)
    candidates = [m for m, by_metric in stats.items() if by_metric.get(metric)]
    if not candidates:
        raise ValueError(f"no {metric!r} records for dataset {dataset!r}, kind {kind!r}")
    sign = -1.0 if higher_is_better(metric) else 1.0

    def key(model):
        by = stats[model]
        acc = np.mean(by["accuracy"]) if by.get("accuracy") else -math.inf
        loss = np.mean(by["loss"]) if by.get("loss") else math.inf
        return (sign * float(np.mean(by[metric])), -float(acc), float(loss), model)

    return min(candidates, key=key)


def model_sample(records, dataset, kind, metric, model) -> np.ndarray:
    """Values of ``metric`` for one model, ordered by run id."""
    rows = sorted((r.run, r.value) for r in records
                  if r.dataset == dataset and r.kind == kind and r.metric == metric and r.model == model)
    return np.array([v for _, v in rows], dtype=float)


# --------------------------------------------------------------- statistics

def ks_statistic(a, b) -> float:
    """Two-sample Kolmogorov-Smirnov statistic with right-continuous ECDFs."""
    a = np.sort(check_sample(a, "a"))
    b = np.sort(check_sample(b, "b"))
    pts = np.union1d(a, b)
    Fa = np.searchsorted(a, pts, side="right") / a.size
    Fb = np.searchsorted(b, pts, side="right") / b.size
    return float(np.abs(Fa - Fb).max())


def wilcoxon_statistic(a, b) -> float:
    """Rank sum of ``a`` in the pooled sample, ties given midranks."""
    a = check_sample(a, "a")
    b = check_sample(b, "b")
    return float(rankdata(np.concatenate([a, b]))[: a.size].sum())


class _Prepared(NamedTuple):
    labels: np.ndarray     # observed assignment in pooled sorted order (True = a)
    ends: np.ndarray       # last index of each tie group in sorted order
    ranks2: np.ndarray     # twice the midranks, integer
    na: int
    nb: int


def _prepare(a: np.ndarray, b: np.ndarray) -> _Prepared:
    pooled = np.concatenate([a, b])
    order = np.argsort(pooled, kind="stable")
    vals = pooled[order]
    labels = order < a.size
    ends = np.append(np.flatnonzero(np.diff(vals) != 0), vals.size - 1)
    ranks2 = np.rint(2 * rankdata(vals)).astype(np.int64)
    return _Prepared(labels, ends, ranks2, a.size, b.size)


def _extremity(L: np.ndarray, prep: _Prepared, statistic: str) -> np.ndarray:
    """Integer-valued extremity for each assignment row of ``L``.

    KS: ``na * nb * D``. Wilcoxon: ``|2 W - na (N + 1)|``. Integer values make
    the ``>=`` comparison exact.
    """
    if statistic == "ks":
        ca = np.cumsum(L, axis=1, dtype=np.int64)[:, prep.ends]
        cb = (prep.ends + 1)[None, :] - ca
        return np.abs(ca * prep.nb - cb * prep.na).max(axis=1)
    N = prep.na + prep.nb
    return np.abs(L.astype(np.int64) @ prep.ranks2 - prep.na * (N + 1))


@functools.lru_cache(maxsize=32)
def _enumerate_assignments(N: int, na: int) -> np.ndarray:
    combos = np.fromiter(itertools.chain.from_iterable(itertools.combinations(range(N), na)),
                         dtype=np.intp).reshape(math.comb(N, na), na)
    L = np.zeros((combos.shape[0], N), dtype=bool)
    np.put_along_axis(L, combos, True, axis=1)
    L.flags.writeable = False
    return L


@dataclass(frozen=True)
class PermutationResult:
    p_value: float
    statistic: float
    exhaustive: bool
    n_resamples: int
    degenerate: bool


def permutation_test_result(a, b, statistic: str = "ks", n_perm: int = 10_000, seed: int = 0,
                            exhaustive: bool | None = None, n_jobs: int | None = None) -> PermutationResult:
    """Permutation test with full details; see :func:`permutation_test`."""
    check_choice(statistic, STATISTICS, "statistic")
    check_positive_int(n_perm, "n_perm")
    a = check_sample(a, "a")
    b = check_sample(b, "b")
    obs_stat = ks_statistic(a, b) if statistic == "ks" else wilcoxon_statistic(a, b)
    pooled = np.concatenate([a, b])
    if np.all(pooled == pooled[0]):
        warnings.warn("all pooled values are identical; p-value set to 1", DegenerateSampleWarning, stacklevel=3)
        return PermutationResult(1.0, obs_stat, False, 0, True)
    prep = _prepare(a, b)
    obs = _extremity(prep.labels[None, :], prep, statistic)[0]
    N = prep.na + prep.nb
    if exhaustive is None:
        exhaustive = math.comb(N, prep.na) <= EXHAUSTIVE_LIMIT
    if exhaustive:
        ext = _extremity(_enumerate_assignments(N, prep.na), prep, statistic)
        return PermutationResult(float(np.count_nonzero(ext >= obs)) / ext.size, obs_stat, True, ext.size, False)

    sizes = [min(_CHUNK, n_perm - start) for start in range(0, n_perm, _CHUNK)]

    def count(job):
        idx, size = job
        rng = np.random.default_rng([int(seed), idx])
        L = rng.permuted(np.broadcast_to(prep.labels, (size, N)), axis=1)
        return int(np.count_nonzero(_extremity(L, prep, statistic) >= obs))

    hits = sum(map_ordered(count, list(enumerate(sizes)), n_jobs))
    return PermutationResult((1 + hits) / (1 + n_perm), obs_stat, False, n_perm, False)


def permutation_test(a, b, statistic: str = "ks", n_perm: int = 10_000, seed: int = 0,
                     exhaustive: bool | None = None, n_jobs: int | None = None) -> float:
    """p-value of a two-sample permutation test.

    KS counts resamples with ``D >= D_obs``; Wilcoxon counts resamples whose
    rank sum deviates from its null mean at least as much as observed. With
    random resampling the p-value is ``(1 + hits) / (1 + n_perm)``. When
    ``exhaustive`` is true (the default whenever there are at most 20 000
    label assignments) every assignment is enumerated and the exact
    proportion is returned.

    Resamples are drawn in fixed-size chunks, each seeded from
    ``(seed, chunk index)``, so the result does not depend on ``n_jobs``.
    """
    return permutation_test_result(a, b, statistic, n_perm, seed, exhaustive, n_jobs).p_value


def bonferroni_adjust(alpha: float, m: int) -> float:
    if m < 1:
        raise ValueError(f"number of comparisons must be >= 1, got {m}")
    return alpha / m


def bootstrap_ci(sample, n_boot: int = 10_000, level: float = 0.99, seed: int = 0) -> tuple[float, float]:
    """Percentile bootstrap interval for the mean."""
    x = check_sample(sample, "sample")
    check_positive_int(n_boot, "n_boot")
    if not 0 < level < 1:
        raise ValueError(f"level must lie in (0, 1), got {level}")
    rng = np.random.default_rng(seed)
    means = np.empty(n_boot)
    step = max(1, 2_000_000 // x.size)
    for start in range(0, n_boot, step):
        stop = min(n_boot, start + step)
        means[start:stop] = x[rng.integers(0, x.size, size=(stop - start, x.size))].mean(axis=1)
    tail = (1 - level) / 2 * 100
    lo, hi = np.percentile(means, [tail, 100 - tail])
    lo, hi = float(lo), float(hi)
    # the mean of a constant sample is that constant; keep it exact
    if np.all(x == x[0]):
        lo = hi = float(x[0])
    return lo, hi


def intervals_overlap(ci_a, ci_b) -> bool:
    return ci_a[0] <= ci_b[1] and ci_b[0] <= ci_a[1]


# ------------------------------------------------------------ partial order

def _pair(a, b) -> tuple[str, str]:
    return (a, b) if a <= b else (b, a)


def _decision_lookup(decisions) -> dict:
    out = {}
    for key, val in decisions.items():
        a, b = tuple(key)
        out[_pair(a, b)] = bool(val)
    return out


def partial_order(means: Mapping[str, float], decisions, higher_is_better: bool = True):
    """Group modes into an ordered chain.

    Groups are the connected components of the not-separable relation,
    ordered best first by the mean of their members' means (ties broken by
    name). Returns ``(groups, warnings)``, each group a sorted list.

    Args:
        means: Mean performance per mode.
        decisions: Mapping from mode pairs (tuple or frozenset) to True when
            the pair is separable. Missing pairs count as not separable.
    """
    modes = sorted(means)
    dec = _decision_lookup(decisions)
    parent = {m: m for m in modes}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in itertools.combinations(modes, 2):
        if not dec.get(_pair(a, b), False):
            parent[find(a)] = find(b)
    comps = defaultdict(list)
    for m in modes:
        comps[find(m)].append(m)
    groups = [sorted(g) for g in comps.values()]
    sign = -1.0 if higher_is_better else 1.0
    groups.sort(key=lambda g: (sign * float(np.mean([means[m] for m in g])), g))

    notes = []
    for g in groups:
        for a, b in itertools.combinations(g, 2):
            if dec.get(_pair(a, b), False):
                notes.append(f"non-transitive: {a} and {b} are separable but share group {'/'.join(g)}")
    for i, gi in enumerate(groups):
        for gj in groups[i + 1:]:
            for a in gi:
                for b in gj:
                    worse = means[a] < means[b] if higher_is_better else means[a] > means[b]
                    if worse:
                        notes.append(f"order conflict: {a} ranks above {b} but has a worse mean")
    return groups, notes


def condensed(groups: Sequence[Sequence[str]]) -> str:
    """Render groups as ``"o > cg > eg/rf"``."""
    return " > ".join("/".join(sorted(g)) for g in groups)


def parse_condensed(text: str) -> list[list[str]]:
    """Inverse of :func:`condensed`."""
    groups = [sorted(p.strip() for p in part.split("/")) for part in text.split(">")]
    if any(not m for g in groups for m in g):
        raise ValueError(f"malformed condensed order {text!r}")
    return groups


# --------------------------------------------------- informativeness, score

def _as_groups(order) -> list[list[str]]:
    return parse_condensed(order) if isinstance(order, str) else [list(g) for g in order]


def _informative_in(groups, probes, label, notes) -> str:
    where = {m: i for i, g in enumerate(groups) for m in g}
    if "o" not in where:
        raise ValueError("the original mode 'o' is missing from the order")
    present = [m for m in probes if m in where]
    missing = [m for m in probes if m not in where]
    if missing:
        notes.append(f"{label}: {'/'.join(missing)} absent; judged on {'/'.join(present) or 'nothing'}")
    if not present:
        return "uninformative"
    return "informative" if all(where[m] > where["o"] for m in present) else "uninformative"


@dataclass(frozen=True)
class Informativeness:
    structure: str
    features: str
    warnings: tuple = ()

    def rendered(self) -> dict:
        return {"structure": render_informativeness(self.structure),
                "features": render_informativeness(self.features)}


def render_informativeness(value: str) -> str:
    return "(un)informative" if value == "mixed" else value


def mode_informativeness(order_accuracy, order_auroc=None, labels=("accuracy", "auroc")) -> Informativeness:
    """Whether destroying each mode separably hurts performance.

    The structure is informative under one metric when the original's group
    comes strictly before those of ``eg``, ``cg`` and ``rg``; the features
    when it comes before ``cf`` and ``rf``. Two metrics that disagree give
    ``"mixed"``. Orders are group lists or condensed strings; ``labels``
    name the two metrics in warnings.
    """
    orders = [_as_groups(order_accuracy)]
    if order_auroc is not None:
        orders.append(_as_groups(order_auroc))
    notes: list[str] = []
    verdicts = []
    for label, groups in zip(labels, orders):
        verdicts.append((_informative_in(groups, STRUCTURE_PROBES, f"{label} structure", notes),
                         _informative_in(groups, FEATURE_PROBES, f"{label} features", notes)))

    def combine(vals):
        return vals[0] if len(set(vals)) == 1 else "mixed"

    return Informativeness(combine([v[0] for v in verdicts]), combine([v[1] for v in verdicts]), tuple(notes))


def _level(value) -> int:
    if isinstance(value, (int, np.integer)) and 0 <= value <= 2:
        return int(value)
    if value == "(un)informative":
        value = "mixed"
    if value in INFORMATIVENESS:
        return INFORMATIVENESS.index(value)
    raise ValueError(f"informativeness must be one of {INFORMATIVENESS}, got {value!r}")


def evaluation_score(structure, features) -> tuple[float, str]:
    """``1.5 S + F`` on a 0..5 scale and its symbol."""
    score = 1.5 * _level(structure) + _level(features)
    for edge, sym in zip((1, 2, 3, 4), SYMBOLS):
        if score <= edge:
            return score, sym
    return score, SYMBOLS[-1]


# --------------------------------------------------------- pairwise tests

@dataclass
class SeparabilityResult:
    """Pairwise separability of the modes for one dataset and metric."""

    dataset: str
    metric: str
    modes: list
    best_models: dict
    sample_sizes: dict
    means: dict
    statistic: str
    method: str
    alpha: float
    adjusted_alpha: float
    p_values: dict = field(default_factory=dict)
    decisions: dict = field(default_factory=dict)
    intervals: dict = field(default_factory=dict)
    groups: list = field(default_factory=list)
    warnings: list = field(default_factory=list)

    @property
    def condensed(self) -> str:
        return condensed(self.groups)

    def decision_matrix(self) -> np.ndarray:
        k = len(self.modes)
        M = np.zeros((k, k), dtype=bool)
        for i, a in enumerate(self.modes):
            for j, b in enumerate(self.modes):
                if i != j:
                    M[i, j] = self.decisions[_pair(a, b)]
        return M

    def to_dict(self) -> dict:
        key = lambda pr: f"{pr[0]}|{pr[1]}"
        return {
            "metric": self.metric,
            "modes": list(self.modes),
            "best_models": {m: {"arch": a, "hparams": h} for m, (a, h) in self.best_models.items()},
            "sample_sizes": dict(self.sample_sizes),
            "means": dict(self.means),
            "statistic": self.statistic,
            "method": self.method,
            "alpha": self.alpha,
            "adjusted_alpha": self.adjusted_alpha,
            "p_values": {key(k): v for k, v in self.p_values.items()},
            "separable": {key(k): v for k, v in self.decisions.items()},
            "intervals": {m: list(ci) for m, ci in self.intervals.items()},
            "groups": [list(g) for g in self.groups],
            "condensed": self.condensed,
            "warnings": list(self.warnings),
        }


def _mode_order(modes) -> list[str]:
    return sorted(modes, key=lambda m: (KIND_CODES.index(m) if m in KIND_CODES else len(KIND_CODES), m))


def pairwise_separability(records: Sequence[PerformanceRecord], dataset: str, metric: str,
                          statistic: str = "ks", n_perm: int = 10_000, alpha: float = 0.01,
                          correction: str = "bonferroni", method: str = "permutation", seed: int = 0,
                          n_boot: int = 10_000, level: float = 0.99, modes: Sequence[str] | None = None,
                          n_jobs: int | None = None) -> SeparabilityResult:
    """Test every pair of modes for separable performance.

    For each mode the best model is chosen with :func:`select_best_model`
    and its runs form the sample. With ``method="permutation"`` a pair is
    separable when its p-value is below the corrected alpha; with
    ``method="bootstrap"`` when the percentile intervals of the means do not
    overlap.
    """
    check_choice(statistic, STATISTICS, "statistic")
    check_choice(method, METHODS, "method")
    check_choice(correction, CORRECTIONS, "correction")
    if not 0 < alpha < 1:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    present = {r.kind for r in records if r.dataset == dataset and r.metric == metric}
    modes = _mode_order(present if modes is None else [m for m in modes if m in present])
    if len(modes) < 2:
        raise ValueError(f"dataset {dataset!r}, metric {metric!r}: need >= 2 modes, found {modes}")

    best, samples = {}, {}
    for m in modes:
        best[m] = select_best_model(records, dataset, m, metric)
        samples[m] = model_sample(records, dataset, m, metric, best[m])
    pairs = list(itertools.combinations(modes, 2))
    m_tests = len(pairs)
    adj = bonferroni_adjust(alpha, m_tests) if correction == "bonferroni" else alpha
    res = SeparabilityResult(
        dataset=dataset, metric=metric, modes=modes, best_models=best,
        sample_sizes={m: int(samples[m].size) for m in modes},
        means={m: float(samples[m].mean()) for m in modes},
        statistic=statistic, method=method, alpha=alpha, adjusted_alpha=adj,
    )
    if method == "permutation":
        def run(pair):
            a, b = pair
            with warnings.catch_warnings(record=True) as caught:
                warnings.simplefilter("always")
                r = permutation_test_result(samples[a], samples[b], statistic, n_perm,
                                            stable_seed(seed, dataset, metric, a, b), n_jobs=1)
            return r, [str(w.message) for w in caught]

        for (a, b), (r, msgs) in zip(pairs, map_ordered(run, pairs, n_jobs)):
            res.p_values[_pair(a, b)] = r.p_value
            res.decisions[_pair(a, b)] = r.p_value < adj
            res.warnings.extend(f"{a} vs {b}: {msg}" for msg in msgs)
    else:
        for m in modes:
            res.intervals[m] = bootstrap_ci(samples[m], n_boot, level, stable_seed(seed, dataset, metric, m))
        for a, b in pairs:
            res.decisions[_pair(a, b)] = not intervals_overlap(res.intervals[a], res.intervals[b])
    res.groups, notes = partial_order(res.means, res.decisions, higher_is_better(metric))
    res.warnings.extend(notes)
    return res


@dataclass
class DatasetSeparability:
    """Per-metric results plus the informativeness verdict and evaluation symbol."""

    dataset: str
    results: dict
    informativeness: Informativeness | None
    score: float | None
    symbol: str | None
    warnings: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "metrics": {m: r.to_dict() for m, r in sorted(self.results.items())},
            "informativeness": None if self.informativeness is None else self.informativeness.rendered(),
            "evaluation_score": self.score,
            "evaluation": self.symbol,
            "warnings": list(self.warnings),
        }


def evaluate_separability(records: Sequence[PerformanceRecord], dataset: str,
                          metrics: Sequence[str] = ("accuracy", "auroc"), **test_kwargs) -> DatasetSeparability:
    """Run the pairwise tests for each metric and score informativeness."""
    results, notes = {}, []
    for metric in metrics:
        if not any(r.dataset == dataset and r.metric == metric for r in records):
            notes.append(f"no {metric} records for {dataset}")
            continue
        results[metric] = pairwise_separability(records, dataset, metric, **test_kwargs)
    info = score = symbol = None
    used = [m for m in metrics if m in results and "o" in results[m].modes][:2]
    if used:
        info = mode_informativeness(*[results[m].groups for m in used], labels=used)
        notes.extend(info.warnings)
        score, symbol = evaluation_score(info.structure, info.features)
    else:
        notes.append(f"{dataset}: informativeness needs results that include 'o'")
    return DatasetSeparability(dataset, results, info, score, symbol, notes)


class SetSimilarity(NamedTuple):
    jaccard: float
    asymmetric: float
    defined: bool


def graph_set_similarity(A, B) -> SetSimilarity:
    """Jaccard index and the share of ``B`` that lies in ``A``.

    Two empty sets have Jaccard 1. An empty ``B`` gives asymmetric overlap 1
    with ``defined`` set to False.
    """
    A, B = set(A), set(B)
    union = A | B
    jac = len(A & B) / len(union) if union else 1.0
    if not B:
        return SetSimilarity(jac, 1.0, False)
    return SetSimilarity(jac, len(A & B) / len(B), True)


def correct_sets(outcomes: Sequence[GraphOutcomeRecord], dataset: str, arch: str | None = None) -> dict:
    """Per kind, the graphs that a majority of runs classify correctly."""
    votes = defaultdict(lambda: defaultdict(list))
    for r in outcomes:
        if r.dataset == dataset and (arch is None or r.arch == arch):
            votes[r.kind][r.graph_id].append(r.correct)
    return {k: {g for g, v in per.items() if 2 * sum(v) > len(v)} for k, per in votes.items()}


def outcome_similarity(outcomes: Sequence[GraphOutcomeRecord], dataset: str, arch: str | None = None) -> dict:
    """Similarity of each perturbation's correct set to the original's."""
    sets = correct_sets(outcomes, dataset, arch)
    if "o" not in sets:
        return {}
    out = {}
    for kind in _mode_order(sets):
        if kind == "o":
            continue
        s = graph_set_similarity(sets["o"], sets[kind])
        out[kind] = {"jaccard": s.jaccard, "asymmetric": s.asymmetric, "defined": s.defined,
                     "n_correct": len(sets[kind])}
    return out


class PerformanceSeparability(BaseEstimator):
    """Estimator wrapper around :func:`evaluate_separability`.

    ``fit(records, dataset=...)`` stores ``result_`` (a
    :class:`DatasetSeparability`), ``condensed_`` (per metric) and
    ``evaluation_`` (the symbol).
    """

    def __init__(self, statistic="ks", n_perm=10_000, alpha=0.01, correction="bonferroni",
                 method="permutation", metrics=("accuracy", "auroc"), seed=0, n_boot=10_000,
                 level=0.99, n_jobs=None):
        self.statistic = statistic
        self.n_perm = n_perm
        self.alpha = alpha
        self.correction = correction
        self.method = method
        self.metrics = metrics
        self.seed = seed
        self.n_boot = n_boot
        self.level = level
        self.n_jobs = n_jobs

    def fit(self, records, y=None, dataset: str | None = None):
        records = list(records)
        if not records:
            raise ValueError("no performance records")
        if not all(isinstance(r, PerformanceRecord) for r in records):
            raise TypeError("records must be PerformanceRecord instances")
        names = sorted({r.dataset for r in records})
        if dataset is None:
            if len(names) != 1:
                raise ValueError(f"records span several datasets {names}; pass dataset=")
            dataset = names[0]
        self.result_ = evaluate_separability(
            records, dataset, tuple(self.metrics), statistic=self.statistic, n_perm=self.n_perm,
            alpha=self.alpha, correction=self.correction, method=self.method, seed=self.seed,
            n_boot=self.n_boot, level=self.level, n_jobs=self.n_jobs)
        self.condensed_ = {m: r.condensed for m, r in self.result_.results.items()}
        self.evaluation_ = self.result_.symbol
        return self
