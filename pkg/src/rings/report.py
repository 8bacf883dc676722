"""Symbol binning, dataset taxonomy, correlation analysis and report files."""

from __future__ import annotations

import csv
import io
import json
import math
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping, Sequence

import numpy as np
from scipy.stats import kendalltau, rankdata

from .separability import SYMBOLS

MU_EDGES = (0.2, 0.4, 0.6, 0.8)
SIGMA_EDGES = (0.05, 0.1, 0.15, 0.2)
CORRELATION_EDGES = (-0.6, -0.2, 0.2, 0.6)
HIGH_SYMBOLS = frozenset({"∘", "+", "++"})
ACTIONS = ("Keep", "Realign", "Deprecate-structural", "Deprecate-full")

# Published diversity tables render the fourth bin as "++" as well; "strict"
# gives every bin its own symbol.
LADDERS = {
    "published": ("--", "-", "∘", "++", "++"),
    "strict": SYMBOLS,
}


def bin_index(x: float, edges: Sequence[float]) -> int:
    """Index of the left-closed bin containing ``x``; the last bin is closed."""
    return int(np.searchsorted(np.asarray(edges), x, side="right"))


def diversity_bins(mu: float, sigma: float, ladder: str = "published") -> tuple[str, str]:
    """Symbols for a diversity mean and standard deviation.

    Means fall in the bins ``[0, .2), [.2, .4), [.4, .6), [.6, .8), [.8, 1]``;
    standard deviations in ``[0, .05), [.05, .1), [.1, .15), [.15, .2), [.2, 1]``.
    """
    if ladder not in LADDERS:
        raise ValueError(f"ladder must be one of {tuple(LADDERS)}, got {ladder!r}")
    mu, sigma = float(mu), float(sigma)
    if not (0.0 <= mu <= 1.0):
        raise ValueError(f"mean diversity must lie in [0, 1], got {mu}")
    if not (sigma >= 0.0 and math.isfinite(sigma)):
        raise ValueError(f"standard deviation must be finite and >= 0, got {sigma}")
    symbols = LADDERS[ladder]
    return symbols[bin_index(mu, MU_EDGES)], symbols[bin_index(sigma, SIGMA_EDGES)]


@dataclass(frozen=True)
class DiversitySummary:
    dataset: str
    structure_mean: float
    structure_sd: float
    features_mean: float
    features_sd: float
    symbols: dict

    @classmethod
    def from_values(cls, dataset: str, delta_s, delta_f, ladder: str = "published") -> "DiversitySummary":
        ds = np.asarray(delta_s, dtype=float)
        df = np.asarray(delta_f, dtype=float)
        sd = lambda v: float(v.std(ddof=1)) if v.size > 1 else 0.0
        s_mu, s_sd, f_mu, f_sd = float(ds.mean()), sd(ds), float(df.mean()), sd(df)
        s_sym = diversity_bins(s_mu, s_sd, ladder)
        f_sym = diversity_bins(f_mu, f_sd, ladder)
        return cls(dataset, s_mu, s_sd, f_mu, f_sd, {
            "structure_mean": s_sym[0], "structure_sd": s_sym[1],
            "features_mean": f_sym[0], "features_sd": f_sym[1],
        })

    def to_dict(self) -> dict:
        return {
            "structure": {"mean": self.structure_mean, "sd": self.structure_sd},
            "features": {"mean": self.features_mean, "sd": self.features_sd},
            "symbols": dict(self.symbols),
        }


@dataclass(frozen=True)
class TaxonomyVerdict:
    dataset: str | None
    action: str
    separability_high: bool
    diversity_high: bool

    def to_dict(self) -> dict:
        return {"action": self.action, "separability_high": self.separability_high,
                "structural_diversity_high": self.diversity_high}


def _check_symbol(s: str, what: str) -> str:
    if s not in SYMBOLS:
        raise ValueError(f"{what} symbol must be one of {SYMBOLS}, got {s!r}")
    return s


def taxonomy_classify(evaluation: str, structural_diversity: str, dataset: str | None = None) -> TaxonomyVerdict:
    """Keep, Realign or Deprecate from two symbols.

    A symbol counts as high when it is ``∘``, ``+`` or ``++``.
    """
    sep = _check_symbol(evaluation, "evaluation") in HIGH_SYMBOLS
    div = _check_symbol(structural_diversity, "diversity") in HIGH_SYMBOLS
    if sep and div:
        action = "Keep"
    elif div:
        action = "Realign"
    elif sep:
        action = "Deprecate-structural"
    else:
        action = "Deprecate-full"
    return TaxonomyVerdict(dataset, action, sep, div)


# ------------------------------------------------------------ correlations

def correlation_symbol(r: float | None) -> str | None:
    if r is None:
        return None
    return SYMBOLS[bin_index(r, CORRELATION_EDGES)]


def overall_correlation_symbol(symbols: Sequence[str]) -> str:
    """Summary symbol for several correlation symbols.

    Symbols are scored 0..4, averaged, rescaled to ``[-1, 1]`` and binned
    again with the correlation edges.
    """
    levels = [SYMBOLS.index(s) for s in symbols]
    return SYMBOLS[bin_index(np.mean(levels) / 2.0 - 1.0, CORRELATION_EDGES)]


def _pearson(x: np.ndarray, y: np.ndarray) -> float | None:
    dx = x - x.mean()
    dy = y - y.mean()
    denom = math.sqrt(float(dx @ dx) * float(dy @ dy))
    if denom == 0.0:
        return None
    return float(np.clip((dx @ dy) / denom, -1.0, 1.0))


@dataclass(frozen=True)
class CorrelationResult:
    n: int
    pearson: float | None
    spearman: float | None
    kendall: float | None
    symbols: dict
    flags: tuple = ()

    def to_dict(self) -> dict:
        return {"n": self.n, "pearson": self.pearson, "spearman": self.spearman,
                "kendall": self.kendall, "symbols": dict(self.symbols), "flags": list(self.flags)}


def correlations(x, y) -> CorrelationResult:
    """Pearson, Spearman (Pearson on midranks) and Kendall tau-b with symbols."""
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    if x.size != y.size:
        raise ValueError(f"length mismatch: {x.size} vs {y.size}")
    if x.size < 3:
        raise ValueError(f"need at least 3 pairs, got {x.size}")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise ValueError("correlation inputs must be finite")
    flags = []
    pr = _pearson(x, y)
    sr = _pearson(rankdata(x), rankdata(y))
    kt = None
    if pr is None:
        flags.append("zero variance: correlations undefined")
    else:
        kt = float(kendalltau(x, y).statistic)
        if not math.isfinite(kt):
            kt = None
    return CorrelationResult(int(x.size), pr, sr, kt, {
        "pearson": correlation_symbol(pr),
        "spearman": correlation_symbol(sr),
        "kendall": correlation_symbol(kt),
    }, tuple(flags))


def complementarity_performance_points(summary: Mapping, performance: Mapping[str, float],
                                       kinds: Sequence[str] | None = None) -> list[tuple[str, Any, float, float]]:
    """Pair mean complementarity per ``(kind, t)`` with mean performance per kind.

    Returns ``(kind, t, complementarity, performance)`` tuples sorted by kind
    and time.
    """
    pts = []
    for (kind, t), stats in summary.items():
        if kind in performance and (kinds is None or kind in kinds):
            mean = stats.mean if hasattr(stats, "mean") else stats["mean"]
            pts.append((kind, t, float(mean), float(performance[kind])))
    pts.sort(key=lambda p: (p[0], -1 if p[1] is None else p[1]))
    return pts


# ----------------------------------------------------------------- output

def _clean(obj):
    """Recursively convert to JSON-safe builtins; non-finite floats become null."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_clean(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        f = float(obj)
        return f if math.isfinite(f) else None
    return obj


def dumps_report(doc: Mapping) -> str:
    """Deterministic JSON: sorted keys, two-space indent, shortest float repr."""
    return json.dumps(_clean(doc), sort_keys=True, indent=2, ensure_ascii=False, allow_nan=False) + "\n"


REPORT_SECTIONS = ("stats", "complementarity", "diversity", "separability", "correlations", "taxonomy")


@dataclass
class DatasetReport:
    """Everything known about one dataset; absent sections stay ``None``."""

    dataset: str
    stats: dict | None = None
    complementarity: dict | None = None
    diversity: dict | None = None
    separability: dict | None = None
    correlations: dict | None = None
    taxonomy: dict | None = None
    plot_complementarity: list = field(default_factory=list)
    plot_performance: list = field(default_factory=list)

    def document(self) -> dict:
        doc = {"dataset": self.dataset}
        for s in REPORT_SECTIONS:
            doc[s] = getattr(self, s)
        return doc


def _atomic_write(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow(["" if v is None else (repr(v) if isinstance(v, float) else v) for v in row])
    return buf.getvalue()


def _safe_name(name: str) -> str:
    return "".join(c if c.isalnum() or c in "-_." else "_" for c in name)


def emit_report(reports: Sequence[DatasetReport], out_dir) -> list[Path]:
    """Write one JSON document per dataset plus flat CSV sidecars.

    Files: ``<dataset>.json``, ``stats.csv``, ``complementarity_summary.csv``,
    ``diversity.csv``, ``separability.csv``, ``correlations.csv``,
    ``taxonomy.csv``, ``plot_complementarity.csv`` and
    ``plot_complementarity_performance.csv``. Output is byte-stable for
    identical inputs.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    reports = sorted(reports, key=lambda r: r.dataset)
    for r in reports:
        p = out / f"{_safe_name(r.dataset)}.json"
        _atomic_write(p, dumps_report(r.document()))
        written.append(p)

    stats_rows, summ_rows, div_rows, sep_rows, cor_rows, tax_rows, plot_rows, perf_rows = ([] for _ in range(8))
    for r in reports:
        if r.stats:
            m, s = r.stats["mean"], r.stats["sd"]
            stats_rows.append([r.dataset, r.stats["N"], m["n"], s["n"], m["m_directed"], s["m_directed"],
                               m["mean_degree"], s["mean_degree"], m["density"], s["density"]])
        if r.complementarity:
            for row in r.complementarity.get("summary", []):
                summ_rows.append([r.dataset, row["kind"], row["t"], row["count"], row["mean"], row["sd"],
                                  row["p2.5"], row["p97.5"]])
        if r.diversity:
            d = r.diversity
            div_rows.append([r.dataset, d["structure"]["mean"], d["structure"]["sd"], d["features"]["mean"],
                             d["features"]["sd"], d["symbols"]["structure_mean"], d["symbols"]["structure_sd"],
                             d["symbols"]["features_mean"], d["symbols"]["features_sd"]])
        if r.separability:
            info = r.separability.get("informativeness") or {}
            for metric, res in sorted(r.separability.get("metrics", {}).items()):
                sep_rows.append([r.dataset, metric, res["condensed"], info.get("structure"),
                                 info.get("features"), r.separability.get("evaluation")])
        if r.correlations:
            for metric, c in sorted(r.correlations.get("metrics", {}).items()):
                cor_rows.append([r.dataset, metric, c["n"], c["pearson"], c["spearman"], c["kendall"],
                                 c["symbols"]["pearson"], c["symbols"]["spearman"], c["symbols"]["kendall"]])
        if r.taxonomy:
            tax_rows.append([r.dataset, r.taxonomy["evaluation"], r.taxonomy["structural_diversity"],
                             r.taxonomy["action"]])
        plot_rows.extend([r.dataset, *row] for row in r.plot_complementarity)
        perf_rows.extend([r.dataset, *row] for row in r.plot_performance)

    sidecars = {
        "stats.csv": (("dataset", "N", "n_mean", "n_sd", "m_mean", "m_sd", "degree_mean", "degree_sd",
                       "density_mean", "density_sd"), stats_rows),
        "complementarity_summary.csv": (("dataset", "kind", "t", "count", "mean", "sd", "p2.5", "p97.5"),
                                        summ_rows),
        "diversity.csv": (("dataset", "structure_mean", "structure_sd", "features_mean", "features_sd",
                           "structure_mean_symbol", "structure_sd_symbol", "features_mean_symbol",
                           "features_sd_symbol"), div_rows),
        "separability.csv": (("dataset", "metric", "order", "structure", "features", "evaluation"), sep_rows),
        "correlations.csv": (("dataset", "metric", "n", "pearson", "spearman", "kendall", "pearson_symbol",
                              "spearman_symbol", "kendall_symbol"), cor_rows),
        "taxonomy.csv": (("dataset", "evaluation", "structural_diversity", "action"), tax_rows),
        "plot_complementarity.csv": (("dataset", "kind", "t", "mean", "p2.5", "p97.5"), plot_rows),
        "plot_complementarity_performance.csv": (("dataset", "kind", "t", "metric", "complementarity",
                                                  "performance"), perf_rows),
    }
    for name, (header, rows) in sidecars.items():
        p = out / name
        _atomic_write(p, _csv_text(header, rows))
        written.append(p)
    return written
