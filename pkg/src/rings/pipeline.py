"""Assemble the per-dataset report from graphs and performance records."""

from __future__ import annotations

import logging
from typing import Sequence

from .complement import (ComplementarityConfig, dataset_complementarity, diversity_from_gamma,
                         duality_violations)
from .core import GraphDataset, dataset_stats
from .perturb import PerturbationKind
from .report import (DatasetReport, DiversitySummary, complementarity_performance_points, correlations,
                     overall_correlation_symbol, taxonomy_classify)
from .separability import evaluate_separability, outcome_similarity

log = logging.getLogger(__name__)

DEFAULT_KINDS = ("o", "eg", "cg", "rg", "sg", "ef", "cf", "rf", "sf")
DEFAULT_CORRELATION_KINDS = ("o", "eg", "cg", "rg", "cf", "rf")


def build_dataset_report(d: GraphDataset, cfg: ComplementarityConfig | None = None,
                         kinds: Sequence[str] = DEFAULT_KINDS, performance=None, outcomes=None,
                         metrics: Sequence[str] = ("accuracy", "auroc"), separability_options: dict | None = None,
                         ladder: str = "published", correlation_kinds: Sequence[str] = DEFAULT_CORRELATION_KINDS,
                         pool_seeds: bool = False, seed: int = 0, n_jobs: int | None = None) -> DatasetReport:
    """Run every stage that the inputs allow and collect the results.

    Diversity is read at the first time in ``cfg.t_values``. Separability,
    correlations and the taxonomy need performance records for ``d.name``;
    without them those sections are left empty and a warning is logged.
    """
    cfg = cfg or ComplementarityConfig()
    kinds = [str(PerturbationKind.parse(k)) for k in kinds]
    rep = DatasetReport(dataset=d.name, stats=dataset_stats(d).to_dict())

    comp = dataset_complementarity(d, kinds, cfg, n_jobs=n_jobs, pool_seeds=pool_seeds, master_seed=seed)
    t0 = cfg.effective_t[0]
    summary_rows = []
    for (kind, t), s in comp.summary.items():
        summary_rows.append({"kind": kind, "t": t, **s.to_dict()})
        rep.plot_complementarity.append([kind, t, s.mean, s.p2_5, s.p97_5])
    duality = None
    if cfg.p == 1 and cfg.q == 1:
        gaps = duality_violations(comp, tol=1e-9)
        duality = {"tolerance": 1e-9, "violations": len(gaps)}
    rep.complementarity = {
        "config": cfg.to_dict(),
        "kinds": kinds,
        "pool_seeds": pool_seeds,
        "summary": summary_rows,
        "duality": duality,
        "degenerate_graphs": sorted({repr(r.graph_id) for r in comp.records if r.degenerate}),
    }

    missing = [k for k in ("ef", "eg") if k not in kinds]
    per_graph = dict(comp.per_graph)
    if missing:
        extra = dataset_complementarity(d, missing, cfg, n_jobs=n_jobs)
        per_graph.update(extra.per_graph)
    div = DiversitySummary.from_values(d.name, diversity_from_gamma(per_graph[("ef", t0)]),
                                       diversity_from_gamma(per_graph[("eg", t0)]), ladder)
    rep.diversity = {**div.to_dict(), "t": t0, "ladder": ladder}

    records = [r for r in (performance or []) if r.dataset == d.name]
    if not records:
        log.warning("%s: no performance records; separability, correlations and taxonomy omitted", d.name)
        return rep
    sep = evaluate_separability(records, d.name, metrics, seed=seed, n_jobs=n_jobs,
                                **(separability_options or {}))
    rep.separability = sep.to_dict()
    if outcomes:
        rep.separability["graph_overlap"] = outcome_similarity(outcomes, d.name)

    cor_metrics, symbols = {}, []
    for metric, res in sorted(sep.results.items()):
        pts = complementarity_performance_points(comp.summary, res.means, correlation_kinds)
        rep.plot_performance.extend([k, t, metric, c, p] for k, t, c, p in pts)
        if len(pts) < 3:
            continue
        c = correlations([p[2] for p in pts], [p[3] for p in pts])
        cor_metrics[metric] = c.to_dict()
        symbols.extend(s for s in c.symbols.values() if s is not None)
    rep.correlations = {
        "kinds": [k for k in correlation_kinds],
        "metrics": cor_metrics,
        "overall": overall_correlation_symbol(symbols) if symbols else None,
    }

    if sep.symbol is None:
        log.warning("%s: no evaluation symbol; taxonomy omitted", d.name)
        return rep
    verdict = taxonomy_classify(sep.symbol, div.symbols["structure_mean"], d.name)
    rep.taxonomy = {**verdict.to_dict(), "evaluation": sep.symbol,
                    "structural_diversity": div.symbols["structure_mean"]}
    return rep

