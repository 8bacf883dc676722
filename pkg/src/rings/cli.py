"""Command-line interface: ``rings <command> [options]``.

Every command accepts ``--config FILE`` (a JSON document) and flags that
override it. Exit status is 0 on success, 1 when an invariant check fails and
2 on bad input.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from ._parallel import resolve_threads
from .complement import (DEFAULT_SEEDS, ComplementarityConfig, dataset_complementarity, diversity_from_gamma,
                         duality_violations, write_complementarity_csv)
from .core import GraphDataset, dataset_stats
from .ingest import ParseError, gen_erdos_renyi, gen_ring_of_cliques, load_dataset, write_jsonl
from .perturb import KIND_CODES, PerturbationKind, perturb_dataset
from .pipeline import DEFAULT_KINDS, build_dataset_report
from .report import DiversitySummary, dumps_report, emit_report
from .separability import evaluate_separability, load_graph_outcomes, load_performance_records

log = logging.getLogger("rings")

EXIT_OK, EXIT_VIOLATION, EXIT_INPUT = 0, 1, 2
DEFAULT_TIMES = tuple(range(1, 11))


class InputError(Exception):
    """Bad command-line or configuration input (exit status 2)."""


@dataclass
class DatasetSpec:
    path: Path
    format: str | None = None
    name: str | None = None


@dataclass
class RunConfig:
    """Merged settings from the config file and the command line."""

    datasets: list = field(default_factory=list)
    kinds: list = field(default_factory=lambda: list(DEFAULT_KINDS))
    complementarity: dict = field(default_factory=lambda: {"t_values": list(DEFAULT_TIMES)})
    separability: dict = field(default_factory=dict)
    metrics: list = field(default_factory=lambda: ["accuracy", "auroc"])
    performance: Path | None = None
    outcomes: Path | None = None
    seed: int = 0
    threads: int | None = None
    output: Path | None = None
    pool_seeds: bool = False
    degree_onehot: bool = False
    ladder: str = "published"

    def comp_config(self) -> ComplementarityConfig:
        try:
            return ComplementarityConfig(**self.complementarity)
        except TypeError as exc:
            raise InputError(f"bad complementarity settings: {exc}") from None


_CONFIG_KEYS = {"datasets", "kinds", "complementarity", "separability", "metrics", "performance", "outcomes",
                "seed", "threads", "output", "pool_seeds", "degree_onehot", "ladder"}
_COMP_KEYS = {"structural_metric", "feature_metric", "p", "q", "t_values", "convention", "random_seeds"}
_SEP_KEYS = {"statistic", "n_perm", "alpha", "correction", "method", "n_boot", "level"}


def load_config(path) -> RunConfig:
    """Read a JSON run configuration. Relative paths resolve against its folder."""
    path = Path(path)
    if not path.is_file():
        raise InputError(f"config file not found: {path}")
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from None
    if not isinstance(raw, dict):
        raise InputError(f"{path}: top level must be an object")
    unknown = set(raw) - _CONFIG_KEYS
    if unknown:
        raise InputError(f"{path}: unknown keys {sorted(unknown)}")
    base = path.parent
    rel = lambda p: None if p is None else (Path(p) if Path(p).is_absolute() else base / p)
    cfg = RunConfig()
    for ds in raw.get("datasets", []):
        if isinstance(ds, str):
            ds = {"path": ds}
        if "path" not in ds:
            raise InputError(f"{path}: every dataset needs a 'path'")
        cfg.datasets.append(DatasetSpec(rel(ds["path"]), ds.get("format"), ds.get("name")))
    for key in ("kinds", "metrics", "seed", "threads", "pool_seeds", "degree_onehot", "ladder"):
        if key in raw:
            setattr(cfg, key, raw[key])
    for key, allowed in (("complementarity", _COMP_KEYS), ("separability", _SEP_KEYS)):
        section = raw.get(key, {})
        bad = set(section) - allowed
        if bad:
            raise InputError(f"{path}: unknown {key} keys {sorted(bad)}")
        getattr(cfg, key).update(section)
    cfg.performance = rel(raw.get("performance"))
    cfg.outcomes = rel(raw.get("outcomes"))
    cfg.output = rel(raw.get("output"))
    return cfg


def _parse_list(text: str, cast=str) -> list:
    return [cast(x.strip()) for x in text.split(",") if x.strip()]


def _parse_times(text: str) -> list:
    """``"1-10"`` or ``"1,5,10"`` or ``"0.5,2"``."""
    out = []
    for part in _parse_list(text):
        if "-" in part[1:]:
            lo, hi = part.split("-", 1)
            out.extend(range(int(lo), int(hi) + 1))
        else:
            v = float(part)
            out.append(int(v) if v.is_integer() else v)
    return out


def merge_args(args) -> RunConfig:
    cfg = load_config(args.config) if getattr(args, "config", None) else RunConfig()
    if getattr(args, "dataset", None):
        cfg.datasets = [DatasetSpec(Path(p), args.format, None) for p in args.dataset]
        if getattr(args, "name", None):
            if len(cfg.datasets) != 1:
                raise InputError("--name needs exactly one --dataset")
            cfg.datasets[0].name = args.name
    elif getattr(args, "format", None):
        for ds in cfg.datasets:
            ds.format = args.format
    if args.seed is not None:
        cfg.seed = args.seed
    if args.threads is not None:
        cfg.threads = args.threads
    if getattr(args, "output", None):
        cfg.output = Path(args.output)
    for flag in ("pool_seeds", "degree_onehot"):
        if getattr(args, flag, False):
            setattr(cfg, flag, True)
    if getattr(args, "kinds", None):
        cfg.kinds = _parse_list(args.kinds)
    comp = cfg.complementarity
    for flag, key, conv in (("metric", "structural_metric", str), ("feature_metric", "feature_metric", str),
                            ("p", "p", float), ("q", "q", float), ("convention", "convention", str)):
        val = getattr(args, flag, None)
        if val is not None:
            comp[key] = conv(val)
    if getattr(args, "t", None):
        comp["t_values"] = _parse_times(args.t)
    if getattr(args, "seeds", None):
        comp["random_seeds"] = _parse_list(args.seeds, int)
    sep = cfg.separability
    for key in ("statistic", "n_perm", "alpha", "correction", "method", "n_boot", "level"):
        val = getattr(args, key, None)
        if val is not None:
            sep[key] = val
    if getattr(args, "metrics", None):
        cfg.metrics = _parse_list(args.metrics)
    if getattr(args, "performance", None):
        cfg.performance = Path(args.performance)
    if getattr(args, "outcomes", None):
        cfg.outcomes = Path(args.outcomes)
    if getattr(args, "ladder", None):
        cfg.ladder = args.ladder
    for k in cfg.kinds:
        try:
            PerturbationKind.parse(k)
        except ValueError as exc:
            raise InputError(str(exc)) from None
    cfg.threads = resolve_threads(cfg.threads)
    return cfg


def _load_all(cfg: RunConfig) -> list[GraphDataset]:
    if not cfg.datasets:
        raise InputError("no datasets given (use --dataset or a config file)")
    out = []
    for spec in cfg.datasets:
        if not spec.path.exists():
            raise InputError(f"dataset path does not exist: {spec.path}")
        d, report = load_dataset(spec.path, spec.format, spec.name, degree_onehot=cfg.degree_onehot)
        for w in report.warnings:
            log.warning("%s: %s", d.name, w)
        if report.edges_dropped:
            log.warning("%s: dropped %d self-loop or duplicate edges", d.name, report.edges_dropped)
        out.append(d)
    return out


def _write_text(path: Path | None, text: str) -> None:
    if path is None or str(path) == "-":
        sys.stdout.write(text)
        return
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _out_dir(cfg: RunConfig) -> Path:
    if cfg.output is None:
        raise InputError("an output directory is required (--output)")
    cfg.output.mkdir(parents=True, exist_ok=True)
    return cfg.output


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow(["" if v is None else (repr(v) if isinstance(v, float) else v) for v in row])
    return buf.getvalue()


# ----------------------------------------------------------------- commands

def cmd_stats(cfg: RunConfig) -> int:
    rows = []
    for d in _load_all(cfg):
        s = dataset_stats(d)
        if not s.sd_defined:
            log.warning("%s: single graph, standard deviations reported as 0", d.name)
        rows.append([d.name, s.N] + [v for f in ("n", "m_directed", "mean_degree", "density")
                                     for v in (s.mean[f], s.sd[f])])
    _write_text(cfg.output, _csv(("dataset", "N", "n_mean", "n_sd", "m_mean", "m_sd", "degree_mean",
                                  "degree_sd", "density_mean", "density_sd"), rows))
    return EXIT_OK


def cmd_perturb(cfg: RunConfig) -> int:
    datasets = _load_all(cfg)
    if len(datasets) != 1 or len(cfg.kinds) != 1:
        raise InputError("perturb takes exactly one dataset and one --kinds value")
    if cfg.output is None:
        raise InputError("perturb needs --output FILE.jsonl")
    out = perturb_dataset(datasets[0], cfg.kinds[0], cfg.seed, n_jobs=cfg.threads)
    cfg.output.parent.mkdir(parents=True, exist_ok=True)
    write_jsonl(out, cfg.output)
    return EXIT_OK


def cmd_complement(cfg: RunConfig, check_duality: bool = False) -> int:
    comp_cfg = cfg.comp_config()
    if check_duality and not (comp_cfg.p == 1 and comp_cfg.q == 1):
        raise InputError("--check-duality requires p = q = 1")
    out = _out_dir(cfg)
    records, summary, problems = [], [], []
    for d in _load_all(cfg):
        res = dataset_complementarity(d, cfg.kinds, comp_cfg, n_jobs=cfg.threads, pool_seeds=cfg.pool_seeds,
                                      master_seed=cfg.seed)
        records.extend(res.records)
        for (kind, t), s in res.summary.items():
            summary.append([d.name, kind, t, s.count, s.mean, s.sd, s.p2_5, s.p97_5])
        if check_duality:
            problems.extend(duality_violations(res, 1e-9))
    write_complementarity_csv(records, out / "complementarity.csv")
    _write_text(out / "complementarity_summary.csv",
                _csv(("dataset", "kind", "t", "count", "mean", "sd", "p2.5", "p97.5"), summary))
    if problems:
        for msg in problems[:20]:
            log.error("duality violated: %s", msg)
        log.error("%d duality violations", len(problems))
        return EXIT_VIOLATION
    return EXIT_OK


def cmd_diversity(cfg: RunConfig) -> int:
    comp_cfg = cfg.comp_config()
    out = _out_dir(cfg)
    per_graph, summary = [], []
    t0 = comp_cfg.effective_t[0]
    for d in _load_all(cfg):
        res = dataset_complementarity(d, ["ef", "eg"], comp_cfg, n_jobs=cfg.threads, master_seed=cfg.seed)
        ds = diversity_from_gamma(res.per_graph[("ef", t0)])
        df = diversity_from_gamma(res.per_graph[("eg", t0)])
        per_graph.extend([d.name, g.graph_id, float(a), float(b)] for g, a, b in zip(d.graphs, ds, df))
        s = DiversitySummary.from_values(d.name, ds, df, cfg.ladder)
        summary.append([d.name, s.structure_mean, s.structure_sd, s.features_mean, s.features_sd,
                        s.symbols["structure_mean"], s.symbols["structure_sd"],
                        s.symbols["features_mean"], s.symbols["features_sd"]])
    _write_text(out / "diversity_graphs.csv", _csv(("dataset", "graph_id", "delta_s", "delta_f"), per_graph))
    _write_text(out / "diversity.csv", _csv(
        ("dataset", "structure_mean", "structure_sd", "features_mean", "features_sd", "structure_mean_symbol",
         "structure_sd_symbol", "features_mean_symbol", "features_sd_symbol"), summary))
    return EXIT_OK


def _performance(cfg: RunConfig, required: bool):
    if cfg.performance is None:
        if required:
            raise InputError("a performance CSV is required (--performance)")
        return None, None
    if not cfg.performance.is_file():
        raise InputError(f"performance CSV not found: {cfg.performance}")
    perf = load_performance_records(cfg.performance)
    outcomes = None
    if cfg.outcomes is not None:
        if not cfg.outcomes.is_file():
            raise InputError(f"outcome CSV not found: {cfg.outcomes}")
        outcomes = load_graph_outcomes(cfg.outcomes)
    return perf, outcomes


def cmd_separability(cfg: RunConfig) -> int:
    perf, outcomes = _performance(cfg, required=True)
    out = _out_dir(cfg)
    names = sorted({r.dataset for r in perf})
    if cfg.datasets:
        wanted = {spec.name or spec.path.name for spec in cfg.datasets}
        names = [n for n in names if n in wanted]
    doc, lines = {}, []
    for name in names:
        res = evaluate_separability(perf, name, cfg.metrics, seed=cfg.seed, n_jobs=cfg.threads,
                                    **cfg.separability)
        doc[name] = res.to_dict()
        for w in res.warnings:
            log.warning("%s: %s", name, w)
        for metric in cfg.metrics:
            if metric in res.results:
                lines.append(f"{name}\t{metric}\t{res.results[metric].condensed}")
        if res.informativeness is not None:
            info = res.informativeness.rendered()
            lines.append(f"{name}\tverdict\t{info['structure']}\t{info['features']}\t{res.symbol}")
    _write_text(out / "separability.json", dumps_report(doc))
    _write_text(out / "condensed.txt", "\n".join(lines) + ("\n" if lines else ""))
    return EXIT_OK


def cmd_report(cfg: RunConfig) -> int:
    perf, outcomes = _performance(cfg, required=False)
    out = _out_dir(cfg)
    comp_cfg = cfg.comp_config()
    reports = []
    for d in _load_all(cfg):
        reports.append(build_dataset_report(
            d, comp_cfg, cfg.kinds, performance=perf, outcomes=outcomes, metrics=cfg.metrics,
            separability_options=cfg.separability, ladder=cfg.ladder, pool_seeds=cfg.pool_seeds,
            seed=cfg.seed, n_jobs=cfg.threads))
    emit_report(reports, out)
    return EXIT_OK


def cmd_gen(args) -> int:
    if args.output is None:
        raise InputError("gen needs --output FILE.jsonl")
    seed = 0 if args.seed is None else args.seed
    if args.family == "ring":
        graphs = [gen_ring_of_cliques(args.num_cliques, args.clique_size, args.feature_dim, seed + i, graph_id=i)
                  for i in range(args.count)]
    else:
        rng = np.random.default_rng(seed)
        graphs = []
        for i in range(args.count):
            n = int(rng.integers(args.n_min, args.n_max + 1))
            p = float(rng.uniform(args.p_min, args.p_max))
            graphs.append(gen_erdos_renyi(n, p, args.feature_dim, int(rng.integers(2 ** 32)), graph_id=i))
    out = Path(args.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    write_jsonl(GraphDataset(name=out.stem, graphs=tuple(graphs)), out)
    return EXIT_OK


# ------------------------------------------------------------------ parser

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rings", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"rings {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, output_help="output path"):
        p.add_argument("--config", help="JSON run configuration")
        p.add_argument("--seed", type=int, default=None, help="master seed (default 0)")
        p.add_argument("--threads", type=int, default=None,
                       help="worker threads (default: $RINGS_THREADS or all cores)")
        p.add_argument("-o", "--output", help=output_help)
        p.add_argument("-v", "--verbose", action="store_true")

    def data(p):
        p.add_argument("--dataset", action="append", help="TU directory or JSONL file (repeatable)")
        p.add_argument("--format", choices=("tu", "jsonl"), help="dataset format (guessed from path)")
        p.add_argument("--name", help="dataset name (single dataset only)")
        p.add_argument("--degree-onehot", action="store_true",
                       help="one-hot degree features for TU data without node features")

    def comp(p):
        p.add_argument("--kinds", help=f"comma-separated perturbations from {','.join(KIND_CODES)}")
        p.add_argument("--metric", choices=("diffusion", "heat_kernel", "resistance", "shortest_path"))
        p.add_argument("--feature-metric", choices=("euclidean", "cosine"))
        p.add_argument("--t", help="times, e.g. 1,5,10 (default 1-10)")
        p.add_argument("--convention", choices=("laplacian-literal", "diffusion-operator"))
        p.add_argument("--p", type=float)
        p.add_argument("--q", type=float)
        p.add_argument("--seeds", help=f"seeds for random perturbations (default {','.join(map(str, DEFAULT_SEEDS))})")
        p.add_argument("--pool-seeds", action="store_true", help="pool random seeds instead of averaging per graph")

    def sep(p):
        p.add_argument("--performance", help="performance CSV")
        p.add_argument("--outcomes", help="per-graph outcome CSV")
        p.add_argument("--metrics", help="metrics to test (default accuracy,auroc)")
        p.add_argument("--statistic", choices=("ks", "wilcoxon"))
        p.add_argument("--n-perm", dest="n_perm", type=int)
        p.add_argument("--alpha", type=float)
        p.add_argument("--correction", choices=("bonferroni", "none"))
        p.add_argument("--method", choices=("permutation", "bootstrap"))
        p.add_argument("--n-boot", dest="n_boot", type=int)
        p.add_argument("--level", type=float)

    p = sub.add_parser("stats", help="per-dataset size and density statistics (CSV)")
    common(p, "CSV file (default stdout)")
    data(p)

    p = sub.add_parser("perturb", help="write a perturbed copy of a dataset as JSONL")
    common(p, "JSONL file")
    data(p)
    p.add_argument("--kind", dest="kinds", required=True, help="perturbation code, e.g. rg or rf:16")

    p = sub.add_parser("complement", help="mode complementarity per graph, kind and time")
    common(p, "output directory")
    data(p)
    comp(p)
    p.add_argument("--check-duality", action="store_true", help="exit 1 if eg/cg or ef/cf duality fails")

    p = sub.add_parser("diversity", help="structural and feature diversity")
    common(p, "output directory")
    data(p)
    comp(p)
    p.add_argument("--ladder", choices=("published", "strict"))

    p = sub.add_parser("separability", help="pairwise performance separability")
    common(p, "output directory")
    data(p)
    sep(p)

    p = sub.add_parser("report", help="full per-dataset report with taxonomy")
    common(p, "output directory")
    data(p)
    comp(p)
    sep(p)
    p.add_argument("--ladder", choices=("published", "strict"))

    p = sub.add_parser("gen", help="synthetic datasets")
    p.add_argument("family", choices=("ring", "er"))
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("-o", "--output")
    p.add_argument("-v", "--verbose", action="store_true")
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--num-cliques", type=int, default=4)
    p.add_argument("--clique-size", type=int, default=3)
    p.add_argument("--feature-dim", type=int, default=12)
    p.add_argument("--n-min", type=int, default=2)
    p.add_argument("--n-max", type=int, default=30)
    p.add_argument("--p-min", type=float, default=0.1)
    p.add_argument("--p-max", type=float, default=1.0)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="rings: %(levelname)s: %(message)s", stream=sys.stderr, force=True)
    try:
        if args.command == "gen":
            return cmd_gen(args)
        cfg = merge_args(args)
        if args.command == "stats":
            return cmd_stats(cfg)
        if args.command == "perturb":
            return cmd_perturb(cfg)
        if args.command == "complement":
            return cmd_complement(cfg, check_duality=args.check_duality)
        if args.command == "diversity":
            return cmd_diversity(cfg)
        if args.command == "separability":
            return cmd_separability(cfg)
        return cmd_report(cfg)
    except (InputError, ParseError, FileNotFoundError, ValueError) as exc:
        print(f"rings: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
