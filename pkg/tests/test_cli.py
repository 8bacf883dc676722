import csv
import json

import numpy as np
import pytest

from conftest import MUTAG_DIR
from published import SEPARABILITY_KS, TAXONOMY, table_records, taxonomy_graphs
from rings import cli
from rings.core import GraphDataset
from rings.ingest import write_jsonl
from rings.separability import write_performance_records


def run(*argv):
    return cli.main([str(a) for a in argv])


def _rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


@pytest.fixture(scope="module")
def small(tmp_path_factory):
    """A 12-graph slice of MUTAG as JSONL."""
    from rings.ingest import parse_tu_dataset
    d, _ = parse_tu_dataset(MUTAG_DIR, "MUTAG")
    path = tmp_path_factory.mktemp("small") / "mini.jsonl"
    write_jsonl(GraphDataset("mini", d.graphs[:12], d.task), path)
    return path


@pytest.fixture(scope="module")
def taxonomy_inputs(tmp_path_factory):
    root = tmp_path_factory.mktemp("tax")
    names = sorted(SEPARABILITY_KS)
    for i, name in enumerate(names):
        write_jsonl(GraphDataset(name, tuple(taxonomy_graphs(name, seed=i))), root / f"{name}.jsonl")
    write_performance_records(table_records(SEPARABILITY_KS), root / "perf.csv")
    config = {
        "datasets": [{"path": f"{n}.jsonl", "name": n} for n in names],
        "kinds": ["o", "eg", "cg", "rg", "ef", "cf", "rf"],
        "complementarity": {"t_values": [1, 2], "random_seeds": [0, 1]},
        "performance": "perf.csv",
        "separability": {"n_perm": 2000},
    }
    (root / "config.json").write_text(json.dumps(config))
    return root


# -------------------------------------------------------------------- stats

def test_stats_mutag(tmp_path):
    out = tmp_path / "stats.csv"
    assert run("stats", "--dataset", MUTAG_DIR, "-o", out) == 0
    rows = _rows(out)
    assert rows[0]["dataset"] == "MUTAG" and rows[0]["N"] == "188"
    assert float(rows[0]["n_mean"]) == pytest.approx(17.93, abs=0.01)


def test_stats_missing_path(capsys):
    assert run("stats", "--dataset", "/no/such/place") == 2
    assert "/no/such/place" in capsys.readouterr().err


def test_stats_two_datasets_from_config(tmp_path, small):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"datasets": [str(MUTAG_DIR), {"path": str(small), "name": "mini"}]}))
    out = tmp_path / "s.csv"
    assert run("stats", "--config", cfg, "-o", out) == 0
    assert [r["dataset"] for r in _rows(out)] == ["MUTAG", "mini"]


def test_stats_stdout(capsys, small):
    assert run("stats", "--dataset", small) == 0
    assert capsys.readouterr().out.startswith("dataset,N,n_mean")


@pytest.mark.parametrize("cfg_text", ["{bad json", '{"unknown": 1}', '{"complementarity": {"zz": 1}}', "[]"])
def test_bad_config(tmp_path, cfg_text):
    cfg = tmp_path / "c.json"
    cfg.write_text(cfg_text)
    assert run("stats", "--config", cfg) == 2


def test_bad_kind(small, tmp_path):
    assert run("complement", "--dataset", small, "--kinds", "o,zz", "-o", tmp_path) == 2


# --------------------------------------------------------- perturb and gen

def test_gen_and_perturb(tmp_path):
    assert run("gen", "ring", "--count", 2, "--num-cliques", 4, "--clique-size", 3, "-o", tmp_path / "r.jsonl") == 0
    lines = (tmp_path / "r.jsonl").read_text().splitlines()
    assert len(lines) == 2 and json.loads(lines[0])["n"] == 12
    assert run("gen", "er", "--count", 5, "--seed", 3, "-o", tmp_path / "e.jsonl") == 0
    assert run("perturb", "--dataset", tmp_path / "e.jsonl", "--kind", "cg", "-o", tmp_path / "p.jsonl") == 0
    for line in (tmp_path / "p.jsonl").read_text().splitlines():
        g = json.loads(line)
        assert len(g["edges"]) == g["n"] * (g["n"] - 1) // 2


# -------------------------------------------------------------- complement

def test_complement_counts_and_determinism(tmp_path, small):
    a, b = tmp_path / "a", tmp_path / "b"
    assert run("complement", "--dataset", small, "--seeds", "0,1,2", "-o", a) == 0
    assert run("complement", "--dataset", small, "--seeds", "0,1,2", "-o", b, "--threads", 3) == 0
    rows = _rows(a / "complementarity.csv")
    # five deterministic kinds once, four random kinds per seed, ten times each
    assert len(rows) == 12 * 10 * (5 + 4 * 3)
    assert (a / "complementarity.csv").read_bytes() == (b / "complementarity.csv").read_bytes()
    assert (a / "complementarity_summary.csv").read_bytes() == (b / "complementarity_summary.csv").read_bytes()


def test_complement_duality_check(tmp_path, small, monkeypatch):
    args = ("complement", "--dataset", small, "--kinds", "eg,cg,ef,cf", "--t", "1,5", "--check-duality", "-o", tmp_path)
    assert run(*args) == 0
    monkeypatch.setattr(cli, "duality_violations", lambda res, tol: ["forced"])
    assert run(*args) == 1
    assert run("complement", "--dataset", small, "--p", 2, "--check-duality", "-o", tmp_path) == 2


def test_complement_time_free_metric(tmp_path, small):
    assert run("complement", "--dataset", small, "--kinds", "o", "--metric", "resistance", "-o", tmp_path) == 0
    rows = _rows(tmp_path / "complementarity.csv")
    assert len(rows) == 12 and {r["t"] for r in rows} == {""}


def test_diversity_command(tmp_path):
    assert run("diversity", "--dataset", MUTAG_DIR, "--t", 1, "-o", tmp_path) == 0
    row = _rows(tmp_path / "diversity.csv")[0]
    assert float(row["structure_mean"]) == pytest.approx(0.51, abs=0.03)
    assert float(row["features_mean"]) == pytest.approx(0.76, abs=0.05)
    assert len(_rows(tmp_path / "diversity_graphs.csv")) == 188


# ------------------------------------------------------------ separability

def test_separability_nci1(tmp_path):
    write_performance_records(table_records({"NCI1": SEPARABILITY_KS["NCI1"]}), tmp_path / "perf.csv")
    assert run("separability", "--performance", tmp_path / "perf.csv", "-o", tmp_path / "out") == 0
    lines = (tmp_path / "out" / "condensed.txt").read_text().splitlines()
    assert lines == ["NCI1\taccuracy\to > cg > cf > rg > eg > rf", "NCI1\tauroc\to > cg > cf > rg > eg/rf",
                     "NCI1\tverdict\tinformative\tinformative\t++"]
    doc = json.loads((tmp_path / "out" / "separability.json").read_text())
    assert doc["NCI1"]["evaluation"] == "++"
    assert doc["NCI1"]["metrics"]["auroc"]["adjusted_alpha"] == pytest.approx(0.01 / 15)


def test_separability_variants(tmp_path):
    write_performance_records(table_records({"NCI1": SEPARABILITY_KS["NCI1"]}), tmp_path / "perf.csv")
    assert run("separability", "--performance", tmp_path / "perf.csv", "--statistic", "wilcoxon",
               "--alpha", 0.005, "-o", tmp_path / "out") == 0
    doc = json.loads((tmp_path / "out" / "separability.json").read_text())
    assert doc["NCI1"]["metrics"]["accuracy"]["statistic"] == "wilcoxon"
    assert doc["NCI1"]["metrics"]["accuracy"]["alpha"] == 0.005


def test_separability_missing_csv(tmp_path):
    assert run("separability", "--performance", tmp_path / "nope.csv", "-o", tmp_path) == 2
    assert run("separability", "-o", tmp_path) == 2


# ------------------------------------------------------------------ report

def test_report_taxonomy_fixture(taxonomy_inputs, tmp_path):
    out = tmp_path / "rep"
    assert run("report", "--config", taxonomy_inputs / "config.json", "-o", out) == 0
    expected = {d: action for action, names in TAXONOMY.items() for d in names}
    rows = {r["dataset"]: r["action"] for r in _rows(out / "taxonomy.csv")}
    assert rows == expected
    doc = json.loads((out / "NCI1.json").read_text())
    assert set(doc) == {"dataset", "stats", "complementarity", "diversity", "separability", "correlations",
                        "taxonomy"}
    assert doc["taxonomy"]["action"] == "Keep"
    assert doc["complementarity"]["duality"]["violations"] == 0


def test_report_is_thread_independent(taxonomy_inputs, tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert run("report", "--config", taxonomy_inputs / "config.json", "--threads", 1, "-o", a) == 0
    assert run("report", "--config", taxonomy_inputs / "config.json", "--threads", 4, "-o", b) == 0
    files = sorted(p.name for p in a.iterdir())
    assert files == sorted(p.name for p in b.iterdir())
    for name in files:
        assert (a / name).read_bytes() == (b / name).read_bytes(), name


def test_report_without_performance(tmp_path, small, capsys):
    assert run("report", "--dataset", small, "--kinds", "o,eg,ef", "--t", 1, "-o", tmp_path) == 0
    doc = json.loads((tmp_path / "mini.json").read_text())
    assert doc["taxonomy"] is None and doc["separability"] is None
    assert doc["diversity"]["structure"]["mean"] is not None
    assert "taxonomy omitted" in capsys.readouterr().err


def test_threads_env(monkeypatch, small, tmp_path):
    monkeypatch.setenv("RINGS_THREADS", "2")
    assert run("complement", "--dataset", small, "--kinds", "o", "--t", 1, "-o", tmp_path) == 0
    monkeypatch.setenv("RINGS_THREADS", "zero")
    assert run("complement", "--dataset", small, "--kinds", "o", "--t", 1, "-o", tmp_path) == 2
