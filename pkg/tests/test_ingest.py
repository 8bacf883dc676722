import json

import numpy as np
import pytest

from conftest import MUTAG_DIR
from rings.core import AttributedGraph, GraphDataset
from rings.ingest import (ParseError, gen_erdos_renyi, gen_ring_of_cliques, graph_to_json, load_dataset,
                          parse_jsonl, parse_tu_dataset, write_jsonl)
from rings.lift import is_connected


def _write_tu(tmp_path, name, files):
    d = tmp_path / name
    d.mkdir()
    for suffix, text in files.items():
        (d / f"{name}_{suffix}.txt").write_text(text)
    return d


def test_toy_tu_directory(tmp_path):
    d = _write_tu(tmp_path, "TOY", {"A": "1, 2\n2, 1\n", "graph_indicator": "1\n1\n"})
    ds, report = parse_tu_dataset(d, "TOY")
    assert ds.N == 1
    g = ds[0]
    assert g.n == 2 and g.edges == ((0, 1),)
    assert np.array_equal(g.features, np.ones((2, 1)))
    assert report.edges_dropped == 0


def test_tu_self_loop_dropped(tmp_path):
    d = _write_tu(tmp_path, "SL", {"A": "1, 2\n5, 5\n", "graph_indicator": "1\n1\n2\n2\n2\n"})
    ds, report = parse_tu_dataset(d, "SL")
    assert report.edges_dropped == 1
    assert ds[1].edges == ()
    assert [g.graph_id for g in ds] == [0, 1]


def test_tu_features_and_labels(tmp_path):
    d = _write_tu(tmp_path, "F", {
        "A": "1, 2\n",
        "graph_indicator": "1\n1\n",
        "node_attributes": "0.5, 1.0\n2.0, 3.0\n",
        "node_labels": "0\n2\n",
        "graph_labels": "-1\n",
    })
    g = parse_tu_dataset(d, "F")[0][0]
    assert np.array_equal(g.features, [[0.5, 1.0, 1, 0, 0], [2.0, 3.0, 0, 0, 1]])
    assert g.target == -1


def test_tu_degree_onehot(tmp_path):
    d = _write_tu(tmp_path, "DG", {"A": "1, 2\n2, 3\n", "graph_indicator": "1\n1\n1\n"})
    g = parse_tu_dataset(d, "DG", degree_onehot=True)[0][0]
    assert g.features.shape[0] == 3
    assert np.array_equal(g.features.argmax(axis=1), [1, 2, 1])


@pytest.mark.parametrize("files", [
    {"graph_indicator": "1\n"},
    {"A": "1, 3\n", "graph_indicator": "1\n1\n2\n"},
    {"A": "1, 9\n", "graph_indicator": "1\n1\n"},
    {"A": "1, 2\n", "graph_indicator": "1\n1\n", "node_attributes": "1.0\n1.0, 2.0\n"},
])
def test_tu_errors(tmp_path, files):
    d = _write_tu(tmp_path, "BAD", files)
    with pytest.raises((ParseError, FileNotFoundError)):
        parse_tu_dataset(d, "BAD")


def test_mutag_parse():
    ds, report = parse_tu_dataset(MUTAG_DIR, "MUTAG")
    assert ds.N == 188
    assert np.mean([g.n for g in ds]) == pytest.approx(17.93, abs=0.01)
    assert ds.task == "binary-class"
    assert all(g.features.shape[1] == 7 for g in ds)


def test_jsonl_single_line(tmp_path):
    p = tmp_path / "a.jsonl"
    p.write_text('{"id":0,"n":2,"edges":[[0,1]],"features":[[1.0],[2.0]]}\n')
    ds, _ = parse_jsonl(p)
    assert ds.N == 1 and ds[0].feature_dim == 1


def test_jsonl_bad_endpoint_names_line(tmp_path):
    p = tmp_path / "b.jsonl"
    p.write_text('{"id":0,"n":2,"edges":[],"features":[[1.0],[2.0]]}\n'
                 '{"id":1,"n":2,"edges":[[0,5]],"features":[[1.0],[2.0]]}\n')
    with pytest.raises(ParseError) as exc:
        parse_jsonl(p)
    assert exc.value.line == 2
    assert "2" in str(exc.value)


@pytest.mark.parametrize("line", ["{not json", '{"id":0,"n":2,"edges":[],"features":[[1.0]]}',
                                  '{"id":0,"edges":[],"features":[[1.0]]}'])
def test_jsonl_malformed(tmp_path, line):
    p = tmp_path / "c.jsonl"
    p.write_text(line + "\n")
    with pytest.raises(ParseError):
        parse_jsonl(p)


def test_jsonl_cleans_duplicates(tmp_path):
    p = tmp_path / "d.jsonl"
    p.write_text('{"id":0,"n":3,"edges":[[0,1],[1,0],[0,1],[2,2]],"features":[[1],[1],[1]]}\n')
    ds, report = parse_jsonl(p)
    assert ds[0].edges == ((0, 1),)
    assert report.edges_dropped == 2


def test_jsonl_round_trip(tmp_path):
    rng = np.random.default_rng(0)
    graphs = [gen_erdos_renyi(int(rng.integers(1, 9)), 0.5, 3, seed=i, graph_id=i) for i in range(6)]
    graphs.append(AttributedGraph(n=2, edges=[], features=np.array([[0.1], [1 / 3]]), target=[1, 0], graph_id=6))
    ds = GraphDataset("rt", tuple(g.replace(target=t) for g, t in zip(graphs, [0, 1, 2, 0.5, None, 1, (1, 0)])))
    p = tmp_path / "rt.jsonl"
    write_jsonl(ds, p)
    back, _ = parse_jsonl(p, name="rt")
    assert back.N == ds.N
    for a, b in zip(ds, back):
        assert a == b
        assert a.target == b.target
    assert back[6].features[0, 0] == 0.1


def test_jsonl_empty_edges_serialized():
    g = AttributedGraph(n=1, edges=[], features=np.ones((1, 1)))
    assert '"edges":[]' in graph_to_json(g)
    assert list(json.loads(graph_to_json(g))) == ["id", "n", "edges", "features"]


def test_load_dataset_guesses_format(tmp_path):
    assert load_dataset(MUTAG_DIR)[0].name == "MUTAG"
    with pytest.raises(FileNotFoundError):
        load_dataset(tmp_path / "missing")


def test_ring_of_cliques_fig1_shape():
    g = gen_ring_of_cliques(4, 3, 12, seed=7)
    assert g.n == 12 and g.num_edges == 16 and g.feature_dim == 12
    assert is_connected(g.adjacency())
    assert np.array_equal(g.features, gen_ring_of_cliques(4, 3, 12, seed=7).features)


def test_ring_of_cliques_small():
    g = gen_ring_of_cliques(3, 2, 1, seed=0)
    assert g.n == 6 and g.num_edges == 6
    assert is_connected(g.adjacency())
    assert {(0, 2), (2, 4), (0, 4)} <= set(g.edges)


@pytest.mark.parametrize("args", [(2, 3, 1), (3, 1, 1), (3, 3, 0)])
def test_ring_of_cliques_bounds(args):
    with pytest.raises(ValueError):
        gen_ring_of_cliques(*args)
