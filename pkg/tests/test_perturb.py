import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import complete_graph, path_graph, random_connected_graph
from rings.core import AttributedGraph, GraphDataset
from rings.perturb import (KIND_CODES, ModePerturbation, PerturbationKind, graph_seed, perturb_dataset,
                           perturb_graph, shuffle_permutation)


def _graph(seed=0, n=7):
    return random_connected_graph(np.random.default_rng(seed), n_max=n)


def test_complete_graph_on_four_nodes():
    assert perturb_graph(path_graph(4), "cg").num_edges == 6


def test_random_graph_limits():
    g = path_graph(5)
    assert perturb_graph(g, "rg:1", 3).edges == perturb_graph(g, "cg").edges
    assert perturb_graph(g, "rg:0", 3).edges == ()


def test_complete_features_identity():
    assert np.array_equal(perturb_graph(path_graph(3), "cf").features, np.eye(3))


def test_empty_features_shape():
    assert np.array_equal(perturb_graph(path_graph(4), "ef").features, np.zeros((4, 1)))


def test_random_features_default_dim():
    assert perturb_graph(path_graph(4), "rf", 1).features.shape == (4, 10)
    assert perturb_graph(path_graph(4), "rf:3", 1).features.shape == (4, 3)


def test_shuffled_graph_identity_permutation():
    g = path_graph(3)
    seed = next(s for s in range(1000) if np.array_equal(shuffle_permutation(3, s), np.arange(3)))
    assert perturb_graph(g, "sg", seed) == g


def test_shuffled_graph_relabels_by_exposed_permutation():
    g = _graph(3)
    perm = shuffle_permutation(g.n, 11)
    h = perturb_graph(g, "sg", 11)
    assert set(h.edges) == {tuple(sorted((int(perm[u]), int(perm[v])))) for u, v in g.edges}


@pytest.mark.parametrize("spec", ["xx", "rf:0", "rg:1.5", "cg:2"])
def test_bad_kind_specs(spec):
    with pytest.raises(ValueError):
        PerturbationKind.parse(spec)


def test_long_names():
    assert PerturbationKind.parse("complete_graph").code == "cg"
    assert PerturbationKind("random_features").acts_on == "features"


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from(KIND_CODES))
def test_mode_separation(seed, code):
    g = _graph(seed)
    h = perturb_graph(g, code, seed)
    assert h.n == g.n and h.graph_id == g.graph_id
    kind = PerturbationKind(code)
    if kind.acts_on == "features":
        assert h.edges == g.edges
    if kind.acts_on == "structure":
        assert np.array_equal(h.features, g.features)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6))
def test_shuffled_features_preserve_row_multiset(seed):
    g = _graph(seed)
    h = perturb_graph(g, "sf", seed)
    key = lambda X: sorted(map(tuple, X))
    assert key(h.features) == key(g.features)


def test_density_matched_random_graph_on_triangles():
    d = GraphDataset("tri", tuple(complete_graph(3).replace(graph_id=i) for i in range(1000)))
    out = perturb_dataset(d, "rg", master_seed=5)
    assert all(g.num_edges == 3 for g in out)


def test_density_matched_expectation():
    g = path_graph(10)
    p = 9 / 45
    counts = np.array([perturb_graph(g, "rg", s).num_edges for s in range(1000)])
    sd = np.sqrt(45 * p * (1 - p) / 1000)
    assert abs(counts.mean() - 9) <= 3 * sd


def test_perturb_dataset_determinism_and_order():
    d = GraphDataset("det", tuple(_graph(s).replace(graph_id=s) for s in range(20)))
    assert perturb_dataset(d, "o") is d
    a = perturb_dataset(d, "rg", 3, n_jobs=1)
    b = perturb_dataset(d, "rg", 3, n_jobs=4)
    assert [g.graph_id for g in a] == list(range(20))
    assert all(x == y for x, y in zip(a, b))
    c = perturb_dataset(d, "rg", 4, n_jobs=1)
    assert any(x != y for x, y in zip(a, c))


def test_graph_seed_is_stable():
    assert graph_seed(0, "MUTAG", 3) == graph_seed(0, "MUTAG", 3)
    assert graph_seed(0, "MUTAG", 3) != graph_seed(0, "MUTAG", 4)
    assert graph_seed(0, "MUTAG", 3) != graph_seed(0, "NCI1", 3)


def test_transformer():
    graphs = [_graph(s).replace(graph_id=s) for s in range(3)]
    out = ModePerturbation(kind="eg").fit_transform(graphs)
    assert all(g.edges == () for g in out)
    assert ModePerturbation(kind="cf").get_params()["kind"] == "cf"
    with pytest.raises(ValueError):
        ModePerturbation(kind="zz").fit(graphs)
