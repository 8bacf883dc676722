import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.linalg import expm

from conftest import complete_graph, cycle_graph, path_graph, random_connected_graph
from rings.core import AttributedGraph
from rings.lift import (STRUCTURAL_METRICS, StructuralMetric, check_distance_matrix, diffusion_distance,
                        feature_distance, heat_kernel, heat_kernel_distance, normalize_diameter,
                        normalized_laplacian, resistance_distance, shortest_path_distance, structural_lift,
                        structural_lifts, sym_eigendecomposition)


def _nx(g):
    G = nx.Graph()
    G.add_nodes_from(range(g.n))
    G.add_edges_from(g.edges)
    return G


def _diffusion_oracle(g, t, convention):
    """Squared distance (e_u - e_v)^T W^(2t) (e_u - e_v), W the weight operator."""
    L = normalized_laplacian(g)
    W = L if convention == "laplacian-literal" else np.eye(g.n) - L
    M = np.linalg.matrix_power(W, 2 * t)
    d = np.diag(M)
    return np.sqrt(np.maximum(d[:, None] + d[None, :] - 2 * M, 0))


def _graphs(seed, count=25, n_max=10):
    rng = np.random.default_rng(seed)
    return [random_connected_graph(rng, n_max=n_max) for _ in range(count)]


def test_normalized_laplacian_spectrum():
    eig = sym_eigendecomposition(normalized_laplacian(path_graph(5)), check=True)
    assert eig.eigenvalues.min() == pytest.approx(0, abs=1e-12)
    assert eig.eigenvalues.max() <= 2 + 1e-12
    assert np.allclose(eig.reconstruct(), normalized_laplacian(path_graph(5)))


def test_eigendecomposition_rejects_asymmetric():
    with pytest.raises(ValueError):
        sym_eigendecomposition(np.array([[0.0, 1.0], [0.0, 0.0]]))


@pytest.mark.parametrize("convention", ["laplacian-literal", "diffusion-operator"])
@pytest.mark.parametrize("t", [1, 2, 5])
def test_diffusion_matches_matrix_power_oracle(convention, t):
    for g in _graphs(1) + [cycle_graph(6), complete_graph(4).replace(edges=[(0, 1), (1, 2), (2, 3), (3, 0)])]:
        assert np.allclose(diffusion_distance(g, t, convention), _diffusion_oracle(g, t, convention), atol=1e-9)


def test_diffusion_rejects_bad_time():
    for t in (0, 1.5, -1):
        with pytest.raises(ValueError):
            diffusion_distance(path_graph(3), t)


def test_heat_kernel_matches_expm():
    for g in _graphs(2, count=10):
        for t in (0.3, 1.0, 4.0):
            H = expm(-t * normalized_laplacian(g))
            assert np.allclose(heat_kernel(g, t), H, atol=1e-10)
            h = np.diag(H)
            D = np.sqrt(np.maximum(h[:, None] + h[None, :] - 2 * H, 0))
            assert np.allclose(heat_kernel_distance(g, t), D, atol=1e-7)


@pytest.mark.parametrize("t", [0.1, 1.0, 3.0])
def test_heat_kernel_two_nodes(t):
    D = heat_kernel_distance(path_graph(2), t)
    assert D[0, 1] == pytest.approx(np.sqrt(2) * np.exp(-t), rel=1e-12)


def test_heat_kernel_large_time_limit():
    # only the stationary eigenvector survives
    g = path_graph(3)
    deg = g.degrees().astype(float)
    psi0 = np.sqrt(deg / deg.sum())
    assert np.allclose(heat_kernel_distance(g, 200.0), np.abs(psi0[:, None] - psi0[None, :]), atol=1e-12)
    assert np.allclose(heat_kernel_distance(cycle_graph(5), 200.0), 0, atol=1e-12)


def test_resistance_classical_values():
    assert resistance_distance(path_graph(2))[0, 1] == pytest.approx(1, abs=1e-12)
    assert resistance_distance(path_graph(3))[0, 2] == pytest.approx(2, abs=1e-12)
    assert resistance_distance(complete_graph(3))[0, 1] == pytest.approx(2 / 3, abs=1e-12)
    # series and parallel: a 4-cycle between opposite corners is 2 || 2 = 1
    assert resistance_distance(cycle_graph(4))[0, 2] == pytest.approx(1, abs=1e-12)


def test_resistance_matches_networkx():
    for g in _graphs(3):
        G = _nx(g)
        R = resistance_distance(g)
        for u in range(g.n):
            for v in range(u + 1, g.n):
                assert R[u, v] == pytest.approx(nx.resistance_distance(G, u, v), abs=1e-9)


def test_shortest_path_matches_bfs():
    for g in _graphs(4):
        D = shortest_path_distance(g)
        for u, lengths in nx.all_pairs_shortest_path_length(_nx(g)):
            for v, d in lengths.items():
                assert D[u, v] == d


@pytest.mark.parametrize("metric", ["diffusion", "heat_kernel", "resistance", "shortest_path"])
def test_disconnected_input_rejected(metric):
    g = AttributedGraph(n=4, edges=[(0, 1), (2, 3)], features=np.ones((4, 1)))
    with pytest.raises(ValueError, match="connected"):
        structural_lift(g, metric)


@pytest.mark.parametrize("metric", STRUCTURAL_METRICS)
def test_edgeless_lifts_to_zero(metric):
    g = AttributedGraph(n=5, edges=[], features=np.ones((5, 1)))
    assert np.array_equal(structural_lift(g, metric), np.zeros((5, 5)))


@pytest.mark.parametrize("metric", STRUCTURAL_METRICS)
@pytest.mark.parametrize("n", [2, 3, 7, 20])
def test_complete_graph_normalizes_to_discrete(metric, n):
    for D in structural_lifts(complete_graph(n), metric, [1, 3]):
        assert np.array_equal(normalize_diameter(D), 1.0 - np.eye(n))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from(STRUCTURAL_METRICS), st.sampled_from([1, 2, 7]))
def test_metric_axioms(seed, metric, t):
    g = random_connected_graph(np.random.default_rng(seed), n_max=9)
    D = structural_lift(g, metric, t)
    check_distance_matrix(D, atol=1e-9)
    viol = D[:, None, :] - D[:, :, None] - D.T[None, :, :]
    assert viol.max() <= 1e-9


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from(STRUCTURAL_METRICS))
def test_lifts_equivariant_under_relabeling(seed, metric):
    rng = np.random.default_rng(seed)
    g = random_connected_graph(rng, n_max=9)
    perm = rng.permutation(g.n)
    h = g.replace(edges=[(int(perm[u]), int(perm[v])) for u, v in g.edges])
    D, E = structural_lift(g, metric, 2), structural_lift(h, metric, 2)
    assert np.allclose(E[np.ix_(perm, perm)], D, atol=1e-9)


def test_one_hot_euclidean_is_sqrt_two():
    D = feature_distance(np.eye(5))
    assert np.array_equal(normalize_diameter(D), 1.0 - np.eye(5))
    assert D[0, 1] == np.sqrt(2)


def test_cosine_zero_vector_rules():
    X = np.array([[0.0, 0.0], [0.0, 0.0], [1.0, 0.0], [-2.0, 0.0]])
    D = feature_distance(X, "cosine")
    assert D[0, 1] == 0 and D[0, 2] == 1 and D[2, 3] == 2 and D[1, 3] == 1
    check_distance_matrix(D)


def test_structural_metric_type():
    m = StructuralMetric("heat_kernel", 0.5)
    assert m.uses_time
    assert np.allclose(structural_lift(path_graph(4), m), heat_kernel_distance(path_graph(4), 0.5))
    with pytest.raises(ValueError):
        StructuralMetric("nope")
    with pytest.raises(ValueError):
        StructuralMetric("heat_kernel", -1)


def test_normalize_diameter_zero_input():
    Z = np.zeros((3, 3))
    assert np.array_equal(normalize_diameter(Z), Z)
