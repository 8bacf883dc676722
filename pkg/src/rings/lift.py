"""Lifts of graph structure and node features into distance matrices."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components, shortest_path
from scipy.spatial.distance import pdist, squareform

from ._validation import check_choice, check_time
from .core import AttributedGraph

STRUCTURAL_METRICS = ("diffusion", "heat_kernel", "resistance", "shortest_path")
TIME_METRICS = frozenset({"diffusion", "heat_kernel"})
CONVENTIONS = ("laplacian-literal", "diffusion-operator")
FEATURE_METRICS = ("euclidean", "cosine")


class ConvergenceError(RuntimeError):
    """The eigensolver failed to converge."""


@dataclass(frozen=True)
class StructuralMetric:
    """A structural distance and its parameters.

    ``t`` is ignored by ``resistance`` and ``shortest_path``. Diffusion needs
    an integer ``t >= 1``; the heat kernel accepts any ``t > 0``.
    """

    name: str = "diffusion"
    t: float = 1
    convention: str = "laplacian-literal"

    def __post_init__(self):
        check_choice(self.name, STRUCTURAL_METRICS, "structural metric")
        check_choice(self.convention, CONVENTIONS, "diffusion convention")
        check_t(self.name, self.t)

    @property
    def uses_time(self) -> bool:
        return self.name in TIME_METRICS


def check_t(metric: str, t) -> None:
    if metric == "diffusion":
        if float(t) != int(t) or int(t) < 1:
            raise ValueError(f"diffusion time must be an integer >= 1, got {t!r}")
    elif metric == "heat_kernel":
        check_time(t)


@dataclass(frozen=True)
class EigenDecomposition:
    """Eigenvalues in ascending order with orthonormal eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        V = self.eigenvectors
        return (V * self.eigenvalues) @ V.T


def _adjacency(g) -> np.ndarray:
    if isinstance(g, AttributedGraph):
        return g.adjacency()
    A = np.asarray(g, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"adjacency must be square, got shape {A.shape}")
    return A


def is_connected(A: np.ndarray) -> bool:
    if A.shape[0] <= 1:
        return True
    ncomp, _ = connected_components(csr_matrix(A), directed=False)
    return ncomp == 1


def _require_connected(A: np.ndarray, what: str) -> None:
    if not is_connected(A):
        raise ValueError(f"{what} requires a connected graph; split it into components first")


def normalized_laplacian(g) -> np.ndarray:
    """Symmetric normalized Laplacian ``D^-1/2 (D - A) D^-1/2``.

    Rows and columns of isolated nodes are zero.
    """
    A = _adjacency(g)
    deg = A.sum(axis=1)
    inv_sqrt = np.zeros_like(deg)
    nz = deg > 0
    inv_sqrt[nz] = 1.0 / np.sqrt(deg[nz])
    L = np.diag(nz.astype(float)) - inv_sqrt[:, None] * A * inv_sqrt[None, :]
    return (L + L.T) / 2


def laplacian(g) -> np.ndarray:
    A = _adjacency(g)
    return np.diag(A.sum(axis=1)) - A


def sym_eigendecomposition(M, check: bool = False) -> EigenDecomposition:
    """Eigendecomposition of a real symmetric matrix.

    Args:
        M: Square matrix, symmetric within ``1e-10`` (relative to its scale).
        check: Also verify the residual and orthonormality tolerances.

    Raises:
        ValueError: ``M`` is not square or not symmetric.
        ConvergenceError: The LAPACK driver did not converge.
    """
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    scale = max(1.0, float(np.abs(M).max(initial=0.0)))
    if np.abs(M - M.T).max(initial=0.0) > 1e-10 * scale:
        raise ValueError("matrix is not symmetric within 1e-10")
    try:
        w, V = np.linalg.eigh(M)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"eigensolver did not converge for a {M.shape[0]}x{M.shape[0]} matrix") from exc
    if check:
        tol = 1e-8 * max(1.0, np.linalg.norm(M))
        resid = np.linalg.norm(M @ V - V * w, axis=0).max(initial=0.0)
        if resid > tol or np.abs(V.T @ V - np.eye(len(w))).max(initial=0.0) > 1e-8:
            raise ConvergenceError(f"eigendecomposition of size {len(w)} misses tolerance (residual {resid:.2e})")
    return EigenDecomposition(w, V)


def _embedding_distance(E: np.ndarray) -> np.ndarray:
    if E.shape[0] == 1:
        return np.zeros((1, 1))
    return squareform(pdist(E, "euclidean"))


def _diffusion_weights(lam: np.ndarray, convention: str) -> np.ndarray:
    lam = np.clip(lam, 0.0, 2.0)
    return lam if convention == "laplacian-literal" else 1.0 - lam


def diffusion_distances(g, ts: Sequence[int], convention: str = "laplacian-literal") -> list[np.ndarray]:
    """Diffusion distances for several times from one eigendecomposition.

    Node ``x`` is embedded as ``(w_i^t psi_i(x))_i`` over all eigenpairs of
    the normalized Laplacian. ``laplacian-literal`` uses ``w_i = lambda_i``;
    ``diffusion-operator`` uses ``w_i = 1 - lambda_i``.
    """
    check_choice(convention, CONVENTIONS, "diffusion convention")
    for t in ts:
        check_t("diffusion", t)
    A = _adjacency(g)
    _require_connected(A, "diffusion distance")
    eig = sym_eigendecomposition(normalized_laplacian(A))
    w = _diffusion_weights(eig.eigenvalues, convention)
    return [_embedding_distance(eig.eigenvectors * w ** int(t)) for t in ts]


def diffusion_distance(g, t: int = 1, convention: str = "laplacian-literal") -> np.ndarray:
    return diffusion_distances(g, [t], convention)[0]


def heat_kernel(g, t: float) -> np.ndarray:
    """Heat kernel ``sum_i exp(-lambda_i t) psi_i psi_i^T`` of the normalized Laplacian."""
    t = check_time(t)
    eig = sym_eigendecomposition(normalized_laplacian(g))
    V = eig.eigenvectors
    return (V * np.exp(-eig.eigenvalues * t)) @ V.T


def heat_kernel_distances(g, ts: Sequence[float]) -> list[np.ndarray]:
    """Kernel-induced distances ``sqrt(h(u,u) + h(v,v) - 2 h(u,v))``.

    Computed as Euclidean distances between rows of
    ``V diag(exp(-lambda t / 2))``, which is the same quantity without the
    cancellation of the expanded form.
    """
    ts = [check_time(t) for t in ts]
    A = _adjacency(g)
    _require_connected(A, "heat kernel distance")
    eig = sym_eigendecomposition(normalized_laplacian(A))
    return [_embedding_distance(eig.eigenvectors * np.exp(-eig.eigenvalues * t / 2)) for t in ts]


def heat_kernel_distance(g, t: float = 1.0) -> np.ndarray:
    return heat_kernel_distances(g, [t])[0]


def resistance_distance(g) -> np.ndarray:
    """Effective resistance from ``Lambda = (L + J/n)^+``."""
    A = _adjacency(g)
    _require_connected(A, "resistance distance")
    n = A.shape[0]
    Lam = np.linalg.pinv(laplacian(A) + np.full((n, n), 1.0 / n), hermitian=True)
    d = np.diag(Lam)
    R = d[:, None] + d[None, :] - Lam - Lam.T
    R = np.maximum((R + R.T) / 2, 0.0)
    np.fill_diagonal(R, 0.0)
    return R


def shortest_path_distance(g) -> np.ndarray:
    """Hop-count distances (breadth-first)."""
    A = _adjacency(g)
    _require_connected(A, "shortest-path distance")
    return shortest_path(csr_matrix(A), method="D", directed=False, unweighted=True)


def feature_distance(X, metric: str = "euclidean") -> np.ndarray:
    """Pairwise feature distances.

    Cosine distance is ``1 - cos`` clamped to ``[0, 2]``. Two zero vectors are
    at distance 0; a zero and a nonzero vector are at distance 1.
    """
    check_choice(metric, FEATURE_METRICS, "feature metric")
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    n = X.shape[0]
    if n == 1:
        return np.zeros((1, 1))
    if metric == "euclidean":
        return squareform(pdist(X, "euclidean"))
    norms = np.linalg.norm(X, axis=1)
    zero = norms == 0
    safe = np.where(zero, 1.0, norms)
    U = X / safe[:, None]
    D = np.clip(1.0 - U @ U.T, 0.0, 2.0)
    D[np.ix_(zero, ~zero)] = 1.0
    D[np.ix_(~zero, zero)] = 1.0
    D[np.ix_(zero, zero)] = 0.0
    D = (D + D.T) / 2
    np.fill_diagonal(D, 0.0)
    return D


def normalize_diameter(D) -> np.ndarray:
    """Scale so the largest distance is 1; zero-diameter input is returned as is."""
    D = np.asarray(D, dtype=float)
    m = D.max(initial=0.0)
    return D / m if m > 0 else D.copy()


def check_distance_matrix(D, atol: float = 0.0) -> np.ndarray:
    """Validate symmetry, zero diagonal, nonnegativity and finiteness."""
    D = np.asarray(D, dtype=float)
    if D.ndim != 2 or D.shape[0] != D.shape[1]:
        raise ValueError(f"distance matrix must be square, got {D.shape}")
    if not np.all(np.isfinite(D)):
        raise ValueError("distance matrix has non-finite entries")
    if np.abs(D - D.T).max(initial=0.0) > atol:
        raise ValueError("distance matrix is not symmetric")
    if np.abs(np.diag(D)).max(initial=0.0) > atol:
        raise ValueError("distance matrix has a nonzero diagonal")
    if D.min(initial=0.0) < -atol:
        raise ValueError("distance matrix has negative entries")
    return D


def _is_complete(A: np.ndarray) -> bool:
    n = A.shape[0]
    return n >= 2 and int(np.count_nonzero(A)) == n * (n - 1)


def structural_lifts(g, metric: str = "diffusion", ts: Sequence[float] = (1,),
                     convention: str = "laplacian-literal") -> list[np.ndarray]:
    """Lift the structure of a connected or edgeless graph, once per time.

    An edgeless graph lifts to the all-zero matrix. On a complete graph
    every pair of nodes is equivalent, so the lift is written as a constant
    times ``1 - I`` and normalizes to the discrete space exactly.
    """
    check_choice(metric, STRUCTURAL_METRICS, "structural metric")
    A = _adjacency(g)
    n = A.shape[0]
    if metric not in TIME_METRICS:
        ts = [None] * max(len(ts), 1)
    if not A.any():
        return [np.zeros((n, n)) for _ in ts]
    if metric == "diffusion":
        out = diffusion_distances(A, ts, convention)
    elif metric == "heat_kernel":
        out = heat_kernel_distances(A, ts)
    else:
        D = resistance_distance(A) if metric == "resistance" else shortest_path_distance(A)
        out = [D for _ in ts]
    if _is_complete(A):
        iu = np.triu_indices(n, 1)
        out = [float(D[iu].mean()) * (1.0 - np.eye(n)) for D in out]
    return out


def structural_lift(g, metric: str | StructuralMetric = "diffusion", t: float = 1,
                    convention: str = "laplacian-literal") -> np.ndarray:
    if isinstance(metric, StructuralMetric):
        metric, t, convention = metric.name, metric.t, metric.convention
    return structural_lifts(g, metric, [t], convention)[0]
