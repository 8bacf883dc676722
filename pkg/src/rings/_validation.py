"""Input checks shared by the estimators and pipeline functions."""

from __future__ import annotations

import numbers
from typing import Sequence

import numpy as np

from .core import AttributedGraph, GraphDataset


def check_graphs(X, name: str = "X") -> list[AttributedGraph]:
    """Return ``X`` as a list of graphs, accepting a dataset, a graph or a sequence."""
    if isinstance(X, GraphDataset):
        return list(X.graphs)
    if isinstance(X, AttributedGraph):
        return [X]
    if isinstance(X, (str, bytes)) or not isinstance(X, Sequence):
        try:
            X = list(X)
        except TypeError:
            raise TypeError(f"{name} must be a GraphDataset or a sequence of AttributedGraph") from None
    bad = [i for i, g in enumerate(X) if not isinstance(g, AttributedGraph)]
    if bad:
        raise TypeError(f"{name}[{bad[0]}] is {type(X[bad[0]]).__name__}, expected AttributedGraph")
    return list(X)


def check_positive_int(value, name: str, minimum: int = 1) -> int:
    if isinstance(value, bool) or not isinstance(value, numbers.Integral) or value < minimum:
        raise ValueError(f"{name} must be an integer >= {minimum}, got {value!r}")
    return int(value)


def check_norm_orders(p, q) -> tuple[float, float]:
    p, q = float(p), float(q)
    if not (np.isfinite(p) and np.isfinite(q) and p >= 1 and q >= 1):
        raise ValueError(f"norm orders must satisfy p, q >= 1, got p={p}, q={q}")
    return p, q


def check_time(t) -> float:
    t = float(t)
    if not np.isfinite(t) or t <= 0:
        raise ValueError(f"diffusion time must be positive, got {t}")
    return t


def check_choice(value, options, name: str):
    if value not in options:
        raise ValueError(f"{name} must be one of {tuple(options)}, got {value!r}")
    return value


def check_sample(a, name: str) -> np.ndarray:
    arr = np.asarray(a, dtype=float).ravel()
    if arr.size == 0:
        raise ValueError(f"{name} is empty")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    return arr
