import os
from pathlib import Path

import numpy as np
import pytest

from rings.core import AttributedGraph

DATA = Path(__file__).parent / "data"
MUTAG_DIR = DATA / "MUTAG"


def path_graph(n, features=None):
    X = np.ones((n, 1)) if features is None else features
    return AttributedGraph(n=n, edges=[(i, i + 1) for i in range(n - 1)], features=X)


def cycle_graph(n, features=None):
    X = np.ones((n, 1)) if features is None else features
    return AttributedGraph(n=n, edges=[(i, (i + 1) % n) for i in range(n)], features=X)


def complete_graph(n, features=None):
    X = np.ones((n, 1)) if features is None else features
    iu, ju = np.triu_indices(n, 1)
    return AttributedGraph(n=n, edges=list(zip(iu.tolist(), ju.tolist())), features=X)


def random_connected_graph(rng, n_max=12, k_max=4):
    """A random spanning tree plus random extra edges, with Gaussian features."""
    n = int(rng.integers(2, n_max + 1))
    edges = {tuple(sorted((i, int(rng.integers(0, i))))) for i in range(1, n)}
    p = rng.uniform(0, 0.6)
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < p:
                edges.add((u, v))
    X = rng.standard_normal((n, int(rng.integers(1, k_max + 1))))
    return AttributedGraph(n=n, edges=sorted(edges), features=X)


@pytest.fixture(scope="session")
def mutag():
    from rings.ingest import parse_tu_dataset
    d, _ = parse_tu_dataset(MUTAG_DIR, "MUTAG")
    return d


@pytest.fixture
def no_env_threads(monkeypatch):
    monkeypatch.delenv("RINGS_THREADS", raising=False)
    return os.environ


ACCEPTANCE_LINES: dict = {}


def record_acceptance(number, ok, detail):
    """Store and print the verdict line for one acceptance criterion."""
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'} - {detail}"
    ACCEPTANCE_LINES[number] = line
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for number in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[number])
