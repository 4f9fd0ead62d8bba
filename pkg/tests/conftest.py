import os
import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from sampclust.datasets import load_pendigits, pendigits_path  # noqa: E402
from sampclust.graph import DirectedGraph, build_knn_graph  # noqa: E402

settings.register_profile(
    "default",
    max_examples=60,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.register_profile("thorough", max_examples=400, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@st.composite
def digraphs(draw, min_n=0, max_n=12, id_gap=False):
    """Random simple digraphs; with ``id_gap`` the ids are a sparse subset."""
    n = draw(st.integers(min_n, max_n))
    if id_gap:
        ids = sorted(draw(st.sets(st.integers(0, 3 * max_n + 3), min_size=n, max_size=n)))
    else:
        ids = list(range(n))
    out = {}
    for v in ids:
        others = [u for u in ids if u != v]
        out[v] = sorted(draw(st.sets(st.sampled_from(others), max_size=len(others)))) if others else []
    return DirectedGraph(out)


def random_digraph(rng: np.random.Generator, n: int, p: float) -> DirectedGraph:
    return DirectedGraph({v: [u for u in range(n) if u != v and rng.random() < p] for v in range(n)})


@pytest.fixture(scope="session")
def pendigits():
    if pendigits_path() is None:
        pytest.skip("data/pendigits.csv missing; run scripts/fetch_pendigits.py")
    return load_pendigits()


@pytest.fixture(scope="session")
def pendigits_graph(pendigits):
    return build_knn_graph(pendigits, 16)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
