import sys
from pathlib import Path

import pytest
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from qaoa_matching import graph as G  # noqa: E402


@st.composite
def graphs(draw, max_vertices=8, max_edges=10, min_edges=1):
    n = draw(st.integers(2, max_vertices))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    chosen = draw(st.lists(st.sampled_from(pairs), min_size=min_edges,
                           max_size=min(max_edges, len(pairs)), unique=True))
    return G.build_graph(n, chosen)


@pytest.fixture(scope="session")
def corpus():
    from qaoa_matching.analysis import default_corpus

    return default_corpus(seed=0)
