import numpy as np
import pytest
from hypothesis import strategies as st

from divkit.core import Dist
from divkit.sampling import random_channel, random_pair


@st.composite
def dist_pairs(draw, min_size=2, max_size=6):
    """Random pairs on a common label set, including some exact zeros."""
    seed = draw(st.integers(0, 2**32 - 1))
    n = draw(st.integers(min_size, max_size))
    rng = np.random.default_rng(seed)
    mu1, mu2 = random_pair(rng, n)
    if draw(st.booleans()):
        p = mu1.array.copy()
        p[draw(st.integers(0, n - 1))] = 0.0
        if p.sum() > 0:
            mu1 = Dist(mu1.labels, tuple(p / p.sum()))
    return mu1, mu2


@st.composite
def channels(draw, n_in=None, max_in=6, max_out=4):
    seed = draw(st.integers(0, 2**32 - 1))
    n_in = n_in or draw(st.integers(1, max_in))
    n_out = draw(st.integers(1, max_out))
    sparsity = draw(st.sampled_from([0.0, 0.3, 0.7]))
    return random_channel(np.random.default_rng(seed), n_in, n_out, sparsity)


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)


def half_quarter():
    return Dist(("a", "b"), (0.5, 0.5)), Dist(("a", "b"), (0.25, 0.75))



def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(RESULTS, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
