import numpy as np
import pytest
from hypothesis import settings
from hypothesis import strategies as st

from redqmc.pointset import ReductionIndices, random_generating_vector

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")


@st.composite
def reduction_indices(draw, bases=(2, 3), max_m=6, max_s=8, allow_big=True):
    b = draw(st.sampled_from(bases))
    m = draw(st.integers(1, max_m))
    s = draw(st.integers(1, max_s))
    top = m + 2 if allow_big else m
    steps = draw(st.lists(st.integers(0, 2), min_size=s - 1, max_size=s - 1))
    w = [0]
    for d in steps:
        w.append(min(w[-1] + d, top))
    return ReductionIndices(b, m, tuple(w))


@st.composite
def lattices(draw, **kw):
    ind = draw(reduction_indices(**kw))
    seed = draw(st.integers(0, 2**32 - 1))
    return random_generating_vector(ind, seed)


def random_config(rng, bases=(2, 3), max_m=10, max_s=64, max_tau=8, max_points=2**14):
    """Random reduced lattice and matrix with N * s kept small."""
    b = int(rng.choice(bases))
    m = int(rng.integers(1, max_m + 1))
    while b**m > max_points:
        m -= 1
    s = int(rng.integers(1, max_s + 1))
    tau = int(rng.integers(1, max_tau + 1))
    incr = rng.integers(0, 3, size=s - 1) * (rng.random(s - 1) < 0.4)
    w = np.concatenate(([0], np.cumsum(incr))).astype(int)
    w = np.minimum(w, m + 1)
    ind = ReductionIndices(b, m, tuple(int(v) for v in w))
    g = random_generating_vector(ind, rng)
    A = rng.uniform(-1.0, 1.0, size=(s, tau))
    return g, A


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES = []


def report(number, ok, detail):
    """Record one acceptance line; printed in the terminal summary."""
    ACCEPTANCE_LINES.append(f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
