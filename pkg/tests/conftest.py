import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from holder.funcgrid import Grid, GridFunction, NormSpec  # noqa: E402


def make(values, lo=0.0, spacing=1.0, norms=None, vector=False, label=""):
    """Grid function from an array of grid shape, or ``(*shape, m)`` with ``vector``."""
    values = np.asarray(values, dtype=float)
    shape = values.shape[:-1] if vector else values.shape
    return GridFunction(grid_for(shape, lo, spacing), values, norms or NormSpec(), label)


def grid_for(shape, lo=0.0, spacing=1.0):
    dim = len(shape)
    lo = np.broadcast_to(np.asarray(lo, dtype=float), (dim,))
    h = np.broadcast_to(np.asarray(spacing, dtype=float), (dim,))
    return Grid(tuple(lo), tuple(h), tuple(shape))


def random_fixture(seed, max_side=15):
    """Random grid function with mixed dimension, target size and norms."""
    rng = np.random.default_rng(seed)
    dim = int(rng.integers(1, 4))
    side = {1: (8, max_side ** 2), 2: (3, max_side), 3: (2, 6)}[dim]
    shape = tuple(int(rng.integers(side[0], side[1] + 1)) for _ in range(dim))
    m = int(rng.integers(1, 4))
    spacing = tuple(float(rng.choice([0.25, 0.5, 1.0, 1 / 3])) for _ in range(dim))
    lo = tuple(float(rng.choice([-2.0, -1.0, 0.0, 0.5])) for _ in range(dim))
    norms = NormSpec(str(rng.choice(["l2", "linf", "l1"])), str(rng.choice(["l2", "linf"])))
    vals = rng.normal(size=(*shape, m))
    return GridFunction(grid_for(shape, lo, spacing), vals, norms, f"random:{seed}")


@pytest.fixture
def tent():
    from holder.fixtures import generate, parse_fixture

    return generate(parse_fixture("tent:n=1"))


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance")
        for k in sorted(results):
            terminalreporter.write_line(results[k])
