import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from alphaseed.data_io import Dataset  # noqa: E402
from alphaseed.kernel import Kernel, KernelSpec  # noqa: E402
from alphaseed.solver import SolverConfig, init_state, solve  # noqa: E402
from alphaseed.synthetic import make_blobs  # noqa: E402


@pytest.fixture(scope="session")
def blobs300():
    return make_blobs(300, seed=0)


def random_problem(rng, n, dim=2):
    """Random dataset with both labels present."""
    X = rng.normal(size=(n, dim))
    y = rng.choice([-1, 1], size=n)
    y[0], y[1] = 1, -1
    return Dataset.from_arrays(X, y)


def trained_state(ds, ids, C=1.0, gamma=0.5, epsilon=1e-6):
    kernel = Kernel(KernelSpec("gaussian", gamma), ds)
    return solve(init_state(kernel, np.asarray(ids), C), SolverConfig(epsilon=epsilon))


# One line per acceptance criterion, printed after the run.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
