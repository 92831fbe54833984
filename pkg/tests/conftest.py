import os

import numpy as np
import pytest
from hypothesis import settings

from rashomon_prep.tabular import load_csv, make_dataset

DATA_DIR = os.path.join(os.path.dirname(__file__), "data")

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

# lines collected by the acceptance suite, echoed in the terminal summary
ACCEPTANCE_LINES = []


def data_path(name: str) -> str:
    return os.path.join(DATA_DIR, name)


def load_fixture(name: str, **kw):
    return load_csv(data_path(f"{name}.csv"), "class", name=name, **kw)


def blobs(n0=200, n1=40, p=3, shift=2.0, seed=0):
    """Two Gaussian classes; class 1 is the minority, shifted along every axis."""
    rng = np.random.default_rng(seed)
    X = np.vstack([rng.normal(0, 1, (n0, p)), rng.normal(shift, 1, (n1, p))])
    y = np.r_[np.zeros(n0, int), np.ones(n1, int)]
    return make_dataset(X, y, name="blobs")


@pytest.fixture
def toy_imbalanced():
    return blobs()


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
