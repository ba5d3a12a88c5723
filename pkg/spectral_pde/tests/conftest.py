import numpy as np
import pytest

from spectral_pde.services.boundaries import spec_from_label
from spectral_pde.services.lattice import build_grid


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="Run the table reproductions")


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: full-length table reproductions, run with --runslow")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow", default=False):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def dd_grid():
    """21 points on [0, pi] with zero Dirichlet ends."""
    return build_grid([(0.0, np.pi)], 21, spec_from_label("DD"))


@pytest.fixture
def make_grid():
    def factory(label: str, points: int = 21, interval=(0.0, np.pi)):
        return build_grid([interval], points, spec_from_label(label))
    return factory


@pytest.fixture(autouse=True)
def data_dir(tmp_path, monkeypatch):
    """Run every test from a scratch directory so default output paths stay out of the tree."""
    monkeypatch.chdir(tmp_path)
    return tmp_path
