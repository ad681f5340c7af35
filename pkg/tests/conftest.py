import numpy as np
import pytest
import torch

from vmmc.synthetic import generate_corpus
from vmmc import dataset


def pytest_configure(config):
    torch.manual_seed(0)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import ACCEPTANCE_LINES
    except ImportError:
        return
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def small_corpus(tmp_path_factory):
    """7 classes x 6 tiny images with ground-truth boxes."""
    root = tmp_path_factory.mktemp("small_corpus")
    manifest_path = generate_corpus(root, per_class=6, seed=7, width=96, height=72)
    return dataset.load_manifest(manifest_path)


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)
