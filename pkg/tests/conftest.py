import sys

import numpy as np
import pytest

from halfsym.dataset import save_cloud


def symmetric_shape(rng, n_half, ext=(1.0, 0.5, 0.3)):
    """A cloud with exact mirror pairs about x = 0, no point on the plane."""
    right = rng.normal(size=(n_half, 3)) * ext
    right[:, 0] = np.abs(right[:, 0]) + 1e-3
    return np.concatenate([right, right * [-1.0, 1.0, 1.0]])


def write_corpus(root, counts, n_half=64, seed=0):
    """``counts`` maps split -> number of symmetric shapes to write under root/split."""
    rng = np.random.default_rng(seed)
    for split, n in counts.items():
        (root / split).mkdir(parents=True, exist_ok=True)
        for i in range(n):
            save_cloud(symmetric_shape(rng, n_half), root / split / f"{split}{i:03d}.npy")
    return root


@pytest.fixture
def corpus(tmp_path):
    return write_corpus(tmp_path / "src", {"train": 6, "val": 3})


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for line in lines:
        terminalreporter.write_line(line)
