import numpy as np
import pytest

from pacdp import make_rng


@pytest.fixture
def rng():
    return make_rng(20240817)


def batch_means_se(draws: np.ndarray, n_batches: int = 50) -> float:
    """Monte-Carlo standard error of a correlated chain via batch means."""
    n = draws.size // n_batches * n_batches
    batches = draws[:n].reshape(n_batches, -1).mean(axis=1)
    return float(batches.std(ddof=1) / np.sqrt(n_batches))
