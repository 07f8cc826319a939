import numpy as np
import pytest

from mvitcc import ViewJoint, ViewMatrix, normalize


def random_count_matrix(rng, n, m, max_count=5):
    """Nonnegative integer counts with at least one positive entry."""
    counts = rng.integers(0, max_count, size=(n, m)).astype(float)
    if counts.sum() == 0:
        counts[0, 0] = 1.0
    return ViewMatrix.from_dense(counts)


def random_joint(rng, n, m, max_count=5) -> ViewJoint:
    return normalize(random_count_matrix(rng, n, m, max_count))


def random_assignment(rng, n, k):
    """Random surjective-ish assignment; every cluster used when n >= k."""
    a = rng.integers(0, k, size=n)
    a[:k] = np.arange(k)
    rng.shuffle(a)
    return a


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# W1: the canonical 2x2 diagonal joint used by many worked examples.
@pytest.fixture
def w1_joint():
    return normalize(ViewMatrix.from_dense([[2.0, 0.0], [0.0, 2.0]]))
