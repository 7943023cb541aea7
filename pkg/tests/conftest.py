import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from equity_metrics import ScoreDataset

settings.register_profile("default", max_examples=100, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", max_examples=300, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def dataset(**groups):
    """``dataset(A=(genuine, impostor), B=...)`` shorthand for tests."""
    return ScoreDataset.from_mapping(
        {name: {"genuine": np.asarray(g, float), "impostor": np.asarray(i, float)}
         for name, (g, i) in groups.items()})


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def dfi_example():
    """Combined 2-bin histograms [0.5, 0.5] for A and [1, 0] for B."""
    return dataset(A=([0.75] * 3, [0.25] * 3), B=([0.3] * 3, [0.1] * 3))


def cei_example():
    """Impostor histograms over 4 bins: A = [.45,.45,.05,.05], B = [.45,.45,.09,.01].

    With P = 90 the pooled split score is 0.3 (108 of 120 scores sit at or
    below it), so the tail is bins 2 and 3 and both centers are [0.5, 0.5].
    """
    a = [0.1] * 9 + [0.3] * 9 + [0.6] + [0.9]
    b = [0.1] * 45 + [0.3] * 45 + [0.6] * 9 + [0.9]
    return dataset(A=([0.9] * 5, a), B=([0.9] * 5, b))
