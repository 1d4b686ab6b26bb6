"""Engine invariants over the randomized configuration matrix."""

import numpy as np
import pytest

import propmatrix
from propmatrix import sample_configs


@pytest.fixture(scope="module")
def matrix():
    return sample_configs(count=50, seed=2024)


@pytest.mark.parametrize("label,fn", propmatrix.ALWAYS_CHECKS)
def test_invariant_everywhere(matrix, label, fn):
    failures = [f"config {c.index}: {m}" for c in matrix if (m := fn(c))]
    assert not failures, f"{label} violated:\n" + "\n".join(failures)


@pytest.mark.parametrize("label,fn", propmatrix.HEAVY_CHECKS)
def test_monte_carlo_invariants_on_subset(matrix, label, fn):
    subset = [c for c in matrix if c.heavy]
    assert len(subset) >= 8
    failures = [f"config {c.index}: {m}" for c in subset if (m := fn(c))]
    assert not failures, f"{label} violated:\n" + "\n".join(failures)


def test_matrix_is_large_enough(matrix):
    assert len(matrix) >= 50
    sizes = {(c.channel.m_rx, c.ensemble.n_tx) for c in matrix}
    assert len(sizes) > 4  # genuinely varied geometry
