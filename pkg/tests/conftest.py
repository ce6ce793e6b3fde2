"""Shared helpers for the test suite."""

import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20260823)


def random_unit(rng, n):
    v = rng.standard_normal(n)
    return v / np.linalg.norm(v)


def triangular_unit_rows(rng, m):
    """Random m x m matrix whose row j is a unit vector in the first j coords.

    This is the coordinate form produced by basis adaptation, suitable as
    direct input to the shrinking-box sampler.
    """
    rows = np.zeros((m, m))
    for j in range(m):
        r = rng.standard_normal(j + 1)
        rows[j, : j + 1] = r / np.linalg.norm(r)
    return rows
