"""Shared draw helpers for the test suite."""

import numpy as np

from corrsets.geometry import MeasurementSettings, planar_settings  # noqa: F401
from corrsets.oracles import random_settings  # noqa: F401


def unit(v):
    v = np.asarray(v, dtype=float)
    return v / np.linalg.norm(v)


def draw_settings(rng, m, rank=None):
    """Random settings, full rank unless told otherwise."""
    if rank is None:
        rank = min(3, m)
    return random_settings(rng, m, rank)


def random_unit(rng, dim=3):
    return unit(rng.standard_normal(dim))


def feasible_c(rng, s):
    """A correlation-shaped matrix inside the range of the settings map."""
    c = s.a @ rng.standard_normal((3, 3)) @ s.b.T
    n = np.linalg.norm(c)
    return c / n if n > 0 else c
