import os
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import settings

from sncert.snumbers import engine

settings.register_profile("default", deadline=None, max_examples=40)
settings.register_profile("ci", deadline=None, max_examples=15)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def F(x) -> Fraction:
    return Fraction(x)


def frac_matrix(rows) -> np.ndarray:
    out = np.empty((len(rows), len(rows[0])), dtype=object)
    for i, r in enumerate(rows):
        for j, x in enumerate(r):
            out[i, j] = Fraction(x)
    return out


@pytest.fixture
def fresh_solvers():
    """Drop cached solvers so a computation really runs again."""
    engine._SOLVERS.clear()
    yield
    engine._SOLVERS.clear()
