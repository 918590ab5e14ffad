import numpy as np
import pytest
from hypothesis import settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from chiralosc.core import Params

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

coord = st.floats(-2, 2, allow_nan=False, allow_infinity=False)
nonzero = st.one_of(st.floats(0.2, 3.0), st.floats(-3.0, -0.2))


def vectors(n):
    return arrays(np.float64, n, elements=coord)


@st.composite
def params(draw, positive=False):
    lam = draw(st.floats(0.2, 3.0)) if positive else draw(nonzero)
    return Params(lam, draw(nonzero))


@st.composite
def full_states(draw, surface_params=None):
    z = draw(vectors(8))
    if surface_params is not None:
        z[6] = surface_params.lam * z[3] / 2
        z[7] = -surface_params.lam * z[2] / 2
    return z


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def unit():
    return Params(1.0, 1.0)
