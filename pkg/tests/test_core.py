import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from chiralosc.core import (
    DimensionMismatch,
    FullState,
    DarbouxState,
    NegativeLambda,
    Params,
    ReducedState,
    Vec2,
    as_vector,
    cross,
    dot,
    flatten,
    on_surface,
    unflatten,
)
from chiralosc.brackets import constraint_values

from conftest import params, vectors


@pytest.mark.parametrize("lam,mass", [(0.0, 1.0), (1.0, 0.0), (math.nan, 1.0), (1.0, math.inf)])
def test_params_rejects_degenerate(lam, mass):
    with pytest.raises(ValueError):
        Params(lam, mass)


def test_params_omega_and_sqrt():
    p = Params(2.0, 3.0)
    assert p.omega == 1.5
    assert p.sqrt_lam == pytest.approx(math.sqrt(2))
    with pytest.raises(NegativeLambda):
        Params(-1.0, 1.0).sqrt_lam


def test_full_state_layout():
    z = FullState(Vec2(1, 2), Vec2(3, 4), Vec2(5, 6), Vec2(7, 8))
    assert np.array_equal(flatten(z), np.arange(1, 9))
    assert np.array_equal(np.asarray(z), np.arange(1, 9))


@given(vectors(8))
def test_flatten_roundtrip(v):
    assert np.array_equal(flatten(unflatten(v)), v)


@given(vectors(8))
def test_darboux_state_roundtrip(v):
    assert np.array_equal(DarbouxState.unflatten(v).flatten(), v)


def test_unflatten_wrong_size():
    with pytest.raises(DimensionMismatch):
        unflatten(np.zeros(7))
    with pytest.raises(DimensionMismatch):
        ReducedState.unflatten(np.zeros(5))


def test_reduced_state_rejects_negative_lsq():
    with pytest.raises(ValueError):
        ReducedState(0, 0, 0, -1e-3)


def test_as_vector_checks_last_axis():
    assert as_vector(np.zeros((3, 8)), 8).shape == (3, 8)
    with pytest.raises(DimensionMismatch):
        as_vector(np.zeros(6), 8)
    with pytest.raises(DimensionMismatch):
        as_vector(1.0, 8)


@given(vectors(2), vectors(2))
def test_cross_antisymmetric_and_dot_symmetric(a, b):
    assert cross(a, b) == -cross(b, a)
    assert dot(a, b) == dot(b, a)
    assert cross(a, a) == 0.0


def test_cross_broadcasts():
    a = np.array([[1.0, 0.0], [0.0, 1.0]])
    assert np.array_equal(cross(a, [0.0, 1.0]), [1.0, 0.0])


@given(vectors(8), params())
def test_on_surface_zeroes_constraints(z, p):
    s = on_surface(z, p)
    assert np.max(np.abs(constraint_values(s, p))) < 1e-15
    assert np.array_equal(s[:6], z[:6])


@given(st.lists(vectors(8), min_size=1, max_size=5), params())
def test_on_surface_batched(zs, p):
    zs = np.array(zs)
    assert np.array_equal(on_surface(zs, p), np.array([on_surface(z, p) for z in zs]))
