import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from chiralosc import brackets as br
from chiralosc import symmetry as sym
from chiralosc.core import DarbouxState, FullState, NegativeLambda, Params, ReducedState, Vec2, on_surface

from conftest import params, vectors

angles = st.floats(-np.pi, np.pi)


@given(angles, angles, vectors(2), vectors(2), vectors(2))
def test_group_composition_is_action(t1, t2, a1, a2, x):
    g, h = sym.GroupElement(t1, Vec2(*a1)), sym.GroupElement(t2, Vec2(*a2))
    lhs = sym.act_on_plane(g.compose(h), x)
    rhs = sym.act_on_plane(g, sym.act_on_plane(h, x))
    assert np.max(np.abs(lhs - rhs)) < 1e-12


def test_rotation_quarter_turn():
    assert np.allclose(sym.rotation(np.pi / 2) @ [1.0, 0.0], [0.0, 1.0])


def test_generator_brackets_on_plane():
    R, X, Y = sym.generators_plane()
    z = np.array([0.3, -1.2])
    assert np.allclose(sym.generator_bracket(R, X, z), Y(z))
    assert np.allclose(sym.generator_bracket(R, Y, z), -X(z))
    assert np.allclose(sym.lie_bracket(R, X, z), -Y(z))


def test_vector_field_fd_jacobian(rng):
    F = sym.VectorField("sq", 2, lambda z: np.array([z[0] ** 2, z[0] * z[1]]))
    z = rng.uniform(-2, 2, 2)
    assert np.allclose(F.jacobian(z), [[2 * z[0], 0], [z[1], z[0]]], atol=1e-8)


@given(vectors(8), params())
def test_invariant_triples_close(z, p):
    for P, fields in ((br.canonical_bracket(p), sym.canonical_invariant_fields(p)),
                      (br.dirac_bracket(p), sym.dirac_invariant_fields(p))):
        JR, JX, JY = fields
        assert abs(br.bracket_of_functions(P, JR, JX, z) - JY(z)) < 1e-9
        assert abs(br.bracket_of_functions(P, JR, JY, z) + JX(z)) < 1e-9
        assert abs(br.bracket_of_functions(P, JX, JY, z) - (z[4] ** 2 + z[5] ** 2) / p.lam) < 1e-9


@given(vectors(8), params())
def test_triples_agree_on_surface(z, p):
    z = on_surface(z, p)
    assert np.max(np.abs(sym.invariants_canonical(z, p) - sym.invariants_dirac(z, p))) < 1e-12


@given(vectors(8), params())
def test_dirac_invariants_lie_on_paraboloid(z, p):
    s = sym.invariants_dirac(z, p)
    scale = 1 + np.max(np.abs(s)) ** 2
    assert abs(s[1] ** 2 + s[2] ** 2 + 2 * s[3] / p.lam * s[0]) < 1e-12 * scale


@given(vectors(8), angles, vectors(2), params())
def test_invariants_under_group(z, th, a, p):
    g = sym.GroupElement(th, Vec2(*a))
    gz = sym.act_on_full(g, z)
    assert np.max(np.abs(sym.invariants_dirac(gz, p) - sym.invariants_dirac(z, p))) < 1e-12
    assert np.max(np.abs(sym.invariants_canonical(gz, p) - sym.invariants_canonical(z, p))) < 1e-12


def test_typed_inputs_return_typed_outputs():
    p = Params(2.0)
    z = FullState(Vec2(1, 2), Vec2(0.5, -1), Vec2(1, 1), Vec2(0, 0))
    assert isinstance(sym.invariants_dirac(z, p), ReducedState)
    w = sym.darboux_forward(z, p)
    assert isinstance(w, DarbouxState)
    assert isinstance(sym.darboux_inverse(w, p), FullState)


def test_dirac_lifts_are_hamiltonian(rng):
    p = Params(0.6, 1.4)
    P = br.dirac_bracket(p)
    gens = sym.dirac_invariant_fields(p) + (sym.lsq_over_lambda(p),)
    for z in rng.uniform(-2, 2, (20, 8)):
        for F, J in zip(sym.dirac_lift_fields(p), gens):
            assert np.max(np.abs(F(z) - P(z) @ J.grad(z))) < 1e-12


def test_dirac_lift_commutators(rng):
    FR, FX, FY, FL = sym.dirac_lift_fields(Params(0.6, 1.4))
    for z in rng.uniform(-2, 2, (20, 8)):
        assert np.allclose(sym.lie_bracket(FR, FX, z), -FY(z), atol=1e-12)
        assert np.allclose(sym.lie_bracket(FR, FY, z), FX(z), atol=1e-12)
        assert np.allclose(sym.lie_bracket(FX, FY, z), -FL(z), atol=1e-12)
        for F in (FR, FX, FY):
            assert np.allclose(sym.lie_bracket(FL, F, z), 0, atol=1e-12)


def test_printed_lift_components(rng):
    p = Params(1.5)
    z = rng.uniform(-2, 2, 8)
    full = np.array([F(z)[:6] for F in sym.dirac_lift_fields(p)])
    assert np.allclose(full, sym.dirac_lift_printed(z, p), atol=1e-15)


def test_momentum_map_generates_rotation(rng):
    z = rng.uniform(-2, 2, 8)
    R = sym.cotangent_lifts()[0]
    assert np.allclose(br.canonical_bracket()(z) @ sym.angular_momentum().grad(z), R(z))


def test_cocycle_values():
    assert sym.cocycle_value() == pytest.approx(1.0, abs=1e-15)
    M = sym.cocycle_matrix_plane((1.7, -0.2))
    assert np.allclose(M, [[0, 0, 0], [0, 0, 1], [0, -1, 0]], atol=1e-15)
    z = np.array([0, 0, 0, 0, 3.0, 4.0, 0, 0])
    assert sym.cocycle_value(z, Params(5.0)) == pytest.approx(5.0)
    with pytest.raises(TypeError):
        sym.cocycle_value(z)


@given(vectors(8), params(positive=True))
def test_darboux_roundtrip(z, p):
    w = sym.darboux_forward(z, p)
    assert np.max(np.abs(sym.darboux_inverse(w, p) - z)) < 1e-12


def test_darboux_needs_positive_lambda():
    with pytest.raises(NegativeLambda):
        sym.darboux_forward(np.zeros(8), Params(-1.0))


@given(vectors(8), params(positive=True))
def test_inverse_legendre_velocity(z, p):
    z = on_surface(z, p)
    vel, _ = sym.inverse_legendre(sym.darboux_forward(z, p), p)
    assert np.max(np.abs(vel - z[2:4])) < 1e-12
