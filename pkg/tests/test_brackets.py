from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given

from chiralosc import brackets as br
from chiralosc import hamiltonians as ham
from chiralosc.core import FULL_LABELS, DimensionMismatch, Params, SingularGramMatrix

from conftest import params, vectors
from oracles import dirac_matrix, dirac_table

LAMBDAS = [Fraction(1, 2), Fraction(1), Fraction(2), Fraction(-1)]


@pytest.mark.parametrize("lam", LAMBDAS)
def test_exact_oracle_matches_table(lam):
    D, C = dirac_matrix(lam)
    assert C[0][1] == -lam  # {phi_x, phi_y}
    table = dirac_table(lam)
    for i, a in enumerate(FULL_LABELS):
        for j, b in enumerate(FULL_LABELS):
            want = table.get((a, b), -table.get((b, a), Fraction(0)))
            assert D[i][j] == want, (a, b)


@pytest.mark.parametrize("lam", LAMBDAS)
def test_constructor_matches_exact_oracle(lam):
    p = Params(float(lam))
    D, _ = dirac_matrix(lam)
    built = br.dirac_bracket(p)(np.zeros(8))
    assert np.max(np.abs(built - np.array(D, float))) < 1e-12
    assert np.max(np.abs(built - br.dirac_bracket_closed_form(p)(np.zeros(8)))) < 1e-12


@given(vectors(8), params())
def test_constructor_independent_of_point(z, p):
    built = br.dirac_bracket_from_constraints(br.canonical_bracket(), br.chiral_constraints(p), z)
    assert np.max(np.abs(built - br.dirac_bracket(p)(z))) < 1e-12


def test_named_entries():
    P = br.dirac_bracket(Params(2.0))
    assert P.entry("xdot", "ydot") == pytest.approx(0.5, abs=1e-15)
    assert P.entry("xdot", "p1x") == pytest.approx(0.5, abs=1e-15)
    assert P.entry("p1x", "p1y") == pytest.approx(0.5, abs=1e-15)
    assert P.entry("ydot", "p1x") == 0.0
    assert P.entry("x", "y") == 0.0


def test_constraints_are_casimirs_of_dirac():
    p = Params(1.3, 0.7)
    P = br.dirac_bracket(p)
    for c in br.chiral_constraints(p).constraints:
        assert br.check_casimir(P, c, np.ones(8)) < 1e-12


def test_singular_gram_raises():
    p = Params()
    phi = br.chiral_constraints(p).constraints[0]
    with pytest.raises(SingularGramMatrix):
        br.dirac_bracket_from_constraints(br.canonical_bracket(), br.ConstraintSet((phi, phi)), np.zeros(8))


def test_gram_matrix_value():
    p = Params(0.8)
    C = br.gram_matrix(br.canonical_bracket(), br.chiral_constraints(p), np.zeros(8))
    assert np.allclose(C, [[0, -0.8], [0.8, 0]], atol=1e-15)


def _structures(p):
    return [br.canonical_bracket(p), br.dirac_bracket(p), br.osc_structure(p), br.se2_structure(), br.final_bracket(p)]


@given(params(positive=True))
def test_all_structures_poisson(p):
    rng = np.random.default_rng(0)
    for P in _structures(p):
        for z in rng.uniform(-2, 2, (20, P.dim)):
            assert br.check_antisymmetry(P, z) == 0.0
            assert br.check_jacobi(P, z) < 1e-9


def test_finite_difference_derivative_matches_analytic(rng):
    P = br.osc_structure(Params(0.7))
    fd = br.PoissonStructure("fd", 4, P.matrix_fn)
    z = rng.uniform(-2, 2, 4)
    assert np.max(np.abs(fd.derivative(z) - P.derivative(z))) < 1e-8


def test_corrupted_structure_fails_jacobi(rng):
    P = br.corrupted_osc_structure(Params())
    assert br.check_antisymmetry(P, rng.uniform(-2, 2, 4)) == 0.0
    worst = max(br.check_jacobi(P, z) for z in rng.uniform(-2, 2, (50, 4)))
    assert worst > 1e-3


def test_se2_matrix_form():
    M = br.se2_lie_poisson([0.3, 1.5, -2.0])
    assert np.array_equal(M, [[0, 2.0, 1.5], [-2.0, 0, 0], [-1.5, 0, 0]])


def test_osc_matrix_entries():
    M = br.osc_lie_poisson([9.0, 1.0, 2.0, 3.0], Params(2.0))
    assert M[0, 1] == 2.0 and M[0, 2] == -1.0 and M[1, 2] == 1.5
    assert np.all(M[3] == 0) and np.all(M[:, 3] == 0)


@given(vectors(4), params())
def test_osc_casimirs(s, p):
    s = s.copy()
    s[3] = abs(s[3])
    P = br.osc_structure(p)
    assert br.check_casimir(P, ham.lsq_reduced(), s) == 0.0


def test_final_bracket_charts():
    p = Params(2.0)
    D = br.final_bracket(p)(np.zeros(6))
    assert np.array_equal(D, br.canonical_matrix(3))
    V = br.final_bracket(p, "velocity")
    assert V.entry("xdot", "ydot") == pytest.approx(0.5)


def test_final_bracket_unknown_chart():
    with pytest.raises(ValueError):
        br.final_bracket(Params(), "polar")


def test_bracket_of_functions_dimension_check():
    with pytest.raises(DimensionMismatch):
        br.bracket_of_functions(br.canonical_bracket(), lambda z: z[0], lambda z: z[1], np.zeros(4))
    with pytest.raises(DimensionMismatch):
        br.bracket_of_functions(br.se2_structure(), ham.lsq_full(), ham.lsq_full(), np.zeros(3))


def test_bracket_of_coordinate_functions(rng):
    P = br.dirac_bracket(Params(0.5))
    z = rng.uniform(-2, 2, 8)
    f = lambda z: z[2]  # noqa: E731
    g = lambda z: z[3]  # noqa: E731
    assert br.bracket_of_functions(P, f, g, z) == pytest.approx(2.0, abs=1e-8)
