"""Poisson structures of the chiral oscillator and numerical checks on them.

A Poisson matrix ``P`` defines ``{f, g}(z) = grad f(z)^T P(z) grad g(z)``.
All full-space matrices use the coordinate order of :data:`core.FULL_LABELS`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .core import (
    DARBOUX_LABELS,
    FULL_LABELS,
    REDUCED_LABELS,
    DimensionMismatch,
    Params,
    SingularGramMatrix,
    as_vector,
)
from .hamiltonians import ScalarField, fd_step, numerical_gradient

J2 = np.array([[0.0, 1.0], [-1.0, 0.0]])


@dataclass(frozen=True)
class PoissonStructure:
    name: str
    dim: int
    matrix_fn: Callable[[np.ndarray], np.ndarray]
    labels: tuple[str, ...] = ()
    # d[l, i, j] = dP_ij / dz_l at a single point
    dmatrix_fn: Callable[[np.ndarray], np.ndarray] | None = None

    def __call__(self, z) -> np.ndarray:
        return self.matrix_fn(as_vector(z, self.dim))

    def derivative(self, z) -> np.ndarray:
        z = as_vector(z, self.dim)
        if self.dmatrix_fn is not None:
            return self.dmatrix_fn(z)
        h = fd_step(z)
        d = np.empty((self.dim, self.dim, self.dim))
        for l in range(self.dim):
            e = np.zeros(self.dim)
            e[l] = h[l]
            d[l] = (self.matrix_fn(z + e) - self.matrix_fn(z - e)) / (2 * h[l])
        return d

    def entry(self, a: str, b: str, z=None) -> float:
        """Bracket {a, b} of two coordinate functions named by label."""
        z = np.zeros(self.dim) if z is None else z
        return float(self(z)[self.labels.index(a), self.labels.index(b)])


def constant_structure(name: str, matrix: np.ndarray, labels: Sequence[str]) -> PoissonStructure:
    matrix = np.array(matrix, dtype=float)
    matrix.setflags(write=False)
    n = matrix.shape[0]
    zero = np.zeros((n, n, n))

    def matrix_fn(z):
        return np.broadcast_to(matrix, z.shape[:-1] + (n, n)).copy()

    return PoissonStructure(name, n, matrix_fn, tuple(labels), lambda z: zero)


def canonical_matrix(n: int) -> np.ndarray:
    """[[0, I_n], [-I_n, 0]]: first n coordinates paired with the last n."""
    out = np.zeros((2 * n, 2 * n))
    out[:n, n:] = np.eye(n)
    out[n:, :n] = -np.eye(n)
    return out


def canonical_bracket(params: Params | None = None) -> PoissonStructure:
    """Canonical bracket on T*TM: x<->p0x, y<->p0y, xdot<->p1x, ydot<->p1y."""
    return constant_structure("P_C", canonical_matrix(4), FULL_LABELS)


# -- constraints and the Dirac construction ----------------------------------

@dataclass(frozen=True)
class ConstraintSet:
    constraints: tuple[ScalarField, ...]

    def values(self, z) -> np.ndarray:
        return np.array([c(z) for c in self.constraints])

    def gradients(self, z) -> np.ndarray:
        return np.array([c.grad(z) for c in self.constraints])


def chiral_constraints(params: Params) -> ConstraintSet:
    """phi_x = p1x - lam*ydot/2, phi_y = p1y + lam*xdot/2."""
    lam = params.lam

    def gx(z):
        g = np.zeros_like(z)
        g[..., 6] = 1.0
        g[..., 3] = -lam / 2
        return g

    def gy(z):
        g = np.zeros_like(z)
        g[..., 7] = 1.0
        g[..., 2] = lam / 2
        return g

    phix = ScalarField("phi_x", 8, lambda z: z[..., 6] - lam * z[..., 3] / 2, gx)
    phiy = ScalarField("phi_y", 8, lambda z: z[..., 7] + lam * z[..., 2] / 2, gy)
    return ConstraintSet((phix, phiy))


def constraint_values(z, params: Params) -> np.ndarray:
    """(phi_x, phi_y), broadcasting over a batch of full states."""
    z = as_vector(z, 8)
    lam = params.lam
    return np.stack([z[..., 6] - lam * z[..., 3] / 2, z[..., 7] + lam * z[..., 2] / 2], axis=-1)


def gram_matrix(base: PoissonStructure, cs: ConstraintSet, z) -> np.ndarray:
    z = as_vector(z, base.dim)
    G = cs.gradients(z)
    return G @ base(z) @ G.T


def dirac_bracket_from_constraints(base: PoissonStructure, cs: ConstraintSet, z) -> np.ndarray:
    """Dirac matrix P - (P G^T) C^{-1} (G P) at a single point z.

    Raises SingularGramMatrix when |det C| < 1e-12.
    """
    z = as_vector(z, base.dim)
    P = base(z)
    G = cs.gradients(z)
    C = G @ P @ G.T
    if abs(np.linalg.det(C)) < 1e-12:
        raise SingularGramMatrix(f"constraint Gram matrix is singular at z (det={np.linalg.det(C):.3e})")
    PG = P @ G.T
    D = P - PG @ np.linalg.solve(C, G @ P)
    # the correction is antisymmetric in exact arithmetic; remove rounding asymmetry
    return (D - D.T) / 2


def dirac_bracket(params: Params) -> PoissonStructure:
    """Dirac structure built by the generic constructor.

    The chiral constraints are linear, so the result is constant and is
    evaluated once at the origin.
    """
    D = dirac_bracket_from_constraints(canonical_bracket(params), chiral_constraints(params), np.zeros(8))
    return constant_structure("P_D", D, FULL_LABELS)


def dirac_bracket_closed_form(params: Params) -> PoissonStructure:
    """Dirac matrix assembled from the coordinate bracket table.

    Nonzero brackets: {x,p0x} = {y,p0y} = 1, {xdot,ydot} = 1/lam,
    {xdot,p1x} = {ydot,p1y} = 1/2, {p1x,p1y} = lam/4.
    """
    lam = params.lam
    ix = {name: i for i, name in enumerate(FULL_LABELS)}
    table = {
        ("x", "p0x"): 1.0,
        ("y", "p0y"): 1.0,
        ("xdot", "ydot"): 1.0 / lam,
        ("xdot", "p1x"): 0.5,
        ("ydot", "p1y"): 0.5,
        ("p1x", "p1y"): lam / 4,
    }
    P = np.zeros((8, 8))
    for (a, b), v in table.items():
        P[ix[a], ix[b]] = v
        P[ix[b], ix[a]] = -v
    return constant_structure("P_D_table", P, FULL_LABELS)


def final_bracket(params: Params, chart: str = "darboux") -> PoissonStructure:
    """Bracket on the six dimensional final constraint submanifold.

    ``chart="darboux"`` uses (x, y, q, p0x, p0y, p) and is canonical;
    ``chart="velocity"`` uses (x, y, xdot, p0x, p0y, ydot) where
    {xdot, ydot} = 1/lam.
    """
    if chart == "darboux":
        return constant_structure("P_f", canonical_matrix(3), DARBOUX_LABELS)
    if chart == "velocity":
        P = np.zeros((6, 6))
        P[0, 3] = P[1, 4] = 1.0
        P[2, 5] = 1.0 / params.lam
        return constant_structure("P_f_velocity", P - P.T, ("x", "y", "xdot", "p0x", "p0y", "ydot"))
    raise ValueError(f"unknown chart {chart!r}")


# -- Lie-Poisson structures ---------------------------------------------------

def se2_lie_poisson(mu_p) -> np.ndarray:
    """se(2)* matrix in coordinates (mu, p0x, p0y)."""
    mu_p = as_vector(mu_p, 3)
    px, py = mu_p[..., 1], mu_p[..., 2]
    out = np.zeros(mu_p.shape[:-1] + (3, 3))
    out[..., 0, 1], out[..., 0, 2] = -py, px
    out[..., 1, 0], out[..., 2, 0] = py, -px
    return out


_SE2_D = np.zeros((3, 3, 3))
_SE2_D[2, 0, 1], _SE2_D[2, 1, 0] = -1.0, 1.0
_SE2_D[1, 0, 2], _SE2_D[1, 2, 0] = 1.0, -1.0


def se2_structure() -> PoissonStructure:
    return PoissonStructure("se2*", 3, se2_lie_poisson, ("mu", "p0x", "p0y"), lambda z: _SE2_D)


def osc_lie_poisson(s, params: Params) -> np.ndarray:
    """osc* matrix in (jr, jx, jy, lsq): {jr,jx} = jy, {jr,jy} = -jx, {jx,jy} = lsq/lam."""
    s = as_vector(s, 4)
    jx, jy, c = s[..., 1], s[..., 2], s[..., 3] / params.lam
    out = np.zeros(s.shape[:-1] + (4, 4))
    out[..., 0, 1], out[..., 1, 0] = jy, -jy
    out[..., 0, 2], out[..., 2, 0] = -jx, jx
    out[..., 1, 2], out[..., 2, 1] = c, -c
    return out


def osc_structure(params: Params) -> PoissonStructure:
    d = np.zeros((4, 4, 4))
    d[2, 0, 1], d[2, 1, 0] = 1.0, -1.0
    d[1, 0, 2], d[1, 2, 0] = -1.0, 1.0
    d[3, 1, 2], d[3, 2, 1] = 1.0 / params.lam, -1.0 / params.lam
    return PoissonStructure("osc*", 4, lambda s: osc_lie_poisson(s, params), REDUCED_LABELS, lambda s: d)


def osc_block_structure(params: Params, lsq: float) -> PoissonStructure:
    """The 3x3 (jr, jx, jy) block of osc* on a fixed level set of lsq."""

    def matrix_fn(j):
        s = np.concatenate([j, np.broadcast_to(lsq, j.shape[:-1] + (1,))], axis=-1)
        return osc_lie_poisson(s, params)[..., :3, :3]

    return PoissonStructure("osc*_block", 3, matrix_fn, REDUCED_LABELS[:3])


def corrupted_osc_structure(params: Params) -> PoissonStructure:
    """Negative control: {jr, jx} replaced by jx*jy, antisymmetry kept.

    Squaring that entry would not break Jacobi in three dimensions, so the
    product with jx is used instead.
    """

    def matrix_fn(s):
        P = osc_lie_poisson(s, params)
        v = s[..., 1] * s[..., 2]
        P[..., 0, 1], P[..., 1, 0] = v, -v
        return P

    return PoissonStructure("osc*_corrupted", 4, matrix_fn, REDUCED_LABELS)


# -- evaluation and checks ---------------------------------------------------

def _gradient(f, z, dim):
    if isinstance(f, ScalarField):
        if f.dim != dim:
            raise DimensionMismatch(f"function {f.name} has dim {f.dim}, structure has dim {dim}")
        return f.grad(z)
    return numerical_gradient(f, z)


def bracket_of_functions(P: PoissonStructure, f, g, z) -> float:
    """{f, g}(z) = grad f^T P grad g; plain callables get central-difference gradients."""
    z = np.asarray(z, dtype=float)
    if z.shape != (P.dim,):
        raise DimensionMismatch(f"point has shape {z.shape}, structure {P.name} has dim {P.dim}")
    return float(_gradient(f, z, P.dim) @ P(z) @ _gradient(g, z, P.dim))


def check_antisymmetry(P: PoissonStructure, z) -> float:
    M = P(z)
    return float(np.max(np.abs(M + np.swapaxes(M, -1, -2))))


def jacobi_tensor(P: PoissonStructure, z) -> np.ndarray:
    """Cyclic sum sum_l P_il d_l P_jk + P_jl d_l P_ki + P_kl d_l P_ij for all i, j, k."""
    z = as_vector(z, P.dim)
    M = P(z)
    d = P.derivative(z)
    T = np.einsum("il,ljk->ijk", M, d)
    return T + np.transpose(T, (1, 2, 0)) + np.transpose(T, (2, 0, 1))


def check_jacobi(P: PoissonStructure, z) -> float:
    """Max absolute Jacobi cyclic sum at z."""
    return float(np.max(np.abs(jacobi_tensor(P, z))))


def check_casimir(P: PoissonStructure, c, z) -> float:
    """max |P(z) grad c(z)|; zero iff c is a Casimir at z."""
    z = as_vector(z, P.dim)
    return float(np.max(np.abs(P(z) @ _gradient(c, z, P.dim))))
