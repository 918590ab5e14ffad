"""SE(2) action, its generators and lifts, momentum maps and invariant functions.

Two brackets of vector fields appear below and differ by a sign:

* :func:`lie_bracket` is the commutator of vector fields, ``[F, G] = DG.F - DF.G``.
* :func:`generator_bracket` is its negative.  Fundamental fields of a left
  action form an anti-homomorphism, so this sign reproduces the abstract
  se(2) table ``[R, X] = Y, [R, Y] = -X, [X, Y] = 0``.

The lifted fields generated through the Dirac bracket close under
:func:`lie_bracket` as ``[F_R, F_X] = -F_Y``, ``[F_R, F_Y] = F_X``,
``[F_X, F_Y] = -F_l``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .core import (
    P0,
    P1,
    POS,
    VEL,
    DarbouxState,
    DimensionMismatch,
    FullState,
    Params,
    ReducedState,
    Vec2,
    as_vector,
    cross,
    dot,
)
from .hamiltonians import ScalarField


def _perp(a):
    return np.stack([a[..., 1], -a[..., 0]], axis=-1)


def rotation(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


@dataclass(frozen=True)
class GroupElement:
    """Rotation by ``theta`` followed by translation by ``a``."""

    theta: float = 0.0
    a: Vec2 = Vec2()

    def compose(self, other: "GroupElement") -> "GroupElement":
        """self * other, i.e. apply ``other`` first."""
        t = rotation(self.theta) @ np.asarray(other.a) + np.asarray(self.a)
        return GroupElement(self.theta + other.theta, Vec2(*t))


def act_on_plane(g: GroupElement, x) -> np.ndarray:
    x = np.asarray(x, float)
    return x @ rotation(g.theta).T + np.asarray(g.a)


def act_on_jet(g: GroupElement, pos, vel, acc):
    """Prolonged action on a second jet: positions move, derivatives only rotate."""
    R = rotation(g.theta)
    return act_on_plane(g, pos), np.asarray(vel, float) @ R.T, np.asarray(acc, float) @ R.T


def act_on_full(g: GroupElement, z) -> np.ndarray:
    """Lifted action on T*TM: rotate every vector, translate the position."""
    z = as_vector(z, 8)
    R = rotation(g.theta)
    out = np.empty_like(z)
    out[..., POS] = act_on_plane(g, z[..., POS])
    for sl in (VEL, P0, P1):
        out[..., sl] = z[..., sl] @ R.T
    return out


# -- vector fields -----------------------------------------------------------

@dataclass(frozen=True)
class VectorField:
    name: str
    dim: int
    value_fn: Callable[[np.ndarray], np.ndarray]
    jacobian_fn: Callable[[np.ndarray], np.ndarray] | None = None

    def __call__(self, z) -> np.ndarray:
        return self.value_fn(as_vector(z, self.dim))

    def jacobian(self, z) -> np.ndarray:
        z = as_vector(z, self.dim)
        if self.jacobian_fn is not None:
            return self.jacobian_fn(z)
        h = 1e-6 * np.maximum(1.0, np.abs(z))
        cols = []
        for i in range(self.dim):
            e = np.zeros(self.dim)
            e[i] = h[i]
            cols.append((self.value_fn(z + e) - self.value_fn(z - e)) / (2 * h[i]))
        return np.stack(cols, axis=-1)


def linear_field(name: str, fn: Callable[[np.ndarray], np.ndarray], dim: int) -> VectorField:
    """Wrap a field that is affine in z; its Jacobian is read off exactly from basis vectors."""
    base = fn(np.zeros(dim))
    A = np.stack([fn(np.eye(dim)[i]) - base for i in range(dim)], axis=-1)
    A.setflags(write=False)
    return VectorField(name, dim, fn, lambda z: A)


def lie_bracket(F: VectorField, G: VectorField, z) -> np.ndarray:
    """Vector-field commutator [F, G](z) = DG(z) F(z) - DF(z) G(z)."""
    if F.dim != G.dim:
        raise DimensionMismatch(f"{F.name} has dim {F.dim}, {G.name} has dim {G.dim}")
    z = as_vector(z, F.dim)
    return G.jacobian(z) @ F(z) - F.jacobian(z) @ G(z)


def generator_bracket(F: VectorField, G: VectorField, z) -> np.ndarray:
    """Lie algebra bracket of fundamental fields of a left action: -[F, G]."""
    return -lie_bracket(F, G, z)


def _unit(dim, i):
    def fn(z):
        out = np.zeros(np.shape(z))
        out[..., i] = 1.0
        return out

    return fn


def generators_plane() -> tuple[VectorField, VectorField, VectorField]:
    """R = x d/dy - y d/dx, X = d/dx, Y = d/dy on M."""

    def R(z):
        return np.stack([-z[..., 1], z[..., 0]], axis=-1)

    return linear_field("R", R, 2), linear_field("X", _unit(2, 0), 2), linear_field("Y", _unit(2, 1), 2)


def tangent_lifts() -> tuple[VectorField, VectorField, VectorField]:
    """Lifts to TM in coordinates (x, y, xdot, ydot)."""

    def R(z):
        return np.stack([-z[..., 1], z[..., 0], -z[..., 3], z[..., 2]], axis=-1)

    return linear_field("R_TM", R, 4), linear_field("X_TM", _unit(4, 0), 4), linear_field("Y_TM", _unit(4, 1), 4)


def cotangent_lifts(params: Params | None = None) -> tuple[VectorField, VectorField, VectorField]:
    """Cotangent lifts of the tangent lifts to T*TM."""

    def R(z):
        out = np.empty(np.shape(z))
        for sl in (POS, VEL, P0, P1):
            out[..., sl] = -_perp(z[..., sl])
        return out

    return linear_field("R_T*TM", R, 8), linear_field("X_T*TM", _unit(8, 0), 8), linear_field("Y_T*TM", _unit(8, 1), 8)


def dirac_lift_fields(params: Params) -> tuple[VectorField, VectorField, VectorField, VectorField]:
    """Hamiltonian fields P_D grad J of (J_R^D, J_X^D, J_Y^D, l^2/lam) on T*TM.

    The p1 components keep each field tangent to the constraint surface; the
    remaining components are exactly the (x, xdot, p0) expressions usually
    quoted for these lifts (see :func:`dirac_lift_printed`).
    """
    lam = params.lam

    def FR(z):
        v = z[..., VEL]
        out = np.zeros(np.shape(z))
        out[..., VEL] = -_perp(v)
        out[..., P1] = lam / 2 * v
        return out

    def FX(z):
        v, p0 = z[..., VEL], z[..., P0]
        out = np.zeros(np.shape(z))
        out[..., POS] = v
        out[..., VEL] = _perp(p0) / lam
        out[..., P1] = -p0 / 2
        return out

    def FY(z):
        v, p0 = z[..., VEL], z[..., P0]
        out = np.zeros(np.shape(z))
        out[..., POS] = _perp(v)
        out[..., VEL] = p0 / lam
        out[..., P1] = _perp(p0) / 2
        return out

    def FL(z):
        out = np.zeros(np.shape(z))
        out[..., POS] = 2 / lam * z[..., P0]
        return out

    return (
        linear_field("F_R", FR, 8),
        linear_field("F_X", FX, 8),
        linear_field("F_Y", FY, 8),
        linear_field("F_lsq/lam", FL, 8),
    )


def dirac_lift_printed(z, params: Params) -> np.ndarray:
    """Quoted component forms of F_R, F_X, F_Y, F_l on (x, y, xdot, ydot, p0x, p0y).

    Returns an array of shape (4, 6) for a single point.
    """
    z = as_vector(z, 8)
    lam = params.lam
    x_, y_, vx, vy, px, py = z[:6]
    del x_, y_
    return np.array(
        [
            [0, 0, -vy, vx, 0, 0],
            [vx, vy, py / lam, -px / lam, 0, 0],
            [vy, -vx, px / lam, py / lam, 0, 0],
            [2 / lam * px, 2 / lam * py, 0, 0, 0, 0],
        ]
    )


# -- momentum maps -----------------------------------------------------------

def momentum_map_full(z) -> np.ndarray:
    """(mu, p0x, p0y) with mu = x cross p0 + xdot cross p1."""
    z = as_vector(z, 8)
    mu = cross(z[..., POS], z[..., P0]) + cross(z[..., VEL], z[..., P1])
    return np.concatenate([mu[..., None], z[..., P0]], axis=-1)


def angular_momentum() -> ScalarField:
    def grad(z):
        g = np.empty_like(z)
        g[..., POS] = _perp(z[..., P0])
        g[..., VEL] = _perp(z[..., P1])
        g[..., P0] = -_perp(z[..., POS])
        g[..., P1] = -_perp(z[..., VEL])
        return g

    return ScalarField("mu", 8, lambda z: momentum_map_full(z)[..., 0], grad)


def linear_momentum(i: int) -> ScalarField:
    def grad(z):
        g = np.zeros_like(z)
        g[..., 4 + i] = 1.0
        return g

    return ScalarField(f"p0{'xy'[i]}", 8, lambda z: z[..., 4 + i], grad)


def momentum_map_cotangent_plane(x, p0) -> np.ndarray:
    """(x cross p0, p0x, p0y) on T*M."""
    x, p0 = np.asarray(x, float), np.asarray(p0, float)
    return np.concatenate([cross(x, p0)[..., None], p0], axis=-1)


def momentum_map_plane(x) -> np.ndarray:
    """(|x|^2/2, y, -x) for the action on (R^2, dx^dy)."""
    x = np.asarray(x, float)
    return np.stack([dot(x, x) / 2, x[..., 1], -x[..., 0]], axis=-1)


def plane_momentum_gradients(x) -> np.ndarray:
    """Rows: gradients of the three components of :func:`momentum_map_plane`."""
    x = np.asarray(x, float)
    return np.array([[x[0], x[1]], [0.0, 1.0], [-1.0, 0.0]])


def plane_bracket(grad_f, grad_g) -> float:
    """{f, g} for the area form dx^dy with {x, y} = 1."""
    return float(grad_f[0] * grad_g[1] - grad_f[1] * grad_g[0])


# Vector-field commutators of the plane generators in the basis (R, X, Y):
# [R, X] = -Y, [R, Y] = X, [X, Y] = 0.
VF_STRUCTURE = np.zeros((3, 3, 3))
VF_STRUCTURE[0, 1] = [0, 0, -1]
VF_STRUCTURE[1, 0] = [0, 0, 1]
VF_STRUCTURE[0, 2] = [0, 1, 0]
VF_STRUCTURE[2, 0] = [0, -1, 0]

BASIS = ("R", "X", "Y")


def cocycle_plane(a: str, b: str, point=(0.3, -0.7)) -> float:
    """Theta(a, b) = {J_a, J_b} - J_[a,b] for the plane momentum map.

    The commutator in J_[a,b] is that of the generating vector fields; with
    this convention the value does not depend on ``point``.
    """
    i, j = BASIS.index(a), BASIS.index(b)
    grads = plane_momentum_gradients(point)
    J = momentum_map_plane(point)
    return plane_bracket(grads[i], grads[j]) - float(VF_STRUCTURE[i, j] @ J)


def cocycle_matrix_plane(point=(0.3, -0.7)) -> np.ndarray:
    return np.array([[cocycle_plane(a, b, point) for b in BASIS] for a in BASIS])


def cocycle_full(z, params: Params):
    """Theta on T*TM: the Casimir l^2/lam."""
    z = as_vector(z, 8)
    return dot(z[..., P0], z[..., P0]) / params.lam


def cocycle_value(z=None, params: Params | None = None):
    """Plane realization (no arguments) gives Theta(X, Y) = 1; with a full state gives l^2/lam."""
    if z is None:
        return cocycle_plane("X", "Y")
    if params is None:
        raise TypeError("the full realization needs params")
    return cocycle_full(z, params)


# -- invariant triples -------------------------------------------------------

def _wrap(src, out):
    if isinstance(src, FullState):
        return ReducedState.unflatten(out)
    return out


def invariants_canonical(z, params: Params):
    """(J_R, J_X, J_Y, l^2) built from xdot, p0, p1."""
    src = z
    z = as_vector(z, 8)
    lam = params.lam
    v, p0, p1 = z[..., VEL], z[..., P0], z[..., P1]
    out = np.stack(
        [
            cross(v, p1),
            dot(v, p0) / 2 - cross(p0, p1) / lam,
            -cross(v, p0) / 2 + dot(p0, p1) / lam,
            dot(p0, p0),
        ],
        axis=-1,
    )
    return _wrap(src, out)


def invariants_dirac(z, params: Params):
    """(J_R^D, J_X^D, J_Y^D, l^2) with p1 eliminated through the constraints."""
    src = z
    z = as_vector(z, 8)
    v, p0 = z[..., VEL], z[..., P0]
    out = np.stack([-params.lam / 2 * dot(v, v), dot(v, p0), -cross(v, p0), dot(p0, p0)], axis=-1)
    return _wrap(src, out)


def canonical_invariant_fields(params: Params) -> tuple[ScalarField, ScalarField, ScalarField]:
    lam = params.lam

    def f(i):
        return lambda z: invariants_canonical(z, params)[..., i]

    def gR(z):
        g = np.zeros_like(z)
        g[..., VEL] = _perp(z[..., P1])
        g[..., P1] = -_perp(z[..., VEL])
        return g

    def gX(z):
        v, p0, p1 = z[..., VEL], z[..., P0], z[..., P1]
        g = np.zeros_like(z)
        g[..., VEL] = p0 / 2
        g[..., P0] = v / 2 - _perp(p1) / lam
        g[..., P1] = _perp(p0) / lam
        return g

    def gY(z):
        v, p0, p1 = z[..., VEL], z[..., P0], z[..., P1]
        g = np.zeros_like(z)
        g[..., VEL] = -_perp(p0) / 2
        g[..., P0] = _perp(v) / 2 + p1 / lam
        g[..., P1] = p0 / lam
        return g

    return ScalarField("J_R", 8, f(0), gR), ScalarField("J_X", 8, f(1), gX), ScalarField("J_Y", 8, f(2), gY)


def dirac_invariant_fields(params: Params) -> tuple[ScalarField, ScalarField, ScalarField]:
    lam = params.lam

    def f(i):
        return lambda z: invariants_dirac(z, params)[..., i]

    def gR(z):
        g = np.zeros_like(z)
        g[..., VEL] = -lam * z[..., VEL]
        return g

    def gX(z):
        g = np.zeros_like(z)
        g[..., VEL] = z[..., P0]
        g[..., P0] = z[..., VEL]
        return g

    def gY(z):
        g = np.zeros_like(z)
        g[..., VEL] = -_perp(z[..., P0])
        g[..., P0] = _perp(z[..., VEL])
        return g

    return ScalarField("J_R^D", 8, f(0), gR), ScalarField("J_X^D", 8, f(1), gX), ScalarField("J_Y^D", 8, f(2), gY)


def lsq_over_lambda(params: Params) -> ScalarField:
    lam = params.lam

    def grad(z):
        g = np.zeros_like(z)
        g[..., P0] = 2 * z[..., P0] / lam
        return g

    return ScalarField("lsq/lam", 8, lambda z: dot(z[..., P0], z[..., P0]) / lam, grad)


# -- Darboux chart and inverse Legendre map ----------------------------------

def darboux_forward(z, params: Params):
    """z -> (x, y, q, p0x, p0y, p, phix, phiy) with q = sqrt(lam) ydot, p = -sqrt(lam) xdot.

    A bijection of the full eight dimensional space; lam must be positive.
    """
    src = z
    s = params.sqrt_lam
    z = as_vector(z, 8)
    lam = params.lam
    out = np.stack(
        [
            z[..., 0],
            z[..., 1],
            s * z[..., 3],
            z[..., 4],
            z[..., 5],
            -s * z[..., 2],
            z[..., 6] - lam * z[..., 3] / 2,
            z[..., 7] + lam * z[..., 2] / 2,
        ],
        axis=-1,
    )
    if isinstance(src, FullState):
        return DarbouxState.unflatten(out)
    return out


def darboux_jacobian(params: Params) -> np.ndarray:
    """Constant Jacobian dw/dz of :func:`darboux_forward`."""
    return np.stack([darboux_forward(e, params) for e in np.eye(8)], axis=-1)


def darboux_inverse(w, params: Params):
    """Inverse of :func:`darboux_forward`; a 6-vector is taken to lie on the surface (phi = 0)."""
    src = w
    s = params.sqrt_lam
    w = as_vector(w)
    if w.shape[-1] == 6:
        w = np.concatenate([w, np.zeros(w.shape[:-1] + (2,))], axis=-1)
    w = as_vector(w, 8)
    lam = params.lam
    vx, vy = -w[..., 5] / s, w[..., 2] / s
    out = np.stack(
        [w[..., 0], w[..., 1], vx, vy, w[..., 3], w[..., 4], w[..., 6] + lam * vy / 2, w[..., 7] - lam * vx / 2],
        axis=-1,
    )
    if isinstance(src, DarbouxState):
        return FullState.unflatten(out)
    return out


def inverse_legendre(w, params: Params):
    """Darboux point -> (velocity (xdot, ydot), qdot)."""
    s = params.sqrt_lam
    w = as_vector(w)
    if w.shape[-1] not in (6, 8):
        raise DimensionMismatch(f"Darboux point needs 6 or 8 coordinates, got {w.shape[-1]}")
    q, p0x, p = w[..., 2], w[..., 3], w[..., 5]
    vel = np.stack([-p / s, q / s], axis=-1)
    qdot = -p0x / s - params.mass / params.lam * p
    return vel, qdot
