"""Lagrangian, energy, Hamiltonians and Casimirs of the chiral oscillator.

Every function here is a polynomial of degree two at most, so gradients are
hand-coded.  Each field accepts a single state or a batch stacked along the
leading axes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .core import P0, P1, VEL, Params, ZeroMomentum, as_vector, cross, dot


@dataclass(frozen=True)
class ScalarField:
    name: str
    dim: int
    value_fn: Callable[[np.ndarray], np.ndarray]
    gradient_fn: Callable[[np.ndarray], np.ndarray] | None = None

    def __call__(self, z):
        return self.value_fn(as_vector(z, self.dim))

    def grad(self, z) -> np.ndarray:
        z = as_vector(z, self.dim)
        if self.gradient_fn is None:
            return numerical_gradient(self.value_fn, z)
        return self.gradient_fn(z)


def fd_step(z: np.ndarray) -> np.ndarray:
    return 1e-6 * np.maximum(1.0, np.abs(z))


def numerical_gradient(fn, z) -> np.ndarray:
    """Central differences with step 1e-6*max(1, |z_i|); single point only."""
    z = np.asarray(z, dtype=float)
    h = fd_step(z)
    g = np.empty_like(z)
    for i in range(z.size):
        e = np.zeros_like(z)
        e[i] = h[i]
        g[i] = (fn(z + e) - fn(z - e)) / (2 * h[i])
    return g


def _perp(a):
    # gradient of cross(a, b) with respect to a is perp(b)
    return np.stack([a[..., 1], -a[..., 0]], axis=-1)


# -- Lagrangian side ---------------------------------------------------------

def lagrangian(vel, acc, params: Params):
    """-(lam/2)(xdot*yddot - ydot*xddot) + (m/2)|xdot|^2."""
    vel, acc = np.asarray(vel, float), np.asarray(acc, float)
    return -params.lam / 2 * cross(vel, acc) + params.mass / 2 * dot(vel, vel)


def energy(vel, acc, params: Params):
    """Energy function E_L; it equals H^C under the Legendre map."""
    vel, acc = np.asarray(vel, float), np.asarray(acc, float)
    return -params.lam * cross(vel, acc) + params.mass / 2 * dot(vel, vel)


def el_residual(jet, params: Params) -> np.ndarray:
    """Euler-Lagrange residuals (lam*y''' - m*x'', -lam*x''' - m*y'').

    ``jet`` is ``(pos, vel, acc, jerk)``; position is unused but accepted so
    callers can pass a full third jet.
    """
    _, _, acc, jerk = (np.asarray(v, float) for v in jet)
    lam, m = params.lam, params.mass
    return np.stack(
        [lam * jerk[..., 1] - m * acc[..., 0], -lam * jerk[..., 0] - m * acc[..., 1]], axis=-1
    )


def ostrogradskii_momenta(vel, acc, params: Params):
    """Legendre map (vel, acc) -> (p0, p1)."""
    vel, acc = np.asarray(vel, float), np.asarray(acc, float)
    lam, m = params.lam, params.mass
    p0 = np.stack([-lam * acc[..., 1] + m * vel[..., 0], lam * acc[..., 0] + m * vel[..., 1]], axis=-1)
    p1 = np.stack([lam / 2 * vel[..., 1], -lam / 2 * vel[..., 0]], axis=-1)
    return p0, p1


# -- full-space Hamiltonians -------------------------------------------------

def canonical_hamiltonian(params: Params) -> ScalarField:
    m = params.mass

    def value(z):
        v, p0 = z[..., VEL], z[..., P0]
        return dot(v, p0) - m / 2 * dot(v, v)

    def grad(z):
        g = np.zeros_like(z)
        g[..., VEL] = z[..., P0] - m * z[..., VEL]
        g[..., P0] = z[..., VEL]
        return g

    return ScalarField("H_canonical", 8, value, grad)


def dirac_hamiltonian(params: Params) -> ScalarField:
    """Total Hamiltonian from the constraint analysis; drives the canonical bracket."""
    lam, m = params.lam, params.mass

    def value(z):
        v, p0, p1 = z[..., VEL], z[..., P0], z[..., P1]
        return 0.5 * dot(v, p0) + m / lam * cross(v, p1) - cross(p0, p1) / lam

    def grad(z):
        v, p0, p1 = z[..., VEL], z[..., P0], z[..., P1]
        g = np.zeros_like(z)
        g[..., VEL] = 0.5 * p0 + m / lam * _perp(p1)
        g[..., P0] = 0.5 * v - _perp(p1) / lam
        g[..., P1] = -(m / lam) * _perp(v) + _perp(p0) / lam
        return g

    return ScalarField("H_dirac", 8, value, grad)


def final_hamiltonian(params: Params) -> ScalarField:
    """H_f on the Darboux chart (x, y, q, p0x, p0y, p)."""
    lam, m = params.lam, params.mass
    s = params.sqrt_lam

    def value(w):
        q, p0x, p0y, p = w[..., 2], w[..., 3], w[..., 4], w[..., 5]
        return (q * p0y - p * p0x) / s - m / (2 * lam) * (q**2 + p**2)

    def grad(w):
        q, p0x, p0y, p = w[..., 2], w[..., 3], w[..., 4], w[..., 5]
        g = np.zeros_like(w)
        g[..., 2] = p0y / s - m / lam * q
        g[..., 3] = -p / s
        g[..., 4] = q / s
        g[..., 5] = -p0x / s - m / lam * p
        return g

    return ScalarField("H_final", 6, value, grad)


def h_canonical(z, params: Params):
    return canonical_hamiltonian(params)(z)


def h_dirac(z, params: Params):
    return dirac_hamiltonian(params)(z)


def h_final(w, params: Params):
    w = as_vector(w)
    return final_hamiltonian(params)(w[..., :6])


# -- reduced-space functions -------------------------------------------------

def reduced_hamiltonian(params: Params, name: str = "H_red") -> ScalarField:
    """(m/lam) J_R + J_X on (jr, jx, jy, lsq); same formula for both invariant triples."""
    c = params.mass / params.lam

    def value(s):
        return c * s[..., 0] + s[..., 1]

    def grad(s):
        g = np.zeros_like(s)
        g[..., 0] = c
        g[..., 1] = 1.0
        return g

    return ScalarField(name, 4, value, grad)


def h_reduced_dirac(s, params: Params):
    return reduced_hamiltonian(params, "H_red_dirac")(s)


def h_reduced_canonical(s, params: Params):
    return reduced_hamiltonian(params, "H_red_canonical")(s)


def casimir_lsq(p0):
    """|p0|^2."""
    p0 = np.asarray(p0, float)
    return dot(p0, p0)


def lsq_full() -> ScalarField:
    def grad(z):
        g = np.zeros_like(z)
        g[..., P0] = 2 * z[..., P0]
        return g

    return ScalarField("lsq_full", 8, lambda z: dot(z[..., P0], z[..., P0]), grad)


def lsq_reduced() -> ScalarField:
    def grad(s):
        g = np.zeros_like(s)
        g[..., 3] = 1.0
        return g

    return ScalarField("lsq_reduced", 4, lambda s: s[..., 3], grad)


def cylinder_casimir(params: Params) -> ScalarField:
    """(J_X - l^2/m)^2 + J_Y^2, conserved by the reduced flow."""
    m = params.mass

    def value(s):
        return (s[..., 1] - s[..., 3] / m) ** 2 + s[..., 2] ** 2

    def grad(s):
        u = s[..., 1] - s[..., 3] / m
        g = np.zeros_like(s)
        g[..., 1] = 2 * u
        g[..., 2] = 2 * s[..., 2]
        g[..., 3] = -2 * u / m
        return g

    return ScalarField("casimir_cylinder", 4, value, grad)


def casimir_cylinder(s, params: Params):
    return cylinder_casimir(params)(s)


def printed_casimir(params: Params) -> ScalarField:
    """J_X^2 - 2 m l^2 J_X + J_Y^2 as first printed; conserved only when m = +-1.

    Kept as a negative control for the verification report.
    """
    m = params.mass

    def value(s):
        return s[..., 1] ** 2 - 2 * m * s[..., 3] * s[..., 1] + s[..., 2] ** 2

    def grad(s):
        g = np.zeros_like(s)
        g[..., 1] = 2 * s[..., 1] - 2 * m * s[..., 3]
        g[..., 2] = 2 * s[..., 2]
        g[..., 3] = -2 * m * s[..., 1]
        return g

    return ScalarField("casimir_printed", 4, value, grad)


def paraboloid_function(params: Params) -> ScalarField:
    """J_X^2 + J_Y^2 + (2 l^2/lam) J_R; its zero set holds the Dirac invariants."""
    lam = params.lam

    def value(s):
        return s[..., 1] ** 2 + s[..., 2] ** 2 + 2 * s[..., 3] / lam * s[..., 0]

    def grad(s):
        g = np.empty_like(s)
        g[..., 0] = 2 * s[..., 3] / lam
        g[..., 1] = 2 * s[..., 1]
        g[..., 2] = 2 * s[..., 2]
        g[..., 3] = 2 * s[..., 0] / lam
        return g

    return ScalarField("paraboloid", 4, value, grad)


def h_orbit(jx, jy, lsq, params: Params):
    """Reduced Hamiltonian restricted to a coadjoint orbit (J_R eliminated)."""
    lsq = np.asarray(lsq, float)
    if np.any(lsq <= 0):
        raise ZeroMomentum("h_orbit needs lsq > 0")
    jx, jy = np.asarray(jx, float), np.asarray(jy, float)
    return -params.mass / (2 * lsq) * (jx**2 + jy**2) + jx
