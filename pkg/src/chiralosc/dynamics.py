"""Hamiltonian vector fields, fixed-step integrators, closed-form solutions and reconstruction."""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass

import numpy as np

from . import brackets, hamiltonians, symmetry
from .core import (
    DARBOUX_LABELS,
    FULL_LABELS,
    P0,
    REDUCED_LABELS,
    DimensionMismatch,
    MomentumMismatch,
    NonConvergence,
    Params,
    RegularityWarning,
    ZeroMomentum,
    as_vector,
    cross,
)

CONFIG_LABELS = ("x", "y", "xdot", "ydot")


class Formulation(str, enum.Enum):
    CANONICAL_BRACKET_DIRAC_H = "canonical_bracket_dirac_h"
    DIRAC_BRACKET_CANONICAL_H = "dirac_bracket_canonical_h"
    DARBOUX_CANONICAL_H = "darboux_canonical_h"
    REDUCED_LIE_POISSON = "reduced_lie_poisson"

    @property
    def dim(self) -> int:
        return {"darboux_canonical_h": 6, "reduced_lie_poisson": 4}.get(self.value, 8)

    @property
    def labels(self) -> tuple[str, ...]:
        return {6: DARBOUX_LABELS, 4: REDUCED_LABELS}.get(self.dim, FULL_LABELS)

    @property
    def is_full(self) -> bool:
        return self.dim == 8


class Method(str, enum.Enum):
    RK4 = "rk4"
    IMPLICIT_MIDPOINT = "implicit_midpoint"


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    formulation: Formulation | None
    params: Params
    labels: tuple[str, ...] = ()

    def __post_init__(self):
        if len(self.times) != len(self.states):
            raise DimensionMismatch(f"{len(self.times)} times but {len(self.states)} states")
        if not self.labels and self.formulation is not None:
            object.__setattr__(self, "labels", self.formulation.labels)

    def __len__(self):
        return len(self.times)

    @property
    def dt(self) -> float:
        return float(self.times[1] - self.times[0]) if len(self.times) > 1 else 0.0

    def column(self, label: str) -> np.ndarray:
        return self.states[:, self.labels.index(label)]


def system(form: Formulation, params: Params):
    """(PoissonStructure, Hamiltonian) bound to a formulation."""
    form = Formulation(form)
    if form is Formulation.CANONICAL_BRACKET_DIRAC_H:
        return brackets.canonical_bracket(params), hamiltonians.dirac_hamiltonian(params)
    if form is Formulation.DIRAC_BRACKET_CANONICAL_H:
        return brackets.dirac_bracket(params), hamiltonians.canonical_hamiltonian(params)
    if form is Formulation.DARBOUX_CANONICAL_H:
        return brackets.final_bracket(params), hamiltonians.final_hamiltonian(params)
    return brackets.osc_structure(params), hamiltonians.reduced_hamiltonian(params)


def vector_field(form: Formulation, params: Params):
    """Fast callable y -> P(y) grad H(y) for repeated evaluation."""
    form = Formulation(form)
    P, H = system(form, params)
    if form is Formulation.REDUCED_LIE_POISSON:
        return lambda y: P(y) @ H.grad(y)
    M = P(np.zeros(P.dim))  # every full-space and Darboux structure here is constant
    return lambda y: M @ H.gradient_fn(y)


def rhs(form: Formulation, state, params: Params) -> np.ndarray:
    form = Formulation(form)
    y = np.asarray(state, dtype=float)
    if y.shape != (form.dim,):
        raise DimensionMismatch(f"{form.value} needs a state of dimension {form.dim}, got shape {y.shape}")
    P, H = system(form, params)
    return P(y) @ H.grad(y)


def _rk4_step(f, y, dt):
    k1 = f(y)
    k2 = f(y + dt / 2 * k1)
    k3 = f(y + dt / 2 * k2)
    k4 = f(y + dt * k3)
    return y + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)


def _midpoint_step(f, y, dt, tol=1e-13, max_iter=50):
    y1 = y + dt * f(y)
    for _ in range(max_iter):
        nxt = y + dt * f((y + y1) / 2)
        if np.max(np.abs(nxt - y1)) <= tol * max(1.0, np.max(np.abs(nxt))):
            return nxt
        y1 = nxt
    raise NonConvergence(f"implicit midpoint did not converge in {max_iter} iterations (dt={dt})")


def regularity_margins(form: Formulation, y, params: Params) -> tuple[float, float]:
    """(|p0|, |xdot cross p1|) at a state of the given formulation."""
    y = np.asarray(y, float)
    if form.is_full:
        return float(np.hypot(*y[P0])), float(abs(cross(y[2:4], y[6:8])))
    if form is Formulation.DARBOUX_CANONICAL_H:
        # on the surface xdot cross p1 = -(lam/2)|xdot|^2 = -(q^2 + p^2)/2
        return float(np.hypot(y[3], y[4])), float((y[2] ** 2 + y[5] ** 2) / 2)
    return float(np.sqrt(max(y[3], 0.0))), float(abs(y[0]))


def integrate(form, y0, params: Params, dt: float = 1e-3, t_end: float = 10.0, method="rk4") -> Trajectory:
    """Fixed-step integration on the uniform grid t_k = k*dt, k = 0..round(t_end/dt).

    Implicit midpoint iterates to a relative tolerance of 1e-13 (at most 50
    fixed-point sweeps).
    """
    form, method = Formulation(form), Method(method)
    y0 = np.asarray(y0, dtype=float)
    if y0.shape != (form.dim,):
        raise DimensionMismatch(f"{form.value} needs an initial state of dimension {form.dim}, got shape {y0.shape}")
    if not (dt > 0 and t_end > 0 and dt <= t_end):
        raise ValueError(f"need 0 < dt <= t_end, got dt={dt}, t_end={t_end}")
    p_norm, cross_norm = regularity_margins(form, y0, params)
    if form is not Formulation.REDUCED_LIE_POISSON and (p_norm < 1e-10 or cross_norm < 1e-10):
        warnings.warn(f"irregular initial state: |p0|={p_norm:.2e}, |xdot x p1|={cross_norm:.2e}", RegularityWarning)

    n = int(round(t_end / dt))
    f = vector_field(form, params)
    states = np.empty((n + 1, form.dim))
    states[0] = y0
    y = y0
    for k in range(n):
        y = _rk4_step(f, y, dt) if method is Method.RK4 else _midpoint_step(f, y, dt)
        states[k + 1] = y
    return Trajectory(dt * np.arange(n + 1), states, form, params)


# -- closed forms --------------------------------------------------------------

def _need_lsq(lsq):
    if np.any(np.asarray(lsq) <= 0):
        raise ZeroMomentum("closed-form solution needs l^2 > 0")


def analytic_constants(s0, params: Params) -> tuple[float, float]:
    """Amplitudes (A, B) of the closed-form solution through reduced state s0 at t = 0."""
    s0 = as_vector(s0, 4)
    return float(s0[1] - s0[3] / params.mass), float(s0[2])


def analytic_reduced(t, A: float, B: float, lsq: float, params: Params):
    """Closed-form (J_R, J_X, J_Y) on the paraboloid with amplitudes A, B."""
    _need_lsq(lsq)
    lam, m = params.lam, params.mass
    t = np.asarray(t, float)
    s, c = np.sin(m / lam * t), np.cos(m / lam * t)
    jy = A * s + B * c
    jx = -B * s + A * c + lsq / m
    jr = B * lam / m * s - A * lam / m * c - lam / (2 * lsq) * (A**2 + B**2) - lam * lsq / (2 * m**2)
    return jr, jx, jy


def _config_amplitudes(A, B, p0, params):
    p0 = np.asarray(p0, float)
    lsq = float(p0 @ p0)
    _need_lsq(lsq)
    k = params.lam / (params.mass * lsq)
    return k * (A * p0[0] - B * p0[1]), k * (B * p0[0] + A * p0[1]), lsq


def analytic_configuration(t, A: float, B: float, p0, C0, params: Params):
    """Closed-form position and velocity of the base curve.

    Velocity uses the algebraic inversion of (J_X^D, J_Y^D); it is the exact
    time derivative of the position formula.
    """
    A0, B0, lsq = _config_amplitudes(A, B, p0, params)
    p0, C0 = np.asarray(p0, float), np.asarray(C0, float)
    m, w = params.mass, params.omega
    t = np.asarray(t, float)
    s, c = np.sin(w * t), np.cos(w * t)
    pos = np.stack([A0 * s + B0 * c + p0[0] / m * t + C0[0], B0 * s - A0 * c + p0[1] / m * t + C0[1]], axis=-1)
    _, jx, jy = analytic_reduced(t, A, B, lsq, params)
    vel = np.stack([(p0[0] * jx - p0[1] * jy) / lsq, (p0[1] * jx + p0[0] * jy) / lsq], axis=-1)
    return pos, vel


def analytic_jet(t, A: float, B: float, p0, C0, params: Params):
    """(pos, vel, acc, jerk) of the closed-form base curve, differentiated by hand."""
    A0, B0, _ = _config_amplitudes(A, B, p0, params)
    pos, vel = analytic_configuration(t, A, B, p0, C0, params)
    w = params.omega
    t = np.asarray(t, float)
    s, c = np.sin(w * t), np.cos(w * t)
    acc = w**2 * np.stack([-A0 * s - B0 * c, -B0 * s + A0 * c], axis=-1)
    jerk = w**3 * np.stack([-A0 * c + B0 * s, -B0 * c - A0 * s], axis=-1)
    return pos, vel, acc, jerk


def analytic_full_state(t, A: float, B: float, p0, C0, params: Params) -> np.ndarray:
    """On-surface full state along the closed-form solution."""
    pos, vel = analytic_configuration(t, A, B, p0, C0, params)
    p0 = np.broadcast_to(np.asarray(p0, float), np.shape(pos))
    lam = params.lam
    p1 = np.stack([lam / 2 * vel[..., 1], -lam / 2 * vel[..., 0]], axis=-1)
    return np.concatenate([pos, vel, p0, p1], axis=-1)


# -- reduction and reconstruction ---------------------------------------------

class Triple(str, enum.Enum):
    CANONICAL = "canonical"
    DIRAC = "dirac"


def to_full_states(traj: Trajectory) -> np.ndarray:
    """Full-space samples of a full or Darboux trajectory."""
    if traj.formulation is Formulation.DARBOUX_CANONICAL_H:
        return symmetry.darboux_inverse(traj.states, traj.params)
    if traj.formulation is not None and traj.formulation.is_full:
        return traj.states
    raise DimensionMismatch(f"trajectory of {traj.formulation} has no full-space lift")


def project_full_to_reduced(traj: Trajectory, which="dirac", params: Params | None = None) -> Trajectory:
    params = params or traj.params
    z = to_full_states(traj)
    if np.any(np.hypot(z[:, 4], z[:, 5]) < 1e-10):
        raise ZeroMomentum("reduction needs p0 != 0 along the trajectory")
    if Triple(which) is Triple.CANONICAL:
        s = symmetry.invariants_canonical(z, params)
    else:
        s = symmetry.invariants_dirac(z, params)
    return Trajectory(traj.times.copy(), s, Formulation.REDUCED_LIE_POISSON, params)


def reduced_velocity(s, p0) -> np.ndarray:
    """Velocity from (J_X^D, J_Y^D) and the conserved linear momentum."""
    s = as_vector(s, 4)
    p0 = np.asarray(p0, float)
    lsq = float(p0 @ p0)
    jx, jy = s[..., 1], s[..., 2]
    return np.stack([(p0[0] * jx - p0[1] * jy) / lsq, (p0[1] * jx + p0[0] * jy) / lsq], axis=-1)


def reconstruct(reduced_traj: Trajectory, p0, x0) -> Trajectory:
    """Configuration curve (x, y, xdot, ydot) from a reduced trajectory.

    Velocities come algebraically from each reduced sample; positions are the
    cumulative corrected-trapezoid (Hermite) integral anchored at ``x0``.
    """
    if reduced_traj.formulation is not Formulation.REDUCED_LIE_POISSON:
        raise ValueError("reconstruct needs a reduced_lie_poisson trajectory")
    p0 = np.asarray(p0, float)
    lsq = float(p0 @ p0)
    if lsq <= 1e-20:
        raise ZeroMomentum("reconstruction needs p0 != 0")
    mismatch = np.max(np.abs(reduced_traj.states[:, 3] - lsq))
    if mismatch > 1e-10 * max(1.0, lsq):
        raise MomentumMismatch(f"|p0|^2 = {lsq} differs from reduced lsq by {mismatch:.3e}")
    vel = reduced_velocity(reduced_traj.states, p0)
    # velocity is linear in the reduced state, so its derivative is exact
    params = reduced_traj.params
    acc = reduced_velocity(np.array([rhs(Formulation.REDUCED_LIE_POISSON, s, params) for s in reduced_traj.states]), p0)
    dt = np.diff(reduced_traj.times)[:, None]
    steps = dt * (vel[1:] + vel[:-1]) / 2 + dt**2 / 12 * (acc[:-1] - acc[1:])
    pos = np.asarray(x0, float) + np.concatenate([np.zeros((1, 2)), np.cumsum(steps, axis=0)])
    return Trajectory(reduced_traj.times.copy(), np.hstack([pos, vel]), None, reduced_traj.params, CONFIG_LABELS)


def finite_difference_jet(traj: Trajectory):
    """(pos, vel, acc, jerk) of a configuration trajectory; acc and jerk by central differences of velocity.

    Drops two samples at each end, where one-sided stencils lose accuracy.
    """
    dt = traj.dt
    pos, vel = traj.states[:, :2], traj.states[:, 2:4]
    acc = (vel[2:] - vel[:-2]) / (2 * dt)
    jerk = (vel[2:] - 2 * vel[1:-1] + vel[:-2]) / dt**2
    return pos[1:-1], vel[1:-1], acc, jerk


# -- diagnostics ---------------------------------------------------------------

def conservation_summary(traj: Trajectory) -> dict[str, float]:
    """Max deviations from the initial value of the conserved quantities of a run."""
    params = traj.params
    out: dict[str, float] = {}
    form = traj.formulation
    if form is Formulation.REDUCED_LIE_POISSON:
        s = traj.states
        H = hamiltonians.reduced_hamiltonian(params)(s)
        cyl = hamiltonians.cylinder_casimir(params)(s)
        out["dH"] = float(np.max(np.abs(H - H[0])))
        out["dlsq"] = float(np.max(np.abs(s[:, 3] - s[0, 3])))
        out["dcylinder"] = float(np.max(np.abs(cyl - cyl[0])))
        out["paraboloid"] = float(np.max(np.abs(hamiltonians.paraboloid_function(params)(s))))
        return out
    _, H = system(form, params)
    h = H(traj.states)
    z = to_full_states(traj)
    mu = symmetry.momentum_map_full(z)[:, 0]
    out["dH"] = float(np.max(np.abs(h - h[0])))
    out["dmu"] = float(np.max(np.abs(mu - mu[0])))
    out["dp0"] = float(np.max(np.abs(z[:, P0] - z[0, P0])))
    out["max_phi"] = float(np.max(np.abs(brackets.constraint_values(z, params))))
    lsq = z[:, 4] ** 2 + z[:, 5] ** 2
    out["dlsq"] = float(np.max(np.abs(lsq - lsq[0])))
    return out
