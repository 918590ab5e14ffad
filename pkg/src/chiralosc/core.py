"""Parameters, plane vectors, phase-space states and the shared error types.

Flattened coordinate orders used throughout the package:

* full Ostrogradskii space: ``(x, y, xdot, ydot, p0x, p0y, p1x, p1y)``
* Darboux chart: ``(x, y, q, p0x, p0y, p)`` followed by ``(phix, phiy)``
* reduced space: ``(jr, jx, jy, lsq)``
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields

import numpy as np

FULL_LABELS = ("x", "y", "xdot", "ydot", "p0x", "p0y", "p1x", "p1y")
DARBOUX_LABELS = ("x", "y", "q", "p0x", "p0y", "p")
DARBOUX_FULL_LABELS = DARBOUX_LABELS + ("phix", "phiy")
REDUCED_LABELS = ("jr", "jx", "jy", "lsq")

# slices into a flat full state
POS = slice(0, 2)
VEL = slice(2, 4)
P0 = slice(4, 6)
P1 = slice(6, 8)


class ChiralError(Exception):
    """Base class for errors raised by this package."""


class DimensionMismatch(ChiralError, ValueError):
    pass


class SingularGramMatrix(ChiralError, ArithmeticError):
    """Constraint Gram matrix is not invertible, so the constraints are not second class."""


class NegativeLambda(ChiralError, ValueError):
    """The Darboux chart needs sqrt(lambda)."""


class ZeroMomentum(ChiralError, ValueError):
    """Linear momentum vanishes; reduction is singular there."""


class MomentumMismatch(ChiralError, ValueError):
    pass


class NonConvergence(ChiralError, ArithmeticError):
    pass


class RegularityWarning(UserWarning):
    """Initial data violates p0 != 0 or xdot x p1 != 0."""


@dataclass(frozen=True)
class Params:
    """Chirality coefficient ``lam`` and mass ``mass`` of the oscillator."""

    lam: float = 1.0
    mass: float = 1.0

    def __post_init__(self):
        for name in ("lam", "mass"):
            v = getattr(self, name)
            if not math.isfinite(v) or v == 0.0:
                raise ValueError(f"{name} must be finite and nonzero, got {v!r}")
        object.__setattr__(self, "lam", float(self.lam))
        object.__setattr__(self, "mass", float(self.mass))

    @property
    def omega(self) -> float:
        """Angular frequency m/lambda of the internal rotation."""
        return self.mass / self.lam

    @property
    def sqrt_lam(self) -> float:
        if self.lam <= 0:
            raise NegativeLambda(f"Darboux chart requires lambda > 0, got {self.lam}")
        return math.sqrt(self.lam)


@dataclass(frozen=True)
class Vec2:
    x: float = 0.0
    y: float = 0.0

    def __array__(self, dtype=None, copy=None):
        return np.array([self.x, self.y], dtype=dtype or float)

    def __iter__(self):
        yield self.x
        yield self.y


def cross(a, b):
    """Scalar 2D cross product a.x*b.y - a.y*b.x (broadcasts over leading axes)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


def dot(a, b):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return a[..., 0] * b[..., 0] + a[..., 1] * b[..., 1]


class _FlatState:
    """Mixin: a frozen dataclass of Vec2/float fields that flattens to a vector."""

    def __array__(self, dtype=None, copy=None):
        return np.array(self.flatten(), dtype=dtype or float)

    def flatten(self) -> np.ndarray:
        out = []
        for f in fields(self):
            v = getattr(self, f.name)
            if isinstance(v, Vec2):
                out.extend((v.x, v.y))
            else:
                out.append(v)
        return np.array(out, dtype=float)

    @classmethod
    def unflatten(cls, v):
        v = np.asarray(v, dtype=float)
        n = sum(2 if f.type in ("Vec2", Vec2) else 1 for f in fields(cls))
        if v.shape != (n,):
            raise DimensionMismatch(f"{cls.__name__} needs {n} coordinates, got shape {v.shape}")
        kwargs, i = {}, 0
        for f in fields(cls):
            if f.type in ("Vec2", Vec2):
                kwargs[f.name] = Vec2(float(v[i]), float(v[i + 1]))
                i += 2
            else:
                kwargs[f.name] = float(v[i])
                i += 1
        return cls(**kwargs)


@dataclass(frozen=True)
class FullState(_FlatState):
    """Point (x, xdot, p0, p1) of the eight dimensional Ostrogradskii phase space."""

    pos: Vec2 = Vec2()
    vel: Vec2 = Vec2()
    p0: Vec2 = Vec2()
    p1: Vec2 = Vec2()


@dataclass(frozen=True)
class DarbouxState(_FlatState):
    pos: Vec2 = Vec2()
    q: float = 0.0
    p0: Vec2 = Vec2()
    p: float = 0.0
    phi: Vec2 = Vec2()


@dataclass(frozen=True)
class ReducedState(_FlatState):
    jr: float = 0.0
    jx: float = 0.0
    jy: float = 0.0
    lsq: float = 0.0

    def __post_init__(self):
        if self.lsq < 0:
            raise ValueError(f"lsq must be >= 0, got {self.lsq}")


def flatten(z: FullState) -> np.ndarray:
    return z.flatten()


def unflatten(v) -> FullState:
    return FullState.unflatten(v)


def as_vector(state, dim: int | None = None) -> np.ndarray:
    """Coerce a state dataclass or array-like to a float array, checking the last axis."""
    v = np.asarray(state, dtype=float)
    if dim is not None and (v.ndim == 0 or v.shape[-1] != dim):
        raise DimensionMismatch(f"expected last axis of length {dim}, got shape {v.shape}")
    return v


def on_surface(z, params: Params) -> np.ndarray:
    """Project a full state onto the constraint surface by resetting p1 from the velocity."""
    z = as_vector(z, 8).copy()
    z[..., 6] = params.lam * z[..., 3] / 2
    z[..., 7] = -params.lam * z[..., 2] / 2
    return z
