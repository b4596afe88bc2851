"""The involution of T*S^n induced by a reflection of the sphere.

A linear reflection ``R`` of R^{n+1} is an isometry of S^n; its cotangent lift
acts by ``(q, p) -> (Rq, Rp)``.  For the torus the reflection fixes the great
circle through ``N`` and ``v0``, and acts on torus coordinates by
``(t, v) -> (t, -v)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .morse import MorseFunctionSpec, critical_points
from .sphere import (
    CotangentPoint,
    admissible,
    omega_arrays,
    random_cotangent_points,
    random_tangent_vectors,
)
from .torus import TWO_PI, FrameAtNorthPole, embed_arrays, torus_embed


@dataclass(frozen=True)
class ReflectionInvolution:
    """Orthogonal reflection fixing ``span(fixed)`` and negating its complement."""

    matrix: np.ndarray
    fixed: np.ndarray

    def __post_init__(self):
        R = np.array(self.matrix, dtype=float)
        F = np.atleast_2d(np.array(self.fixed, dtype=float))
        R.setflags(write=False)
        F.setflags(write=False)
        object.__setattr__(self, "matrix", R)
        object.__setattr__(self, "fixed", F)

    @classmethod
    def fixing(cls, vectors) -> "ReflectionInvolution":
        F = np.atleast_2d(np.asarray(vectors, dtype=float))
        Q, _ = np.linalg.qr(F.T)
        P = Q @ Q.T
        return cls(2.0 * P - np.eye(F.shape[1]), Q.T)

    @property
    def ambient_dim(self) -> int:
        return self.matrix.shape[0]

    def apply_arrays(self, q, p):
        return q @ self.matrix.T, p @ self.matrix.T

    def involution_residual(self) -> float:
        R = self.matrix
        return float(np.max(np.abs(R @ R - np.eye(R.shape[0]))))

    def orthogonality_residual(self) -> float:
        R = self.matrix
        return float(np.max(np.abs(R.T @ R - np.eye(R.shape[0]))))

    def fixed_subspace_dim(self, tol: float = 1e-12) -> int:
        eig = np.linalg.eigvalsh(0.5 * (self.matrix + self.matrix.T))
        return int(np.sum(np.abs(eig - 1.0) < tol))

    def fixed_base_dim(self) -> int:
        """Dimension of the fixed sphere Fix(R) n S^n (base of Fix(I) = T*Fix)."""
        return self.fixed_subspace_dim() - 1

    def in_fixed_locus(self, q, p, tol: float = 1e-12):
        """Membership in Fix(I): both q and p lie in the fixed subspace."""
        rq, rp = self.apply_arrays(q, p)
        return np.maximum(np.max(np.abs(rq - q), axis=-1), np.max(np.abs(rp - p), axis=-1)) <= tol


def great_circle_reflection(frame: Optional[FrameAtNorthPole] = None) -> ReflectionInvolution:
    """Reflection across the great circle through ``N`` in the direction ``v0``."""
    frame = frame or FrameAtNorthPole()
    return ReflectionInvolution.fixing([frame.N, frame.v0])


def involution_apply(I: ReflectionInvolution, x: CotangentPoint) -> CotangentPoint:
    x = admissible(x)
    return CotangentPoint(I.matrix @ x.q, I.matrix @ x.p)


@dataclass(frozen=True)
class SymplecticResidual:
    one_form: float
    two_form: float
    involution: float

    @property
    def worst(self) -> float:
        return max(self.one_form, self.two_form)


def verify_symplectic(I: ReflectionInvolution, samples: int = 10_000, seed: int = 0) -> SymplecticResidual:
    """Residuals of I*lambda = lambda, I*omega = omega and I o I = id on random data."""
    if samples < 100:
        raise ValueError("samples must be at least 100")
    rng = np.random.default_rng(seed)
    dim = I.ambient_dim - 1
    q, p = random_cotangent_points(rng, samples, dim)
    dq1, dp1 = random_tangent_vectors(rng, q, p)
    dq2, dp2 = random_tangent_vectors(rng, q, p)
    Iq, Ip = I.apply_arrays(q, p)
    Idq1, Idp1 = I.apply_arrays(dq1, dp1)
    Idq2, Idp2 = I.apply_arrays(dq2, dp2)
    lam = np.abs(np.sum(Ip * Idq1, axis=1) - np.sum(p * dq1, axis=1))
    om = np.abs(omega_arrays(Idq1, Idp1, Idq2, Idp2) - omega_arrays(dq1, dp1, dq2, dp2))
    qq, pp = I.apply_arrays(Iq, Ip)
    back = np.maximum(np.max(np.abs(qq - q), axis=1), np.max(np.abs(pp - p), axis=1))
    return SymplecticResidual(float(np.max(lam)), float(np.max(om)), float(np.max(back)))


def verify_torus_invariance(
    I: ReflectionInvolution, grid_size: int = 64, frame: Optional[FrameAtNorthPole] = None
) -> float:
    """Max ambient distance between I(phi(t, v)) and phi(t, -v) on a uniform grid."""
    if grid_size < 8:
        raise ValueError("grid_size must be at least 8")
    frame = frame or FrameAtNorthPole()
    ang = np.arange(grid_size) * (TWO_PI / grid_size)
    T, V = np.meshgrid(ang, ang, indexing="ij")
    q, p = embed_arrays(T, V, frame)
    Iq, Ip = I.apply_arrays(q, p)
    q2, p2 = embed_arrays(T, -V, frame)
    return float(np.max(np.sqrt(np.sum((Iq - q2) ** 2, -1) + np.sum((Ip - p2) ** 2, -1))))


@dataclass(frozen=True)
class FixedComponent:
    v: float
    parametrization: Callable


@dataclass(frozen=True)
class FixedLocusReport:
    components: tuple
    membership_residual: float
    momentum_symmetry_residual: float
    torus_fixed_set_residual: float

    @property
    def count(self) -> int:
        return len(self.components)


def fixed_locus_intersection(
    I: ReflectionInvolution, frame: Optional[FrameAtNorthPole] = None, samples: int = 256
) -> FixedLocusReport:
    """Components of L n Fix(I) and the zero-section symmetry between them.

    The induced torus map (t, v) -> (t, -v) fixes v = 0 and v = pi.  Points
    (t, 0) and (-t, pi) lie over the same base point with opposite momenta.
    """
    frame = frame or FrameAtNorthPole()
    comps = []
    t = np.arange(samples) * (TWO_PI / samples)
    worst = 0.0
    for v in (0.0, math.pi):
        comps.append(FixedComponent(v, lambda tt, v=v: embed_arrays(tt, np.full_like(np.asarray(tt, float), v), frame)))
        q, p = embed_arrays(t, np.full_like(t, v), frame)
        Iq, Ip = I.apply_arrays(q, p)
        worst = max(worst, float(np.max(np.abs(Iq - q))), float(np.max(np.abs(Ip - p))))
    q0, p0 = comps[0].parametrization(t)
    q1, p1 = comps[1].parametrization(-t)
    sym = max(float(np.max(np.abs(q0 - q1))), float(np.max(np.abs(p0 + p1))))
    # the fixed set of (t, v) -> (t, -v) on a fine grid is exactly {v = 0} u {v = pi}
    ang = np.arange(samples) * (TWO_PI / samples)
    T, V = np.meshgrid(ang, ang, indexing="ij")
    q, p = embed_arrays(T, V, frame)
    on_fix = I.in_fixed_locus(q, p, tol=1e-9)
    expected = np.isclose(V, 0.0) | np.isclose(V, math.pi)
    mismatch = float(np.sum(on_fix != expected))
    return FixedLocusReport(tuple(comps), worst, sym, mismatch)


def verify_critical_points_fixed(
    I: ReflectionInvolution, spec: MorseFunctionSpec, frame: Optional[FrameAtNorthPole] = None
) -> float:
    frame = frame or FrameAtNorthPole()
    worst = 0.0
    for cp in critical_points(spec):
        x = torus_embed(cp.coords, frame)
        worst = max(worst, involution_apply(I, x).distance(x))
    return worst


def verify_f_invariance(spec: MorseFunctionSpec, grid_size: int = 64, func: Optional[Callable] = None) -> float:
    """Max |f(t, v) - f(t, -v)| over a grid; ``func`` overrides f for negative controls."""
    if grid_size < 8:
        raise ValueError("grid_size must be at least 8")
    f = func or spec.value
    ang = np.arange(grid_size) * (TWO_PI / grid_size)
    T, V = np.meshgrid(ang, ang, indexing="ij")
    return float(np.max(np.abs(f(T, V) - f(T, -V))))
