"""Round spheres, their cotangent bundles and the canonical forms, in ambient coordinates.

A point of T*S^n is stored as a pair ``(q, p)`` of vectors in R^{n+1} with
``|q| = 1`` and ``q . p = 0``; covectors are identified with tangent vectors
through the round metric.  Tangent vectors to T*S^n are pairs ``(dq, dp)``
satisfying the linearized constraints ``q . dq = 0`` and
``dq . p + q . dp = 0``.

Inputs whose constraint residual lies between ``tol`` and ``10 * tol`` are
silently re-projected; anything worse raises :class:`ConstraintViolation`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConstraintViolation, ZeroVector

TOL_GEOM = 1e-12


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class SpherePoint:
    q: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "q", _frozen(self.q))

    @property
    def dim(self) -> int:
        return self.q.shape[0] - 1


@dataclass(frozen=True)
class CotangentPoint:
    q: np.ndarray
    p: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "q", _frozen(self.q))
        object.__setattr__(self, "p", _frozen(self.p))
        if self.q.shape != self.p.shape or self.q.ndim != 1:
            raise ValueError("q and p must be 1-d vectors of equal length")

    @property
    def dim(self) -> int:
        return self.q.shape[0] - 1

    def as_array(self) -> np.ndarray:
        return np.concatenate([self.q, self.p])

    def distance(self, other: "CotangentPoint") -> float:
        return float(np.sqrt(np.sum((self.q - other.q) ** 2) + np.sum((self.p - other.p) ** 2)))


@dataclass(frozen=True)
class TangentVector:
    dq: np.ndarray
    dp: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "dq", _frozen(self.dq))
        object.__setattr__(self, "dp", _frozen(self.dp))

    def __add__(self, other: "TangentVector") -> "TangentVector":
        return TangentVector(self.dq + other.dq, self.dp + other.dp)

    def __mul__(self, c: float) -> "TangentVector":
        return TangentVector(c * self.dq, c * self.dp)

    __rmul__ = __mul__


def project_to_cotangent(q_raw, p_raw, tol: float = TOL_GEOM) -> CotangentPoint:
    """Normalize ``q_raw`` and remove the normal component of ``p_raw``."""
    q_raw = np.asarray(q_raw, dtype=float)
    p_raw = np.asarray(p_raw, dtype=float)
    nq = np.linalg.norm(q_raw)
    if nq < tol:
        raise ZeroVector(f"base vector has norm {nq:.3e} < {tol:.1e}")
    q = q_raw / nq
    p = p_raw - np.dot(q, p_raw) * q
    return CotangentPoint(q, p)


def point_residual(x: CotangentPoint) -> float:
    return max(abs(float(np.dot(x.q, x.q)) - 1.0), abs(float(np.dot(x.q, x.p))))


def tangent_residual(x: CotangentPoint, v: TangentVector) -> float:
    return max(abs(float(np.dot(x.q, v.dq))), abs(float(np.dot(v.dq, x.p) + np.dot(x.q, v.dp))))


def project_tangent(x: CotangentPoint, dq, dp) -> TangentVector:
    """Orthogonal projection of an ambient vector (dq, dp) onto T_x(T*S^n)."""
    w = np.concatenate([np.asarray(dq, float), np.asarray(dp, float)])
    n1 = np.concatenate([x.q, np.zeros_like(x.q)])
    n2 = np.concatenate([x.p, x.q])
    basis = np.stack([n1, n2], axis=1)
    coef, *_ = np.linalg.lstsq(basis, w, rcond=None)
    w = w - basis @ coef
    k = x.q.shape[0]
    return TangentVector(w[:k], w[k:])


def admissible(x: CotangentPoint, tol: float = TOL_GEOM) -> CotangentPoint:
    r = point_residual(x)
    if r <= tol:
        return x
    if r <= 10 * tol:
        return project_to_cotangent(x.q, x.p, tol)
    raise ConstraintViolation(f"cotangent point residual {r:.3e} exceeds {10 * tol:.1e}")


def admissible_tangent(x: CotangentPoint, v: TangentVector, tol: float = TOL_GEOM) -> TangentVector:
    r = tangent_residual(x, v)
    if r <= tol:
        return v
    if r <= 10 * tol:
        return project_tangent(x, v.dq, v.dp)
    raise ConstraintViolation(f"tangent vector residual {r:.3e} exceeds {10 * tol:.1e}")


def canonical_one_form(x: CotangentPoint, v: TangentVector, tol: float = TOL_GEOM) -> float:
    """Evaluate lambda = p . dq."""
    x = admissible(x, tol)
    v = admissible_tangent(x, v, tol)
    return float(np.dot(x.p, v.dq))


def symplectic_form(
    x: CotangentPoint, v1: TangentVector, v2: TangentVector, tol: float = TOL_GEOM
) -> float:
    """Evaluate ``dq1 . dp2 - dp1 . dq2``."""
    x = admissible(x, tol)
    v1 = admissible_tangent(x, v1, tol)
    v2 = admissible_tangent(x, v2, tol)
    return float(np.dot(v1.dq, v2.dp) - np.dot(v1.dp, v2.dq))


# Batched helpers.  Arrays carry the ambient coordinate on the last axis.


def omega_arrays(dq1, dp1, dq2, dp2) -> np.ndarray:
    return np.sum(dq1 * dp2, axis=-1) - np.sum(dp1 * dq2, axis=-1)


def dlambda_arrays(dq1, dp1, dq2, dp2) -> np.ndarray:
    """Exterior derivative of p . dq, i.e. ``dp1 . dq2 - dq1 . dp2``.

    This is the negative of :func:`omega_arrays`; areas and Maslov indices use it
    so that both are positive on the geodesic disk.
    """
    return -omega_arrays(dq1, dp1, dq2, dp2)


def random_cotangent_points(rng: np.random.Generator, count: int, dim: int = 2, scale: float = 1.0):
    """Random admissible (q, p) arrays of shape (count, dim + 1)."""
    q = rng.standard_normal((count, dim + 1))
    q /= np.linalg.norm(q, axis=1, keepdims=True)
    p = scale * rng.standard_normal((count, dim + 1))
    p -= np.sum(p * q, axis=1, keepdims=True) * q
    return q, p


def random_tangent_vectors(rng: np.random.Generator, q: np.ndarray, p: np.ndarray):
    """Random tangent vectors (dq, dp) at each row of (q, p), by projection."""
    dq = rng.standard_normal(q.shape)
    dp = rng.standard_normal(q.shape)
    return project_tangent_arrays(q, p, dq, dp)


def project_tangent_arrays(q, p, dq, dp):
    """Batched orthogonal projection onto the tangent spaces of T*S^n."""
    w = np.concatenate([dq, dp], axis=-1)
    n1 = np.concatenate([q, np.zeros_like(q)], axis=-1)
    n2 = np.concatenate([p, q], axis=-1)
    g11 = np.sum(n1 * n1, axis=-1)
    g12 = np.sum(n1 * n2, axis=-1)
    g22 = np.sum(n2 * n2, axis=-1)
    b1 = np.sum(n1 * w, axis=-1)
    b2 = np.sum(n2 * w, axis=-1)
    det = g11 * g22 - g12 * g12
    c1 = (g22 * b1 - g12 * b2) / det
    c2 = (g11 * b2 - g12 * b1) / det
    w = w - c1[..., None] * n1 - c2[..., None] * n2
    k = q.shape[-1]
    return w[..., :k], w[..., k:]
