"""Closed-form geodesic flow on T*S^n and the Lagrangian torus it sweeps out.

Angles live in R/2piZ.  The torus point ``(t, v)`` is sent to
``phi_t(N, cos(v) e1 + sin(v) e2)`` where ``phi_t`` is the geodesic flow and
``(N, e1, e2)`` is an orthonormal frame at the north pole.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.spatial import cKDTree

from . import _kernels
from .errors import ZeroMomentum
from .sphere import TOL_GEOM, CotangentPoint, TangentVector, admissible

TWO_PI = 2.0 * math.pi


def wrap(angle):
    """Reduce angles to [0, 2pi)."""
    out = np.mod(angle, TWO_PI)
    # np.mod returns exactly 2pi for tiny negative inputs
    if np.ndim(out) == 0:
        return 0.0 if out >= TWO_PI else float(out)
    out[out >= TWO_PI] = 0.0
    return out


def angle_distance(a, b):
    d = np.mod(np.asarray(a) - np.asarray(b) + math.pi, TWO_PI) - math.pi
    return np.abs(d)


@dataclass(frozen=True)
class TorusPoint:
    t: float
    v: float

    def __post_init__(self):
        object.__setattr__(self, "t", wrap(float(self.t)))
        object.__setattr__(self, "v", wrap(float(self.v)))


@dataclass(frozen=True)
class FrameAtNorthPole:
    """Orthonormal frame ``N, e1, e2, ...`` with the distinguished direction ``e1``."""

    N: np.ndarray = field(default_factory=lambda: np.array([0.0, 0.0, 1.0]))
    fiber: np.ndarray = field(default_factory=lambda: np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]))

    def __post_init__(self):
        N = np.array(self.N, dtype=float)
        fiber = np.atleast_2d(np.array(self.fiber, dtype=float))
        basis = np.vstack([N, fiber])
        if basis.shape[0] != basis.shape[1]:
            raise ValueError("frame must contain N plus dim-many fiber vectors")
        gram = basis @ basis.T
        if np.max(np.abs(gram - np.eye(basis.shape[0]))) > TOL_GEOM * 10:
            raise ValueError("frame is not orthonormal")
        N.setflags(write=False)
        fiber.setflags(write=False)
        object.__setattr__(self, "N", N)
        object.__setattr__(self, "fiber", fiber)

    @classmethod
    def standard(cls, n: int = 2) -> "FrameAtNorthPole":
        eye = np.eye(n + 1)
        return cls(N=eye[n], fiber=eye[:n])

    @property
    def e1(self) -> np.ndarray:
        return self.fiber[0]

    @property
    def e2(self) -> np.ndarray:
        return self.fiber[1]

    @property
    def v0(self) -> np.ndarray:
        return self.fiber[0]


# ---------------------------------------------------------------------------
# Geodesic flow


def geodesic_flow_arrays(q, p, t):
    """Batched closed-form flow; ``q, p`` broadcast against ``t[..., None]``."""
    q = np.asarray(q, dtype=float)
    p = np.asarray(p, dtype=float)
    t = np.asarray(t, dtype=float)[..., None]
    c = np.linalg.norm(p, axis=-1, keepdims=True)
    if np.any(c <= TOL_GEOM):
        raise ZeroMomentum("geodesic flow needs a nonzero covector")
    u = p / c
    ct = np.cos(c * t)
    st = np.sin(c * t)
    return q * ct + u * st, p * ct - c * q * st


def geodesic_flow(x: CotangentPoint, t: float) -> CotangentPoint:
    x = admissible(x)
    q, p = geodesic_flow_arrays(x.q, x.p, t)
    return CotangentPoint(q, p)


# ---------------------------------------------------------------------------
# Embedding and its differential


def embed_arrays(t, v, frame: FrameAtNorthPole):
    t = np.asarray(t, dtype=float)[..., None]
    v = np.asarray(v, dtype=float)[..., None]
    u = np.cos(v) * frame.e1 + np.sin(v) * frame.e2
    ct, st = np.cos(t), np.sin(t)
    return frame.N * ct + u * st, u * ct - frame.N * st


def embed_differential_arrays(t, v, frame: FrameAtNorthPole):
    """Return ``(dq_t, dp_t, dq_v, dp_v)`` for the torus embedding."""
    t = np.asarray(t, dtype=float)[..., None]
    v = np.asarray(v, dtype=float)[..., None]
    u = np.cos(v) * frame.e1 + np.sin(v) * frame.e2
    du = -np.sin(v) * frame.e1 + np.cos(v) * frame.e2
    ct, st = np.cos(t), np.sin(t)
    N = frame.N
    return -N * st + u * ct, -u * st - N * ct, du * st, du * ct


def torus_embed(pt: TorusPoint, frame: Optional[FrameAtNorthPole] = None) -> CotangentPoint:
    frame = frame or FrameAtNorthPole()
    q, p = embed_arrays(pt.t, pt.v, frame)
    return CotangentPoint(q, p)


def embedding_differential(pt: TorusPoint, frame: Optional[FrameAtNorthPole] = None):
    frame = frame or FrameAtNorthPole()
    dq_t, dp_t, dq_v, dp_v = embed_differential_arrays(pt.t, pt.v, frame)
    return TangentVector(dq_t, dp_t), TangentVector(dq_v, dp_v)


def verify_lagrangian(grid_size: int, frame: Optional[FrameAtNorthPole] = None, backend: str | None = None) -> float:
    """Max of |omega(d_t phi, d_v phi)| over a uniform grid_size x grid_size grid."""
    if grid_size < 2:
        raise ValueError("grid_size must be at least 2")
    frame = frame or FrameAtNorthPole()
    return _kernels.lagrangian_grid_residual(grid_size, frame.N, frame.e1, frame.e2, backend=backend)


def min_separation_ratio(grid_size: int, frame: Optional[FrameAtNorthPole] = None) -> float:
    """Smallest ambient distance between distinct grid images, over the grid spacing.

    A value bounded away from zero means no two far-apart parameters land close
    together, i.e. the sampled map is injective at grid scale.
    """
    frame = frame or FrameAtNorthPole()
    h = TWO_PI / grid_size
    ang = np.arange(grid_size) * h
    T, V = np.meshgrid(ang, ang, indexing="ij")
    q, p = embed_arrays(T.ravel(), V.ravel(), frame)
    pts = np.concatenate([q, p], axis=1)
    dist, _ = cKDTree(pts).query(pts, k=2)
    return float(np.min(dist[:, 1]) / h)


# ---------------------------------------------------------------------------
# Fiber intersections


@dataclass(frozen=True)
class FiberIntersection:
    """Preimages of a fiber ``T*_q S^2`` under the embedding.

    Either ``points`` holds the finitely many torus points, or ``circle_t`` is
    set and the preimage is the whole circle ``{(circle_t, v)}``.
    """

    points: tuple = ()
    circle_t: Optional[float] = None

    @property
    def is_circle(self) -> bool:
        return self.circle_t is not None

    def circle_point(self, v: float) -> TorusPoint:
        return TorusPoint(self.circle_t, v)


def fiber_intersections(q, frame: Optional[FrameAtNorthPole] = None, tol: float = TOL_GEOM) -> FiberIntersection:
    frame = frame or FrameAtNorthPole()
    q = np.asarray(getattr(q, "q", q), dtype=float)
    c = float(np.dot(q, frame.N))
    perp = q - c * frame.N
    s = float(np.linalg.norm(perp))
    if s <= tol:
        return FiberIntersection(circle_t=0.0 if c > 0 else math.pi)
    t = math.atan2(s, c)
    u = perp / s
    v = math.atan2(float(np.dot(u, frame.e2)), float(np.dot(u, frame.e1)))
    return FiberIntersection(points=(TorusPoint(t, v), TorusPoint(-t, v + math.pi)))


def fiber_preimages_arrays(q, frame: FrameAtNorthPole):
    """Vectorized preimages for non-pole base points; returns ``(t, v)`` of shape (m, 2)."""
    c = q @ frame.N
    perp = q - c[:, None] * frame.N
    s = np.linalg.norm(perp, axis=1)
    t = np.arctan2(s, c)
    v = np.arctan2(perp @ frame.e2, perp @ frame.e1)
    ts = np.stack([t, -t], axis=1)
    vs = np.stack([v, v + math.pi], axis=1)
    return wrap(ts), wrap(vs)


def distance_to_torus(x: CotangentPoint, frame: Optional[FrameAtNorthPole] = None) -> float:
    """Ambient distance from ``x`` to the torus, searched through the fiber of ``x.q``."""
    frame = frame or FrameAtNorthPole()
    hit = fiber_intersections(x.q, frame)
    if hit.is_circle:
        sign = 1.0 if hit.circle_t == 0.0 else -1.0
        v = math.atan2(sign * float(np.dot(x.p, frame.e2)), sign * float(np.dot(x.p, frame.e1)))
        candidates = [hit.circle_point(v)]
    else:
        candidates = list(hit.points)
    return min(x.distance(torus_embed(c, frame)) for c in candidates)


# ---------------------------------------------------------------------------
# Generators of the relative homotopy group


@dataclass(frozen=True)
class GeneratorDescriptor:
    name: str
    boundary: Optional[Callable[[float], CotangentPoint]]
    in_scope: bool
    note: str = ""


def relative_homotopy_generators(frame: Optional[FrameAtNorthPole] = None) -> list:
    frame = frame or FrameAtNorthPole()
    return [
        GeneratorDescriptor(
            "SphereClass",
            None,
            False,
            "zero section S^2; index not computed",
        ),
        GeneratorDescriptor(
            "FiberDisk",
            lambda v: torus_embed(TorusPoint(0.0, v), frame),
            True,
            "unit disk in the fiber over N",
        ),
        GeneratorDescriptor(
            "GeodesicDisk",
            lambda t: torus_embed(TorusPoint(t, 0.0), frame),
            True,
            "loop t -> phi_t(v0)",
        ),
    ]
