"""S^1 x S^{n-1} in T*S^n: the geodesic flow applied to the unit sphere of a fiber.

Two reflections are compared.  Reflecting in a hyperplane through ``N``
fixes a copy of T*S^{n-1}, which is too large for the symmetry argument once
n > 2.  Reflecting in the plane ``span(N, v0)`` fixes only T*S^1 and still
preserves L and the critical points of the Morse function.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ClusterAmbiguity, DegenerateIndexPattern
from .morse import (
    SHOOT_OFFSET,
    CriticalPoint,
    HomologyResult,
    MorseComplex,
    _shooting_duration,
    homology,
    integrate_circle_flow,
)
from .sphere import CotangentPoint, omega_arrays
from .symmetry import ReflectionInvolution
from .torus import TWO_PI, FrameAtNorthPole

MAX_N = 6


@dataclass(frozen=True)
class HighDimConfig:
    n: int = 3
    frame: Optional[FrameAtNorthPole] = None

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("n must be at least 2")
        frame = self.frame or FrameAtNorthPole.standard(self.n)
        if frame.N.shape[0] != self.n + 1:
            raise ValueError("frame dimension does not match n")
        object.__setattr__(self, "frame", frame)

    @property
    def v0(self) -> np.ndarray:
        return self.frame.v0


def highdim_embed_arrays(t, w, frame: FrameAtNorthPole):
    t = np.asarray(t, dtype=float)[..., None]
    w = np.asarray(w, dtype=float)
    ct, st = np.cos(t), np.sin(t)
    return frame.N * ct + w * st, w * ct - frame.N * st


def highdim_embed(t: float, w, cfg: HighDimConfig) -> CotangentPoint:
    w = np.asarray(w, dtype=float)
    if abs(np.linalg.norm(w) - 1.0) > 1e-12 or abs(np.dot(w, cfg.frame.N)) > 1e-12:
        raise ValueError("w must be a unit vector orthogonal to N")
    q, p = highdim_embed_arrays(t, w, cfg.frame)
    return CotangentPoint(q, p)


def fiber_sphere_samples(cfg: HighDimConfig, count: int, seed: int = 0) -> np.ndarray:
    rng = np.random.default_rng(seed)
    coeff = rng.standard_normal((count, cfg.n))
    coeff /= np.linalg.norm(coeff, axis=1, keepdims=True)
    return coeff @ cfg.frame.fiber


def highdim_lagrangian_residual(cfg: HighDimConfig, per_axis: int = 32, seed: int = 0) -> float:
    """Max |omega| over pairs of tangent vectors of L on ``per_axis**n`` samples."""
    n = cfg.n
    N = cfg.frame.N
    t = np.arange(per_axis) * (TWO_PI / per_axis)
    w = fiber_sphere_samples(cfg, per_axis ** (n - 1), seed)
    # orthonormal tangent frames of the fiber sphere at each w
    proj = np.eye(n + 1) - np.einsum("i,j->ij", N, N)
    tangents = []
    for k in range(w.shape[0]):
        P = proj - np.outer(w[k], w[k])
        U, s, _ = np.linalg.svd(P)
        tangents.append(U[:, : n - 1].T)
    A = np.array(tangents)  # (m, n-1, n+1)
    ct = np.cos(t)[:, None, None]
    st = np.sin(t)[:, None, None]
    W = w[None, :, :]
    vecs_q = [-N * st + W * ct]
    vecs_p = [-W * st - N * ct]
    for j in range(n - 1):
        a = A[None, :, j, :]
        vecs_q.append(a * st)
        vecs_p.append(a * ct)
    worst = 0.0
    for i, j in itertools.combinations(range(n), 2):
        r = omega_arrays(vecs_q[i], vecs_p[i], vecs_q[j], vecs_p[j])
        worst = max(worst, float(np.max(np.abs(r))))
    return worst


def _invariance_residual(R: ReflectionInvolution, cfg: HighDimConfig, samples: int, seed: int) -> float:
    """Max distance between I(phi_t(N, w)) and phi_t(N, Rw) on random samples."""
    rng = np.random.default_rng(seed)
    w = fiber_sphere_samples(cfg, samples, seed)
    t = rng.uniform(0.0, TWO_PI, samples)
    q, p = highdim_embed_arrays(t, w, cfg.frame)
    Iq, Ip = R.apply_arrays(q, p)
    q2, p2 = highdim_embed_arrays(t, w @ R.matrix.T, cfg.frame)
    return float(np.max(np.hypot(np.linalg.norm(Iq - q2, axis=1), np.linalg.norm(Ip - p2, axis=1))))


def _critical_embeddings(cfg: HighDimConfig):
    for theta, sign in itertools.product((0.0, math.pi), (1.0, -1.0)):
        yield (theta, sign), highdim_embed_arrays(theta, sign * cfg.v0, cfg.frame)


def _critical_displacement(R: ReflectionInvolution, cfg: HighDimConfig) -> float:
    worst = 0.0
    for _, (q, p) in _critical_embeddings(cfg):
        Iq, Ip = R.apply_arrays(q, p)
        worst = max(worst, float(np.max(np.abs(Iq - q))), float(np.max(np.abs(Ip - p))))
    return worst


@dataclass(frozen=True)
class ReflectionReport:
    involution: ReflectionInvolution
    fixed_base_dim: int
    involution_residual: float
    invariance_residual: float
    critical_displacement: float

    @property
    def approach_fails(self) -> bool:
        return self.fixed_base_dim > 1


def hypersphere_reflection_diagnosis(cfg: HighDimConfig, samples: int = 1000, seed: int = 0) -> ReflectionReport:
    """Reflection in the hyperplane through N and e1..e_{n-1}; Fix(I) = T*S^{n-1}."""
    R = ReflectionInvolution.fixing(np.vstack([cfg.frame.N, cfg.frame.fiber[:-1]]))
    return ReflectionReport(
        R,
        R.fixed_base_dim(),
        R.involution_residual(),
        _invariance_residual(R, cfg, samples, seed),
        _critical_displacement(R, cfg),
    )


def belgun_matveev_involution(cfg: HighDimConfig) -> ReflectionInvolution:
    """Reflection fixing span(N, v0) and negating its orthogonal complement."""
    return ReflectionInvolution.fixing([cfg.frame.N, cfg.v0])


def belgun_matveev_check(cfg: HighDimConfig, samples: int = 1000, seed: int = 0) -> ReflectionReport:
    R = belgun_matveev_involution(cfg)
    return ReflectionReport(
        R,
        R.fixed_base_dim(),
        R.involution_residual(),
        _invariance_residual(R, cfg, samples, seed),
        _critical_displacement(R, cfg),
    )


# ---------------------------------------------------------------------------
# Morse data on S^1 x S^{n-1}: f = eps * (cos(theta) + w . v0)


def highdim_critical_points(cfg: HighDimConfig, eps: float) -> list[CriticalPoint]:
    n = cfg.n
    out = []
    for theta, sign in itertools.product((0.0, math.pi), (1.0, -1.0)):
        # circle Hessian -eps*cos(theta); height on S^{n-1} has Hessian -eps*(w.v0) Id
        eig = np.concatenate([[-eps * math.cos(theta)], np.full(n - 1, -eps * sign)])
        label = f"({'0' if theta == 0 else 'pi'},{'+' if sign > 0 else '-'}v0)"
        value = eps * (math.cos(theta) + sign)
        out.append(CriticalPoint((theta, sign), int(np.sum(eig < 0)), value, label))
    out.sort(key=lambda c: (-c.index, c.coords))
    return out


def _analytic_count(xm: CriticalPoint, xp: CriticalPoint, n: int) -> int:
    (tm, sm), (tp, sp) = xm.coords, xp.coords
    if xm.index - xp.index != 1:
        return 0
    if sm == sp and tm != tp:
        return 2  # the two arcs of the circle factor
    if tm == tp and sm != sp and n - 1 == 1:
        return 2  # S^0 family of meridians on a circle
    return 0


def _circle_factor_shooting(theta_minus: float, theta_plus: float, eps: float) -> int:
    """Rays from the circle maximum, counted by where they land."""
    if theta_minus != 0.0:
        return 0
    duration, step = _shooting_duration(eps)
    _, out, _ = integrate_circle_flow(np.array([SHOOT_OFFSET, -SHOOT_OFFSET]), eps, duration, step)
    ends = np.mod(out[-1], TWO_PI)
    if np.max(np.abs(ends - math.pi)) > 1e-6:
        raise ClusterAmbiguity("circle rays did not settle at the minimum")
    return int(np.sum(np.abs(ends - theta_plus) < 1e-6))


@dataclass(frozen=True)
class HighDimMorse:
    complex: MorseComplex
    homology: HomologyResult
    critical_points: tuple = field(default=())


def highdim_morse_complex(cfg: HighDimConfig, eps: float = 0.01) -> HighDimMorse:
    n = cfg.n
    if n == 2:
        raise DegenerateIndexPattern("indices collide for n = 2; use the torus Morse engine")
    crits = highdim_critical_points(cfg, eps)
    gens = {k: [c for c in crits if c.index == k] for k in range(n + 1)}
    diffs, counts = {}, {}
    for k in range(1, n + 1):
        m = np.zeros((len(gens[k - 1]), len(gens[k])), dtype=np.int64)
        for i, src in enumerate(gens[k]):
            for j, dst in enumerate(gens[k - 1]):
                analytic = _analytic_count(src, dst, n)
                (tm, sm), (tp, sp) = src.coords, dst.coords
                if sm == sp and tm != tp:
                    shot = _circle_factor_shooting(tm, tp, eps)
                    if shot != analytic:
                        raise ClusterAmbiguity(f"shooting {shot} != classification {analytic}")
                m[j, i] = analytic
        counts[k] = m
        diffs[k] = m % 2
    mc = MorseComplex(gens, diffs, counts)
    return HighDimMorse(mc, homology(mc), tuple(crits))
