"""Morse theory of f(t, v) = eps * (cos t + cos v) on the flat torus, over Z/2.

The negative gradient flow for the flat metric splits into two copies of the
circle flow ``theta' = eps * sin(theta)``, which has the closed form
``tan(theta(s) / 2) = tan(theta(0) / 2) * exp(eps * s)``.  Flow lines are
counted by shooting from the unstable sphere of the upper critical point and
cross-checked against the classification of flow lines of a product flow.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import _kernels
from .errors import ClusterAmbiguity, IndexGap, NotAComplex, NotMorse, StepTooLarge
from .torus import TWO_PI, TorusPoint, angle_distance

LOCAL_ERROR_TARGET = 1e-12
LOCAL_ERROR_LIMIT = 1e-8
MAX_SUBSTEPS = 1024


@dataclass(frozen=True)
class MorseFunctionSpec:
    epsilon: float = 0.01

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")

    def value(self, t, v):
        return self.epsilon * (np.cos(t) + np.cos(v))

    def gradient(self, t, v):
        return np.array([-self.epsilon * np.sin(t), -self.epsilon * np.sin(v)])

    def hessian(self, t, v):
        return np.diag([-self.epsilon * np.cos(t), -self.epsilon * np.cos(v)])


@dataclass(frozen=True)
class CriticalPoint:
    coords: object
    index: int
    value: float
    label: str = ""


def critical_points(spec: MorseFunctionSpec) -> list[CriticalPoint]:
    """The four critical points, ordered by decreasing index."""
    eps = spec.epsilon
    out = []
    for t, v in itertools.product((0.0, math.pi), repeat=2):
        grad = spec.gradient(t, v)
        eig = np.linalg.eigvalsh(spec.hessian(t, v))
        if np.linalg.norm(grad) > 1e-12:
            raise NotMorse(f"gradient {np.linalg.norm(grad):.2e} at ({t}, {v})")
        if np.min(np.abs(eig)) < eps / 2:
            raise NotMorse(f"degenerate Hessian at ({t}, {v})")
        label = f"({'0' if t == 0 else 'pi'},{'0' if v == 0 else 'pi'})"
        out.append(CriticalPoint(TorusPoint(t, v), int(np.sum(eig < 0)), float(spec.value(t, v)), label))
    out.sort(key=lambda c: (-c.index, c.coords.t, c.coords.v))
    return out


# ---------------------------------------------------------------------------
# Trajectories


def closed_form_flow(theta0, eps: float, s):
    """Exact solution of theta' = eps * sin(theta), keeping the lift of theta0."""
    theta0 = np.asarray(theta0, dtype=float)
    k = np.round(theta0 / TWO_PI)
    r = theta0 - k * TWO_PI
    # r in [-pi, pi]; move -pi to +pi so cos(r/2) >= 0
    r = np.where(r <= -math.pi, r + TWO_PI, r)
    k = np.where(theta0 - k * TWO_PI <= -math.pi, k - 1, k)
    grow = np.exp(eps * np.asarray(s, dtype=float))
    return k * TWO_PI + 2.0 * np.arctan2(np.sin(r / 2) * grow, np.cos(r / 2))


def integrate_circle_flow(theta0, eps: float, duration: float, step: float, backend: Optional[str] = None):
    """Adaptive RK4 for a batch of circle coordinates.

    The number of RK4 substeps per output step is doubled until the step-doubling
    error estimate drops below ``LOCAL_ERROR_TARGET``.  Returns the sample times,
    the samples (shape ``(K, m)``) and the accepted error estimate.
    """
    if step <= 0 or duration <= 0:
        raise ValueError("step and duration must be positive")
    n_steps = max(1, int(math.ceil(duration / step - 1e-9)))
    h = duration / n_steps
    substeps = 1
    while True:
        out, err = _kernels.rk4_circle_flow(theta0, eps, h, n_steps, substeps, backend=backend)
        if err <= LOCAL_ERROR_TARGET or substeps >= MAX_SUBSTEPS:
            break
        substeps *= 2
    if err > LOCAL_ERROR_LIMIT:
        raise StepTooLarge(f"local error {err:.2e} exceeds {LOCAL_ERROR_LIMIT:.0e} with {substeps} substeps")
    return np.arange(n_steps + 1) * h, out, err


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    angles: np.ndarray  # (K, 2), lifted to R^2
    local_error: float = 0.0

    def points(self) -> list[TorusPoint]:
        return [TorusPoint(t, v) for t, v in self.angles]

    def values(self, spec: MorseFunctionSpec) -> np.ndarray:
        return spec.value(self.angles[:, 0], self.angles[:, 1])


def negative_gradient_trajectory(
    start: TorusPoint,
    spec: MorseFunctionSpec,
    duration: float,
    step: float,
    reverse: bool = False,
    backend: Optional[str] = None,
) -> Trajectory:
    """Flow line of -grad f (or +grad f when ``reverse``) for the flat metric."""
    eps = -spec.epsilon if reverse else spec.epsilon
    start_angles = np.array([start.t, start.v])
    start_angles = np.where(start_angles > math.pi, start_angles - TWO_PI, start_angles)
    times, out, err = integrate_circle_flow(start_angles, eps, duration, step, backend)
    return Trajectory(times, out, err)


def closed_form_trajectory(start: TorusPoint, spec: MorseFunctionSpec, times, reverse: bool = False) -> Trajectory:
    eps = -spec.epsilon if reverse else spec.epsilon
    start_angles = np.array([start.t, start.v])
    start_angles = np.where(start_angles > math.pi, start_angles - TWO_PI, start_angles)
    times = np.asarray(times, dtype=float)
    angles = closed_form_flow(start_angles[None, :], eps, times[:, None])
    return Trajectory(times, angles)


# ---------------------------------------------------------------------------
# Flow-line counting


SHOOT_OFFSET = 1e-4
SHOOT_RAYS = 64
LIMIT_TOL = 1e-6
BISECTION_STEPS = 40


def _shooting_duration(eps: float) -> tuple[float, float]:
    return 40.0 / eps, 0.25 / eps


def _shoot(starts: np.ndarray, spec: MorseFunctionSpec, backend=None):
    """Integrate rays from ``starts`` (m, 2); return full lifted trajectories (K, m, 2)."""
    duration, step = _shooting_duration(spec.epsilon)
    _, out, _ = integrate_circle_flow(starts.reshape(-1), spec.epsilon, duration, step, backend)
    return out.reshape(out.shape[0], -1, 2)


def _limit_keys(final: np.ndarray) -> np.ndarray:
    """Lifted critical point reached by each ray, as integer multiples of pi."""
    keys = np.round(final / math.pi)
    miss = np.max(np.abs(final - keys * math.pi))
    if miss > LIMIT_TOL:
        raise ClusterAmbiguity(f"ray did not settle at a critical point (off by {miss:.2e})")
    return keys.astype(int)


def _same_point(coords_a, coords_b) -> bool:
    return bool(np.all(angle_distance(np.asarray(coords_a), np.asarray(coords_b)) < 1e-9))


def _coords(cp: CriticalPoint) -> np.ndarray:
    return np.array([cp.coords.t, cp.coords.v])


def analytic_flow_line_count(x_minus: CriticalPoint, x_plus: CriticalPoint) -> int:
    """Product-flow classification: two flow lines iff exactly one coordinate differs."""
    differs = angle_distance(_coords(x_minus), _coords(x_plus)) > 1e-9
    return 2 if int(np.sum(differs)) == 1 and x_minus.index - x_plus.index == 1 else 0


@dataclass(frozen=True)
class FlowLineCount:
    count: int
    count_mod2: int
    analytic: int
    rays: int
    endpoints: tuple = field(default=(), compare=False)


def _lift(a: np.ndarray) -> np.ndarray:
    return np.where(a > math.pi, a - TWO_PI, a)


def _saddles_on_unstable_circle(x_minus: CriticalPoint, spec: MorseFunctionSpec, rays: int, backend=None):
    """Boundary rays between basins on the unstable circle of a maximum.

    Returns the lifted saddle positions the boundary rays converge to, and the
    closest approach of each refined boundary ray to its saddle.
    """
    center = _lift(_coords(x_minus))
    alpha = (np.arange(rays) + 0.5) * (TWO_PI / rays)
    starts = center + SHOOT_OFFSET * np.stack([np.cos(alpha), np.sin(alpha)], axis=1)
    keys = _limit_keys(_shoot(starts, spec, backend)[-1])
    lo_idx = [k for k in range(rays) if np.any(keys[k] != keys[(k + 1) % rays])]
    if not lo_idx:
        return [], []
    lo = np.array([alpha[k] for k in lo_idx])
    hi = lo + TWO_PI / rays
    key_lo = np.array([keys[k] for k in lo_idx])
    key_hi = np.array([keys[(k + 1) % rays] for k in lo_idx])
    for _ in range(BISECTION_STEPS):
        mid = 0.5 * (lo + hi)
        pts = center + SHOOT_OFFSET * np.stack([np.cos(mid), np.sin(mid)], axis=1)
        # near the separatrix a ray need not settle inside the window; classify
        # it by the side of the maximum each coordinate has left towards
        side = np.sign(_shoot(pts, spec, backend)[-1] - center).astype(int)
        mk = np.round(center / math.pi).astype(int) + side
        left = np.all(mk == key_lo, axis=1)
        right = np.all(mk == key_hi, axis=1)
        if not np.all(left | right):
            raise ClusterAmbiguity("bisection ray reached a third basin")
        lo = np.where(left, mid, lo)
        hi = np.where(left, hi, mid)
    diff = np.abs(key_lo - key_hi)
    if np.any(np.sum(diff != 0, axis=1) != 1) or np.any(np.max(diff, axis=1) != 2):
        raise ClusterAmbiguity("adjacent basins are not separated by a single saddle")
    saddles = 0.5 * (key_lo + key_hi) * math.pi
    mid = 0.5 * (lo + hi)
    pts = center + SHOOT_OFFSET * np.stack([np.cos(mid), np.sin(mid)], axis=1)
    traj = _shoot(pts, spec, backend)
    approach = np.min(np.linalg.norm(traj - saddles[None, :, :], axis=2), axis=0)
    return list(saddles), list(approach)


def count_flow_lines(
    x_minus: CriticalPoint,
    x_plus: CriticalPoint,
    spec: MorseFunctionSpec,
    rays: int = SHOOT_RAYS,
    backend: Optional[str] = None,
) -> FlowLineCount:
    if x_minus.index - x_plus.index != 1:
        raise IndexGap(f"index difference {x_minus.index - x_plus.index} != 1")
    analytic = analytic_flow_line_count(x_minus, x_plus)
    target = _coords(x_plus)
    if x_minus.index == 2:
        saddles, approach = _saddles_on_unstable_circle(x_minus, spec, rays, backend)
        hits = [s for s, a in zip(saddles, approach) if _same_point(np.mod(s, TWO_PI), target)]
        bad = [a for s, a in zip(saddles, approach) if a > 1e-3]
        if bad:
            raise ClusterAmbiguity(f"boundary ray misses its saddle by {max(bad):.2e}")
        endpoints = tuple(tuple(s) for s in hits)
    else:
        center = _lift(_coords(x_minus))
        hess = spec.hessian(*center)
        unstable = [i for i in range(2) if hess[i, i] < 0]
        starts = []
        for i in unstable:
            for sign in (1.0, -1.0):
                s = center.copy()
                s[i] += sign * SHOOT_OFFSET
                starts.append(s)
        keys = _limit_keys(_shoot(np.array(starts), spec, backend)[-1])
        ends = keys * math.pi
        hits = [e for e in ends if _same_point(np.mod(e, TWO_PI), target)]
        endpoints = tuple(tuple(e) for e in hits)
    count = len(hits)
    if count != analytic:
        raise ClusterAmbiguity(f"shooting found {count} flow lines, classification says {analytic}")
    return FlowLineCount(count, count % 2, analytic, rays, endpoints)


# ---------------------------------------------------------------------------
# Chain complexes over Z/2


def gf2_rank(matrix) -> int:
    """Rank over Z/2 by Gaussian elimination with XOR row operations."""
    R = (np.asarray(matrix, dtype=np.int64) % 2).astype(np.uint8)
    if R.size == 0:
        return 0
    R = R.copy()
    rows, cols = R.shape
    rank = 0
    for col in range(cols):
        pivot = next((r for r in range(rank, rows) if R[r, col]), None)
        if pivot is None:
            continue
        if pivot != rank:
            R[[rank, pivot]] = R[[pivot, rank]]
        for r in range(rows):
            if r != rank and R[r, col]:
                R[r] ^= R[rank]
        rank += 1
        if rank == rows:
            break
    return rank


@dataclass(frozen=True)
class MorseComplex:
    """Z/2 chain complex.

    ``generators[k]`` lists the degree-k generators; ``differentials[k]`` is the
    matrix of C_k -> C_{k-1} with shape ``(len(C_{k-1}), len(C_k))``.
    """

    generators: dict
    differentials: dict
    flow_line_counts: dict = field(default_factory=dict)

    def __post_init__(self):
        gens = {int(k): tuple(v) for k, v in self.generators.items()}
        diffs = {}
        for k, m in self.differentials.items():
            m = np.asarray(m, dtype=np.int64) % 2
            if m.shape != (len(gens.get(k - 1, ())), len(gens.get(k, ()))):
                raise ValueError(f"differential in degree {k} has shape {m.shape}")
            diffs[int(k)] = m
        object.__setattr__(self, "generators", gens)
        object.__setattr__(self, "differentials", diffs)

    @property
    def top_degree(self) -> int:
        return max(self.generators) if self.generators else -1

    def dim(self, k: int) -> int:
        return len(self.generators.get(k, ()))

    def boundary(self, k: int) -> np.ndarray:
        if k in self.differentials:
            return self.differentials[k]
        return np.zeros((self.dim(k - 1), self.dim(k)), dtype=np.int64)

    def square_residual(self) -> int:
        worst = 0
        for k in range(2, self.top_degree + 1):
            sq = (self.boundary(k - 1) @ self.boundary(k)) % 2
            worst = max(worst, int(np.max(sq)) if sq.size else 0)
        return worst

    def is_zero(self) -> bool:
        return all(not np.any(m) for m in self.differentials.values())


@dataclass(frozen=True)
class HomologyResult:
    ranks: tuple
    generator_counts: tuple = ()

    @property
    def euler_characteristic(self) -> int:
        return sum((-1) ** k * r for k, r in enumerate(self.ranks))

    @property
    def generator_euler_characteristic(self) -> int:
        return sum((-1) ** k * r for k, r in enumerate(self.generator_counts))


def homology(c: MorseComplex) -> HomologyResult:
    if c.square_residual():
        raise NotAComplex("boundary operator does not square to zero")
    top = c.top_degree
    ranks = []
    for k in range(top + 1):
        r = c.dim(k) - gf2_rank(c.boundary(k)) - gf2_rank(c.boundary(k + 1))
        ranks.append(r)
    counts = tuple(c.dim(k) for k in range(top + 1))
    return HomologyResult(tuple(ranks), counts)


def morse_differential(spec: MorseFunctionSpec, rays: int = SHOOT_RAYS, backend: Optional[str] = None) -> MorseComplex:
    crits = critical_points(spec)
    gens = {k: [c for c in crits if c.index == k] for k in range(3)}
    diffs, counts = {}, {}
    for k in (1, 2):
        m = np.zeros((len(gens[k - 1]), len(gens[k])), dtype=np.int64)
        for i, src in enumerate(gens[k]):
            for j, dst in enumerate(gens[k - 1]):
                m[j, i] = count_flow_lines(src, dst, spec, rays, backend).count
        counts[k] = m
        diffs[k] = m % 2
    return MorseComplex(gens, diffs, counts)


# ---------------------------------------------------------------------------
# Morse-Smale check


def _factor_piece(a_minus: float, a_plus: float):
    """Intersection W^u(a-) n W^s(a+) for the circle flow, as (dim, sampler) or None.

    The maximum 0 flows out along both open arcs into the minimum pi.
    """
    top_minus = a_minus == 0.0
    top_plus = a_plus == 0.0
    if top_minus and not top_plus:
        return 1, lambda u: np.where(u < 0.5, 2 * u * math.pi, math.pi + 2 * (u - 0.5) * math.pi)
    if top_minus == top_plus:
        return 0, lambda u: np.full_like(u, a_minus)
    return None


@dataclass(frozen=True)
class MorseSmaleReport:
    ok: bool
    margin: float
    pairs_checked: int
    intersection_dims: dict


def _min_principal_angle(A: np.ndarray, B: np.ndarray) -> float:
    if A.shape[1] == 0 or B.shape[1] == 0:
        return math.pi / 2
    s = np.linalg.svd(A.T @ B, compute_uv=False)
    return float(np.arccos(np.clip(np.max(s), -1.0, 1.0)))


def verify_morse_smale(spec: MorseFunctionSpec, samples: int = 100) -> MorseSmaleReport:
    """Check transversality of all stable/unstable intersections of the flat flow."""
    if samples < 100:
        raise ValueError("samples must be at least 100")
    crits = critical_points(spec)
    ok = True
    margin = math.pi / 2
    dims = {}
    checked = 0
    u = (np.arange(samples) + 0.5) / samples
    # a fixed interleaving so both coordinates sweep their arcs
    u2 = np.mod(u * 0.6180339887498949 * samples, 1.0)
    for xm, xp in itertools.permutations(crits, 2):
        a, b = _coords(xm), _coords(xp)
        pieces = [_factor_piece(a[i], b[i]) for i in range(2)]
        expected = xm.index - xp.index
        if any(pc is None for pc in pieces):
            dims[(xm.label, xp.label)] = None
            if expected > 0 and analytic_flow_line_count(xm, xp):
                ok = False
            continue
        dim = sum(pc[0] for pc in pieces)
        dims[(xm.label, xp.label)] = dim
        checked += 1
        if dim != expected or expected <= 0:
            ok = False
            continue
        pts = np.stack([pieces[0][1](u), pieces[1][1](u2)], axis=1)
        for y in pts:
            flow = spec.epsilon * np.sin(y)
            # tangent directions: coordinate axes along which the manifold is an arc
            tu = [i for i in range(2) if a[i] == 0.0]
            ts = [i for i in range(2) if b[i] == math.pi]
            for i in set(tu) & set(ts):
                if abs(flow[i]) < 1e-15 and pieces[i][0] == 1:
                    ok = False
            eye = np.eye(2)
            nu = eye[:, [i for i in range(2) if i not in tu]]
            ns = eye[:, [i for i in range(2) if i not in ts]]
            if np.linalg.matrix_rank(np.hstack([eye[:, tu], eye[:, ts]])) < 2:
                ok = False
            margin = min(margin, _min_principal_angle(nu, ns))
    return MorseSmaleReport(ok and margin > 0, margin, checked, dims)
