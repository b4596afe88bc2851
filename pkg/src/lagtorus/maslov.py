"""Symplectic areas and Maslov indices of the disk classes bounded by the torus.

Sign convention: areas integrate ``d(p . dq)`` and Maslov indices use frames
that are symplectic for the same 2-form, so the geodesic disk has area ``2*pi``
and index ``2``.  ``sphere.symplectic_form`` is the negative of this form;
Lagrangian and invariance checks do not depend on the sign.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import (
    FrameDegeneracy,
    InvalidPlaneLoop,
    MonotonicityViolation,
    NonClosedBoundary,
    NonInteger,
    ResolutionTooLow,
)
from .sphere import CotangentPoint, dlambda_arrays, project_tangent_arrays
from .torus import (
    TWO_PI,
    FrameAtNorthPole,
    distance_to_torus,
    embed_arrays,
    embed_differential_arrays,
)

MIN_RESOLUTION = 64
MAX_RESOLUTION = 2**16
SNAP_TOL = 0.1
MAX_PHASE_JUMP = math.pi / 2
MAX_PLANE_GAP = math.pi / 8
MAX_FRAME_CONDITION = 1e6
RADIAL_STEPS = 128


class DiskKind(str, enum.Enum):
    FIBER = "FiberDisk"
    GEODESIC = "GeodesicDisk"
    CONSTANT = "Constant"


# ---------------------------------------------------------------------------
# Filling pieces


@dataclass(frozen=True)
class FillingPiece:
    """A map (s, theta) in [0,1] x R/2piZ -> T*S^n with analytic partials.

    ``evaluate`` returns ``(q, p, dq_ds, dp_ds, dq_dth, dp_dth)``, each with a
    trailing ambient axis.  Pieces are glued radially: the ``s = 1`` edge of one
    piece is the ``s = 0`` edge of the next.
    """

    name: str
    evaluate: Callable

    def point(self, s, theta):
        q, p, *_ = self.evaluate(np.asarray(s, float), np.asarray(theta, float))
        return q, p


def _fiber_piece(frame: FrameAtNorthPole, center) -> FillingPiece:
    N, e1, e2 = frame.N, frame.e1, frame.e2
    c = np.asarray(center, dtype=float)

    def evaluate(s, th):
        s = np.asarray(s)[..., None]
        th = np.asarray(th)[..., None]
        u = np.cos(th) * e1 + np.sin(th) * e2
        du = -np.sin(th) * e1 + np.cos(th) * e2
        shape = np.broadcast_shapes(s.shape, th.shape)[:-1] + N.shape
        q = np.broadcast_to(N, shape)
        zero = np.zeros(shape)
        p = c + s * (u - c)
        return q, p + zero, zero, (u - c) + zero, zero, s * du + zero

    return FillingPiece("fiber_disk", evaluate)


def _great_circle(frame: FrameAtNorthPole, th):
    return frame.N * np.cos(th) + frame.e1 * np.sin(th), -frame.N * np.sin(th) + frame.e1 * np.cos(th)


def _cap_piece(frame: FrameAtNorthPole, center) -> FillingPiece:
    c = np.asarray(center, dtype=float)

    def evaluate(s, th):
        s = np.asarray(s)[..., None]
        th = np.asarray(th)[..., None]
        g, dg = _great_circle(frame, th)
        w = (1.0 - s) * c + s * g
        nw = np.linalg.norm(w, axis=-1, keepdims=True)
        q = w / nw

        def push(dw):
            return (dw - np.sum(q * dw, axis=-1, keepdims=True) * q) / nw

        zero = np.zeros_like(q)
        return q, zero, push(g - c + zero), zero, push(s * dg + zero), zero

    return FillingPiece("zero_section_cap", evaluate)


def _annulus_piece(frame: FrameAtNorthPole) -> FillingPiece:
    def evaluate(s, th):
        s = np.asarray(s)[..., None]
        th = np.asarray(th)[..., None]
        g, dg = _great_circle(frame, th)
        zero = np.zeros(np.broadcast_shapes(s.shape, g.shape))
        return g + zero, s * dg + zero, zero, dg + zero, dg + zero, -s * g + zero

    return FillingPiece("momentum_annulus", evaluate)


# ---------------------------------------------------------------------------
# Disk classes


@dataclass(frozen=True)
class DiskClass:
    kind: DiskKind
    frame: FrameAtNorthPole
    boundary_coords: Callable  # theta -> (t, v) torus angles
    pieces: tuple = ()
    center_label: str = "standard"

    def boundary_loop(self, theta):
        t, v = self.boundary_coords(np.asarray(theta, float))
        return embed_arrays(t, v, self.frame)

    def boundary_point(self, theta: float) -> CotangentPoint:
        q, p = self.boundary_loop(theta)
        return CotangentPoint(q, p)

    def validate(self, samples: int = 16) -> None:
        """Check closedness, that the boundary lies on L, and that pieces glue."""
        q0, p0 = self.boundary_loop(0.0)
        q1, p1 = self.boundary_loop(TWO_PI)
        gap = math.hypot(np.linalg.norm(q1 - q0), np.linalg.norm(p1 - p0))
        if gap > 1e-10:
            raise NonClosedBoundary(f"boundary endpoints differ by {gap:.3e}")
        for th in np.linspace(0.0, TWO_PI, samples, endpoint=False):
            d = distance_to_torus(self.boundary_point(th), self.frame)
            if d > 1e-9:
                raise NonClosedBoundary(f"boundary leaves the torus (distance {d:.3e})")
        if not self.pieces:
            return
        th = np.linspace(0.0, TWO_PI, samples, endpoint=False)
        for a, b in zip(self.pieces, self.pieces[1:]):
            qa, pa = a.point(1.0, th)
            qb, pb = b.point(0.0, th)
            if max(np.max(np.abs(qa - qb)), np.max(np.abs(pa - pb))) > 1e-10:
                raise NonClosedBoundary(f"pieces {a.name} and {b.name} do not glue")
        qe, pe = self.pieces[-1].point(1.0, th)
        qb, pb = self.boundary_loop(th)
        if max(np.max(np.abs(qe - qb)), np.max(np.abs(pe - pb))) > 1e-10:
            raise NonClosedBoundary("outer edge of the filling is not the boundary loop")
        qc, pc = self.pieces[0].point(0.0, th)
        if max(np.ptp(qc, axis=0).max(), np.ptp(pc, axis=0).max()) > 1e-12:
            raise NonClosedBoundary("filling has no common center point")


def build_filling(kind, frame: Optional[FrameAtNorthPole] = None, center=None) -> DiskClass:
    """Build the standard filling of a generator class.

    ``center`` moves the point the radial paths start from: a fiber covector
    for the fiber disk, a point of the open hemisphere ``{q . e2 > 0}`` for
    the cap of the geodesic disk.
    """
    kind = DiskKind(kind)
    frame = frame or FrameAtNorthPole()
    if kind is DiskKind.CONSTANT:
        return DiskClass(kind, frame, lambda th: (np.zeros_like(th), np.zeros_like(th)))
    if kind is DiskKind.FIBER:
        c = np.zeros_like(frame.N) if center is None else np.asarray(center, float)
        if abs(np.dot(c, frame.N)) > 1e-12 or np.linalg.norm(c) >= 1.0:
            raise ValueError("fiber center must be a covector at N of norm < 1")
        label = "standard" if center is None else "shifted"
        return DiskClass(kind, frame, lambda th: (np.zeros_like(th), th), (_fiber_piece(frame, c),), label)
    c = frame.e2 if center is None else np.asarray(center, float)
    c = c / np.linalg.norm(c)
    if np.dot(c, frame.e2) <= 1e-6:
        raise ValueError("cap center must lie in the open hemisphere around e2")
    label = "standard" if center is None else "shifted"
    return DiskClass(
        kind,
        frame,
        lambda th: (th, np.zeros_like(th)),
        (_cap_piece(frame, c), _annulus_piece(frame)),
        label,
    )


ALTERNATE_CENTERS = {
    DiskKind.FIBER: lambda fr: 0.35 * fr.e1 + 0.2 * fr.e2,
    DiskKind.GEODESIC: lambda fr: fr.e2 + 0.6 * fr.N + 0.3 * fr.e1,
}


def alternate_filling(kind, frame: Optional[FrameAtNorthPole] = None) -> DiskClass:
    """Same class, radial structure centred at a different base point."""
    kind = DiskKind(kind)
    frame = frame or FrameAtNorthPole()
    if kind is DiskKind.CONSTANT:
        return build_filling(kind, frame)
    return build_filling(kind, frame, center=ALTERNATE_CENTERS[kind](frame))


# ---------------------------------------------------------------------------
# Areas


def _periodic_grid(resolution):
    return np.arange(resolution) * (TWO_PI / resolution)


def symplectic_area(d: DiskClass, resolution: int = 512) -> float:
    """Area by Stokes: signed sum of loop integrals of p . dq over the piece edges."""
    if resolution < MIN_RESOLUTION:
        raise ValueError(f"resolution must be >= {MIN_RESOLUTION}")
    d.validate()
    if d.kind is DiskKind.CONSTANT:
        return 0.0
    th = _periodic_grid(resolution)
    total = 0.0
    for piece in d.pieces:
        for s, sign in ((1.0, 1.0), (0.0, -1.0)):
            q, p, _, _, dq_th, _ = piece.evaluate(np.full_like(th, s), th)
            # periodic trapezoid rule
            total += sign * float(np.sum(np.sum(p * dq_th, axis=-1))) * (TWO_PI / resolution)
    return total


def direct_area(d: DiskClass, resolution: int = 512) -> float:
    """Area by midpoint quadrature of the 2-form over each filling piece."""
    if d.kind is DiskKind.CONSTANT:
        return 0.0
    ds = 1.0 / resolution
    s = (np.arange(resolution) + 0.5) * ds
    th = (np.arange(resolution) + 0.5) * (TWO_PI / resolution)
    S, TH = np.meshgrid(s, th, indexing="ij")
    total = 0.0
    for piece in d.pieces:
        _, _, dq_s, dp_s, dq_th, dp_th = piece.evaluate(S, TH)
        total += float(np.sum(dlambda_arrays(dq_s, dp_s, dq_th, dp_th))) * ds * (TWO_PI / resolution)
    return total


# ---------------------------------------------------------------------------
# Lagrangian plane loops and the Maslov index


def _orthonormal(basis):
    q, _ = np.linalg.qr(basis)
    return q


@dataclass(frozen=True)
class LagrangianPlaneLoop:
    """Closed loop of Lagrangian n-planes in R^{2n} = {(x, y)}, omega = dx ^ dy.

    ``samples`` has shape ``(M, 2n, n)``; column ``j`` of sample ``k`` is the
    ``j``-th basis vector of the ``k``-th plane.  The loop closes from the last
    sample back to the first.
    """

    samples: np.ndarray
    validate: bool = field(default=True, compare=False)

    def __post_init__(self):
        arr = np.array(self.samples, dtype=float)
        if arr.ndim != 3 or arr.shape[1] != 2 * arr.shape[2]:
            raise InvalidPlaneLoop("samples must have shape (M, 2n, n)")
        arr.setflags(write=False)
        object.__setattr__(self, "samples", arr)
        if self.validate:
            self.check()

    @property
    def resolution(self) -> int:
        return self.samples.shape[0]

    @property
    def n(self) -> int:
        return self.samples.shape[2]

    def unitary(self) -> np.ndarray:
        q = _orthonormal(self.samples)
        n = self.n
        return q[:, :n, :] + 1j * q[:, n:, :]

    def check(self) -> None:
        n = self.n
        sv = np.linalg.svd(self.samples, compute_uv=False)
        if np.min(sv) < 1e-6:
            raise InvalidPlaneLoop(f"degenerate basis (smallest singular value {np.min(sv):.2e})")
        q = _orthonormal(self.samples)
        x, y = q[:, :n, :], q[:, n:, :]
        iso = np.einsum("kai,kaj->kij", x, y) - np.einsum("kai,kaj->kij", y, x)
        if np.max(np.abs(iso)) > 1e-9:
            raise InvalidPlaneLoop(f"sample is not Lagrangian (residual {np.max(np.abs(iso)):.2e})")
        nxt = np.roll(q, -1, axis=0)
        cosines = np.linalg.svd(np.einsum("kai,kaj->kij", q, nxt), compute_uv=False)
        gap = float(np.arccos(np.clip(np.min(cosines), -1.0, 1.0)))
        if gap > MAX_PLANE_GAP:
            raise ResolutionTooLow(f"consecutive planes {gap:.3f} rad apart (limit pi/8)")

    def concatenate(self, other: "LagrangianPlaneLoop") -> "LagrangianPlaneLoop":
        return LagrangianPlaneLoop(np.concatenate([self.samples, other.samples]))


def winding_number(z: np.ndarray) -> float:
    """Total winding of a closed sequence of unit complex numbers, in turns."""
    steps = np.angle(np.roll(z, -1) / z)
    if np.max(np.abs(steps)) > MAX_PHASE_JUMP:
        raise ResolutionTooLow(f"phase jump {np.max(np.abs(steps)):.3f} exceeds pi/2")
    return float(np.sum(steps)) / TWO_PI


def maslov_index(loop: LagrangianPlaneLoop) -> int:
    det = np.linalg.det(loop.unitary())
    w = winding_number(det**2)
    k = round(w)
    if abs(w - k) > SNAP_TOL:
        raise NonInteger(f"winding {w:.4f} is not within {SNAP_TOL} of an integer")
    return int(k)


# ---------------------------------------------------------------------------
# Trivialization by radial transport


def _initial_frame(q, p):
    """Symplectic basis (e1, e2, f1, f2) of T_(q,p) T*S^2 for the form d(p . dq)."""
    a = np.eye(q.shape[-1])
    a1 = a[np.argmin(np.abs(q))]
    a1 = a1 - np.dot(a1, q) * q
    a1 /= np.linalg.norm(a1)
    a2 = np.cross(q, a1)
    frame = []
    for ai in (a1, a2):
        frame.append(np.concatenate([ai, -np.dot(p, ai) * q]))
    for ai in (a1, a2):
        frame.append(np.concatenate([np.zeros_like(ai), -ai]))
    return np.array(frame)


def _pair(a, b, k):
    return dlambda_arrays(a[..., :k], a[..., k:], b[..., :k], b[..., k:])


def _symplectic_gram_schmidt(F, k):
    """Re-symplectify a batch of frames ``F[m, 4, 2k]`` ordered (e1, e2, f1, f2)."""
    e1, e2, f1, f2 = (F[:, i, :] for i in range(4))
    e1 = e1 / np.linalg.norm(e1, axis=-1, keepdims=True)
    f1 = f1 / _pair(e1, f1, k)[:, None]
    e2 = e2 - _pair(e2, f1, k)[:, None] * e1 + _pair(e2, e1, k)[:, None] * f1
    e2 = e2 / np.linalg.norm(e2, axis=-1, keepdims=True)
    f2 = f2 - _pair(f2, f1, k)[:, None] * e1 + _pair(f2, e1, k)[:, None] * f1
    f2 = f2 / _pair(e2, f2, k)[:, None]
    return np.stack([e1, e2, f1, f2], axis=1)


def transported_frames(d: DiskClass, theta: np.ndarray, radial_steps: int) -> np.ndarray:
    """Symplectic frames at the boundary points ``theta``, moved in from the center."""
    k = d.frame.N.shape[0]
    m = theta.shape[0]
    q0, p0 = d.pieces[0].point(0.0, 0.0)
    F = np.broadcast_to(_initial_frame(q0, p0), (m, 4, 2 * k)).copy()
    s = np.arange(1, radial_steps + 1) / radial_steps
    for piece in d.pieces:
        for sj in s:
            q, p = piece.point(np.full(m, sj), theta)
            dq, dp = project_tangent_arrays(q[:, None, :], p[:, None, :], F[..., :k], F[..., k:])
            F = _symplectic_gram_schmidt(np.concatenate([dq, dp], axis=-1), k)
    sv = np.linalg.svd(F, compute_uv=False)
    cond = float(np.max(sv[:, 0] / sv[:, -1]))
    if not np.isfinite(cond) or cond > MAX_FRAME_CONDITION:
        raise FrameDegeneracy(f"transported frame condition number {cond:.3e}")
    return F


def boundary_plane_loop(d: DiskClass, resolution: int = 512, radial_steps: Optional[int] = None) -> LagrangianPlaneLoop:
    """Tangent planes of L along the boundary, in a trivialization over the filling."""
    if resolution < MIN_RESOLUTION:
        raise ValueError(f"resolution must be >= {MIN_RESOLUTION}")
    d.validate()
    th = _periodic_grid(resolution)
    if d.kind is DiskKind.CONSTANT:
        base = np.array([[1.0, 0.0], [0.0, 1.0], [0.0, 0.0], [0.0, 0.0]])
        return LagrangianPlaneLoop(np.broadcast_to(base, (resolution, 4, 2)))
    k = d.frame.N.shape[0]
    if k != 3:
        raise ValueError("radial transport is implemented for T*S^2 only")
    radial_steps = radial_steps or RADIAL_STEPS
    F = transported_frames(d, th, radial_steps)
    t, v = d.boundary_coords(th)
    dq_t, dp_t, dq_v, dp_v = embed_differential_arrays(t, v, d.frame)
    cols = [np.concatenate([dq_t, dp_t], axis=-1), np.concatenate([dq_v, dp_v], axis=-1)]
    e, f = F[:, :2, :], F[:, 2:, :]
    out = np.empty((resolution, 4, 2))
    for j, w in enumerate(cols):
        w = w[:, None, :]
        out[:, :2, j] = _pair(w, f, k)
        out[:, 2:, j] = _pair(e, w, k)
    return LagrangianPlaneLoop(out)


def disk_maslov_index(d: DiskClass, resolution: int = 512, max_resolution: int = MAX_RESOLUTION) -> int:
    """Maslov index of a disk class, doubling the resolution on sampling failures."""
    res = resolution
    while True:
        try:
            return maslov_index(boundary_plane_loop(d, res))
        except (ResolutionTooLow, NonInteger):
            if res * 2 > max_resolution:
                raise
            res *= 2


def ambient_maslov_index(d: DiskClass, resolution: int = 512) -> int:
    """Maslov index read off in the ambient R^{2(n+1)}, independent of the filling.

    T*S^n is a symplectic submanifold of T*R^{n+1} whose symplectic normal
    bundle has the global frame ``(0, q), (q, -p)``.  Adding the normal line
    ``(0, q)`` to each tangent plane of L therefore leaves the index unchanged,
    and the enlarged planes can be measured in the constant trivialization.
    """
    d.validate()
    if d.kind is DiskKind.CONSTANT:
        return 0
    th = _periodic_grid(resolution)
    t, v = d.boundary_coords(th)
    q, _ = embed_arrays(t, v, d.frame)
    dq_t, dp_t, dq_v, dp_v = embed_differential_arrays(t, v, d.frame)
    # columns x + i y with x = dp, y = dq
    cols = [dp_t + 1j * dq_t, dp_v + 1j * dq_v, q + 0j]
    Z = np.stack(cols, axis=-1)
    det = np.linalg.det(Z)
    w = winding_number((det / np.abs(det)) ** 2)
    k = round(w)
    if abs(w - k) > SNAP_TOL:
        raise NonInteger(f"winding {w:.4f} is not within {SNAP_TOL} of an integer")
    return int(k)


# ---------------------------------------------------------------------------
# Monotonicity and index arithmetic


@dataclass(frozen=True)
class Monotonicity:
    constant: float
    minimal_maslov: int
    areas: dict
    indices: dict


def monotonicity_check(
    resolution: int = 512, frame: Optional[FrameAtNorthPole] = None, area_tol: float = 1e-9
) -> Monotonicity:
    frame = frame or FrameAtNorthPole()
    areas, indices = {}, {}
    for kind in (DiskKind.FIBER, DiskKind.GEODESIC):
        d = build_filling(kind, frame)
        areas[kind.value] = symplectic_area(d, resolution)
        indices[kind.value] = disk_maslov_index(d, resolution)
    fa, fi = areas[DiskKind.FIBER.value], indices[DiskKind.FIBER.value]
    if fi == 0 and abs(fa) > area_tol:
        raise MonotonicityViolation(f"fiber disk has index 0 but area {fa:.3e}")
    if fi != 0 and not math.isclose(fa / fi, areas["GeodesicDisk"] / indices["GeodesicDisk"], rel_tol=1e-6):
        raise MonotonicityViolation("area/index ratios of the generators differ")
    gi = indices[DiskKind.GEODESIC.value]
    if gi == 0:
        raise MonotonicityViolation("geodesic disk has index 0")
    constant = areas[DiskKind.GEODESIC.value] / gi
    if constant <= 0:
        raise MonotonicityViolation(f"area/index ratio {constant:.3e} is not positive")
    positive = [abs(i) for i in indices.values() if i != 0]
    return Monotonicity(constant, min(positive), areas, indices)


def expected_dimension(i_minus: int, i_plus: int, n: int) -> int:
    """Dimension of the strip moduli space in Maslov class ``n``."""
    return i_minus - i_plus + n
