"""Check suites: run each computation and record it as a CheckResult."""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import asdict, dataclass

import numpy as np

from . import __version__, _kernels
from .highdim import (
    HighDimConfig,
    belgun_matveev_check,
    highdim_embed_arrays,
    highdim_lagrangian_residual,
    highdim_morse_complex,
    hypersphere_reflection_diagnosis,
)
from .maslov import (
    DiskKind,
    alternate_filling,
    ambient_maslov_index,
    build_filling,
    direct_area,
    disk_maslov_index,
    expected_dimension,
    monotonicity_check,
    symplectic_area,
)
from .morse import (
    MorseFunctionSpec,
    closed_form_trajectory,
    critical_points,
    homology,
    morse_differential,
    negative_gradient_trajectory,
    verify_morse_smale,
)
from .report import CheckResult, assemble_report, interval
from .sphere import random_cotangent_points
from .symmetry import (
    fixed_locus_intersection,
    great_circle_reflection,
    verify_critical_points_fixed,
    verify_f_invariance,
    verify_symplectic,
    verify_torus_invariance,
)
from .torus import (
    TWO_PI,
    FrameAtNorthPole,
    TorusPoint,
    embed_arrays,
    embed_differential_arrays,
    fiber_intersections,
    fiber_preimages_arrays,
    geodesic_flow_arrays,
    min_separation_ratio,
    relative_homotopy_generators,
    verify_lagrangian,
)

SUITES = ("lagrangian", "maslov", "morse", "symmetry", "highdim")
FINE_GRID = 1024
EPSILON_SWEEP = (0.005, 0.01, 0.05)


@dataclass(frozen=True)
class CliConfig:
    n: int = 2
    epsilon: float = 0.01
    grid: int = 64
    resolution: int = 512
    tol_geom: float = 1e-12
    seed: int = 0
    timings: bool = False

    def __post_init__(self):
        if self.grid < 2:
            raise ValueError("grid must be at least 2")
        if self.resolution < 64:
            raise ValueError("resolution must be at least 64")
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if not 2 <= self.n <= 6:
            raise ValueError("n must lie in [2, 6]")

    @property
    def n_highdim(self) -> int:
        return self.n if self.n >= 3 else 3

    def echo(self) -> dict:
        d = asdict(self)
        d.pop("timings")
        d["n_highdim"] = self.n_highdim
        d["backend"] = _kernels.BACKEND
        return d


class _Recorder:
    def __init__(self, cfg: CliConfig):
        self.cfg = cfg
        self.results: list[CheckResult] = []
        self._t0 = time.perf_counter()

    def start(self):
        self._t0 = time.perf_counter()

    def add(self, claim_id, anchor, measured, expected, tolerance=0.0):
        ms = int(round((time.perf_counter() - self._t0) * 1000)) if self.cfg.timings else 0
        self.results.append(CheckResult.evaluate(claim_id, anchor, _plain(measured), _plain(expected), tolerance, ms))
        self._t0 = time.perf_counter()


def _plain(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating,)):
        return float(v)
    if isinstance(v, (tuple, list)):
        return ",".join(str(_plain(x)) for x in v)
    return v


# ---------------------------------------------------------------------------


def lagrangian_suite(cfg: CliConfig) -> list[CheckResult]:
    rec = _Recorder(cfg)
    frame = FrameAtNorthPole()
    rng = np.random.default_rng(cfg.seed)

    rec.add("lagrangian_embedding", "phi(T^2) is Lagrangian", verify_lagrangian(cfg.grid, frame), 0.0, 1e-12)
    rec.add(
        "lagrangian_embedding_fine",
        "phi(T^2) is Lagrangian (1024 x 1024 grid)",
        verify_lagrangian(FINE_GRID, frame),
        0.0,
        1e-10,
    )

    t, v = rng.uniform(0, TWO_PI, (2, 1000))
    h = 1e-6
    dq_t, dp_t, dq_v, dp_v = embed_differential_arrays(t, v, frame)
    qa, pa = embed_arrays(t + h, v, frame)
    qb, pb = embed_arrays(t - h, v, frame)
    qc, pc = embed_arrays(t, v + h, frame)
    qd, pd = embed_arrays(t, v - h, frame)
    fd = max(
        np.max(np.abs((qa - qb) / (2 * h) - dq_t)),
        np.max(np.abs((pa - pb) / (2 * h) - dp_t)),
        np.max(np.abs((qc - qd) / (2 * h) - dq_v)),
        np.max(np.abs((pc - pd) / (2 * h) - dp_v)),
    )
    rec.add("embedding_differential_fd", "closed-form differential of phi", fd, 0.0, 1e-8)

    ratio = min_separation_ratio(256, frame)
    rec.add("embedding_injective_sampled", "phi is an embedding", ratio, interval(0.1, closed_lo=False))

    q, p = random_cotangent_points(rng, 1000, 2)
    p /= np.linalg.norm(p, axis=1, keepdims=True)
    s, tt = rng.uniform(-10, 10, (2, 1000))
    q1, p1 = geodesic_flow_arrays(*geodesic_flow_arrays(q, p, s), tt)
    q2, p2 = geodesic_flow_arrays(q, p, s + tt)
    flow = float(np.max(np.hypot(np.linalg.norm(q1 - q2, axis=1), np.linalg.norm(p1 - p2, axis=1))))
    rec.add("geodesic_flow_group_law", "phi_t o phi_s = phi_{s+t}", flow, 0.0, 1e-10)
    energy = float(np.max(np.abs(np.linalg.norm(p1, axis=1) - 1.0)))
    rec.add("geodesic_flow_energy", "|p| is conserved by the geodesic flow", energy, 0.0, 1e-12)

    qs, _ = random_cotangent_points(rng, 1000, 2)
    ts, vs = fiber_preimages_arrays(qs, frame)
    counts = [len(fiber_intersections(x, frame, cfg.tol_geom).points) for x in qs]
    rec.add("fiber_intersections_count", "L meets each non-polar fiber twice", sum(c == 2 for c in counts), 1000)
    qi, _ = embed_arrays(ts, vs, frame)
    resid = float(np.max(np.linalg.norm(qi - qs[:, None, :], axis=-1)))
    rec.add("fiber_intersections_residual", "preimages lie in the fiber", resid, 0.0, 1e-10)
    poles = [fiber_intersections(sign * frame.N, frame, cfg.tol_geom) for sign in (1.0, -1.0)]
    marker = ",".join(f"circle@t={'0' if x.circle_t == 0 else 'pi'}" if x.is_circle else "points" for x in poles)
    rec.add("fiber_intersections_poles", "L meets the polar fibers in circles", marker, "circle@t=0,circle@t=pi")

    gens = relative_homotopy_generators(frame)
    rec.add("relative_homotopy_rank", "pi_2(T*S^2, L) = Z^3", len(gens), 3)
    return rec.results


def maslov_suite(cfg: CliConfig) -> list[CheckResult]:
    rec = _Recorder(cfg)
    res = cfg.resolution
    fiber = build_filling(DiskKind.FIBER)
    geo = build_filling(DiskKind.GEODESIC)
    const = build_filling(DiskKind.CONSTANT)

    rec.add("area_fiber_disk", "fiber disk has zero area", symplectic_area(fiber, res), 0.0, 1e-9)
    rec.add("maslov_fiber_disk", "fiber disk has Maslov index 0", disk_maslov_index(fiber, res), 0)
    rec.add("area_geodesic_disk", "geodesic disk area", symplectic_area(geo, res), TWO_PI, 1e-6)
    rec.add("maslov_geodesic_disk", "geodesic disk has Maslov index 2", disk_maslov_index(geo, res), 2)
    rec.add("area_constant", "constant disk has zero area", symplectic_area(const, res), 0.0, 0.0)
    rec.add("maslov_constant", "constant disk has Maslov index 0", disk_maslov_index(const, res), 0)

    mono = monotonicity_check(res)
    rec.add("monotonicity_constant", "L is monotone", mono.constant, math.pi, 1e-6)
    rec.add("minimal_maslov_number", "minimal Maslov number 2", mono.minimal_maslov, 2)

    ladder = (res, 2 * res, 4 * res)
    for name, d, idx in (("fiber", fiber, 0), ("geodesic", geo, 2)):
        got = tuple(disk_maslov_index(d, r) for r in ladder)
        rec.add(f"maslov_{name}_resolution_ladder", "index is stable under refinement", got, (idx,) * 3)
    alt = tuple(disk_maslov_index(alternate_filling(k), res) for k in (DiskKind.FIBER, DiskKind.GEODESIC))
    rec.add("maslov_second_trivialization", "index independent of trivialization", alt, (0, 2))
    amb = tuple(ambient_maslov_index(d, res) for d in (fiber, geo))
    rec.add("maslov_ambient_oracle", "index read off in ambient R^6", amb, (0, 2))

    gap = max(abs(symplectic_area(d, 512) - direct_area(d, 512)) for d in (fiber, geo))
    rec.add("area_stokes_vs_direct", "Stokes area equals surface quadrature", gap, 0.0, 1e-5)

    bad = 0
    for im, ip, n in itertools.product(range(3), range(3), range(-2, 3)):
        bad += expected_dimension(im, ip, n) != im - ip + n
    rec.add("dimension_formula", "dim M(x-,x+;n) = i(x-) - i(x+) + n", bad, 0)
    return rec.results


def _morse_summary(spec: MorseFunctionSpec):
    c = morse_differential(spec)
    counts = tuple(int(x) for k in sorted(c.flow_line_counts) for x in c.flow_line_counts[k].ravel())
    return c, counts, homology(c)


def morse_suite(cfg: CliConfig) -> list[CheckResult]:
    rec = _Recorder(cfg)
    spec = MorseFunctionSpec(cfg.epsilon)
    crits = critical_points(spec)
    rec.add("morse_critical_indices", "f is Morse with 4 critical points", tuple(c.index for c in crits), (2, 1, 1, 0))

    c, counts, hom = _morse_summary(spec)
    rec.add("morse_flow_line_counts", "two flow lines between adjacent critical points", counts, (2, 2, 2, 2))
    nonzero = int(sum(int(np.sum(m)) for m in c.differentials.values()))
    rec.add("morse_differential_zero", "Morse differential vanishes mod 2", nonzero, 0)
    rec.add("morse_d_squared", "d o d = 0", c.square_residual(), 0)
    rec.add("morse_homology_ranks", "HF_k(L,L) = H_k(T^2; Z/2)", hom.ranks, (1, 2, 1))
    rec.add("morse_euler_characteristic", "chi(T^2) = 0", hom.euler_characteristic, hom.generator_euler_characteristic)

    ms = verify_morse_smale(spec, 100)
    rec.add("morse_smale", "flat metric is Morse-Smale for f", ms.ok, True)
    rec.add("morse_smale_margin", "transversality margin (rad)", ms.margin, interval(0.1, closed_lo=False))

    sweep = {eps: _morse_summary(MorseFunctionSpec(eps))[1:] for eps in EPSILON_SWEEP}
    same = all(v == sweep[EPSILON_SWEEP[0]] for v in sweep.values())
    rec.add("morse_epsilon_independence", "counts and ranks do not depend on eps", same, True)

    start = TorusPoint(math.pi / 2, math.pi / 3)
    tr = negative_gradient_trajectory(start, spec, 10.0 / spec.epsilon, 0.1 / spec.epsilon)
    cf = closed_form_trajectory(start, spec, tr.times)
    rec.add("morse_rk4_vs_closed_form", "RK4 matches the closed-form flow", float(np.max(np.abs(tr.angles - cf.angles))), 0.0, 1e-8)
    rise = float(max(0.0, np.max(np.diff(tr.values(spec)))))
    rec.add("morse_trajectory_monotone", "f decreases along flow lines", rise, 0.0, 1e-12)
    return rec.results


def symmetry_suite(cfg: CliConfig) -> list[CheckResult]:
    rec = _Recorder(cfg)
    frame = FrameAtNorthPole()
    I = great_circle_reflection(frame)
    spec = MorseFunctionSpec(cfg.epsilon)

    sym = verify_symplectic(I, 10_000, cfg.seed)
    rec.add("involution_square", "I o I = id", sym.involution, 0.0, 1e-14)
    rec.add("involution_preserves_lambda", "I preserves p dq", sym.one_form, 0.0, 1e-12)
    rec.add("involution_preserves_omega", "I is symplectic", sym.two_form, 0.0, 1e-12)
    rec.add("torus_invariance", "I(L) = L with I(phi(t,v)) = phi(t,-v)", verify_torus_invariance(I, cfg.grid, frame), 0.0, 1e-12)

    fix = fixed_locus_intersection(I, frame)
    rec.add("fixed_locus_components", "L n Fix(I) is two circles", fix.count, 2)
    rec.add("fixed_locus_membership", "both circles lie in Fix(I)", fix.membership_residual, 0.0, 1e-12)
    rec.add("fixed_locus_opposite_momenta", "circles swap under p -> -p", fix.momentum_symmetry_residual, 0.0, 1e-12)
    rec.add("fixed_locus_exact", "Fix of (t,v) -> (t,-v) is v in {0, pi}", int(fix.torus_fixed_set_residual), 0)
    rec.add("critical_points_fixed", "critical points of f are fixed by I", verify_critical_points_fixed(I, spec, frame), 0.0, 1e-12)
    rec.add("f_invariance", "f is I-invariant", verify_f_invariance(spec, cfg.grid), 0.0, 1e-15)
    on_fix = sum(cp.coords.v in (0.0, math.pi) for cp in critical_points(spec))
    rec.add("critical_points_on_fixed_circles", "critical points lie on L n Fix(I)", on_fix, 4)
    return rec.results


def highdim_suite(cfg: CliConfig) -> list[CheckResult]:
    rec = _Recorder(cfg)
    n = cfg.n_highdim
    hc = HighDimConfig(n)

    per_axis = min(32, int(2 ** (20 / n)))
    rec.add("highdim_lagrangian", f"S^1 x S^{n - 1} is Lagrangian in T*S^{n}", highdim_lagrangian_residual(hc, per_axis, cfg.seed), 0.0, 1e-11)

    hyp = hypersphere_reflection_diagnosis(hc, seed=cfg.seed)
    rec.add("hypersphere_fix_base_dim", "Fix(I_n) = T*S^{n-1}", hyp.fixed_base_dim, n - 1)
    rec.add("hypersphere_approach_fails", "hypersphere reflection is too large", hyp.approach_fails, True)
    rec.add("hypersphere_involution", "I_n o I_n = id", hyp.involution_residual, 0.0, 1e-14)

    bm = belgun_matveev_check(hc, seed=cfg.seed)
    rec.add("bm_fix_base_dim", "fixed point set is T*S^1", bm.fixed_base_dim, 1)
    rec.add("bm_invariance", "reflection leaves L invariant", bm.invariance_residual, 0.0, 1e-12)
    rec.add("bm_critical_points_fixed", "reflection fixes the critical points", bm.critical_displacement, 0.0, 1e-12)

    hm = highdim_morse_complex(hc, cfg.epsilon)
    idx = tuple(sorted(c.index for c in hm.critical_points))
    rec.add("highdim_morse_indices", "critical indices of the height sum", idx, (0, 1, n - 1, n))
    nonzero = int(sum(int(np.sum(m)) for m in hm.complex.differentials.values()))
    rec.add("highdim_differential_zero", "Morse differential vanishes mod 2", nonzero, 0)
    betti = tuple(1 if k in (0, 1, n - 1, n) else 0 for k in range(n + 1))
    rec.add("highdim_homology_ranks", f"H_*(S^1 x S^{n - 1}; Z/2)", hm.homology.ranks, betti)
    rec.add("highdim_euler_characteristic", "chi(S^1 x S^{n-1}) = 0", hm.homology.euler_characteristic, 0)

    frame = FrameAtNorthPole()
    ang = np.arange(32) * (TWO_PI / 32)
    T, V = np.meshgrid(ang, ang, indexing="ij")
    w = np.cos(V)[..., None] * frame.e1 + np.sin(V)[..., None] * frame.e2
    qa, pa = highdim_embed_arrays(T, w, HighDimConfig(2).frame)
    qb, pb = embed_arrays(T, V, frame)
    exact = float(max(np.max(np.abs(qa - qb)), np.max(np.abs(pa - pb))))
    rec.add("highdim_n2_reproduces_torus", "n = 2 case is the torus", exact, 0.0, 0.0)
    return rec.results


SUITE_FUNCS = {
    "lagrangian": lagrangian_suite,
    "maslov": maslov_suite,
    "morse": morse_suite,
    "symmetry": symmetry_suite,
    "highdim": highdim_suite,
}


def run_suites(names, cfg: CliConfig):
    results = []
    for name in names:
        results.extend(SUITE_FUNCS[name](cfg))
    return assemble_report(results, cfg.echo(), __version__)
