import itertools
import math

import numpy as np
import pytest

from lagtorus.errors import InvalidPlaneLoop, NonClosedBoundary, ResolutionTooLow
from lagtorus.maslov import (
    DiskClass,
    DiskKind,
    LagrangianPlaneLoop,
    alternate_filling,
    ambient_maslov_index,
    boundary_plane_loop,
    build_filling,
    direct_area,
    disk_maslov_index,
    expected_dimension,
    maslov_index,
    monotonicity_check,
    symplectic_area,
    winding_number,
)
from lagtorus.torus import TWO_PI, FrameAtNorthPole, embed_arrays


def rotating_loop(k, m=256, reparam=None):
    """Line e^{i k th / 2} R in C, times the constant line R: Maslov index k."""
    th = np.arange(m) * (TWO_PI / m)
    if reparam is not None:
        th = reparam(th)
    a = 0.5 * k * th
    s = np.zeros((m, 4, 2))
    s[:, 0, 0] = np.cos(a)  # x1
    s[:, 2, 0] = np.sin(a)  # y1
    s[:, 1, 1] = 1.0  # x2
    return s


def random_unitary_as_real(rng):
    z = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    u, _ = np.linalg.qr(z)
    return np.block([[u.real, -u.imag], [u.imag, u.real]])


# ---------------------------------------------------------------------------
# plane loops with known answers


@pytest.mark.parametrize("k", [-3, -1, 0, 1, 2, 5])
def test_rotating_loop_index(k):
    assert maslov_index(LagrangianPlaneLoop(rotating_loop(k))) == k


def test_rotation_in_both_factors_adds():
    m = 256
    th = np.arange(m) * (TWO_PI / m)
    s = np.zeros((m, 4, 2))
    s[:, 0, 0], s[:, 2, 0] = np.cos(th), np.sin(th)  # index 2
    s[:, 1, 1], s[:, 3, 1] = np.cos(1.5 * th), np.sin(1.5 * th)  # index 3
    assert maslov_index(LagrangianPlaneLoop(s)) == 5


def test_concatenation_is_additive():
    rng = np.random.default_rng(0)
    for _ in range(20):
        k1, k2 = rng.integers(-4, 5, size=2)
        a = LagrangianPlaneLoop(rotating_loop(int(k1), 128))
        b = LagrangianPlaneLoop(rotating_loop(int(k2), 128))
        assert maslov_index(a.concatenate(b)) == k1 + k2


def test_invariant_under_unitary_change_of_frame():
    rng = np.random.default_rng(1)
    for k in (-2, 1, 4):
        U = random_unitary_as_real(rng)
        s = np.einsum("ab,mbj->maj", U, rotating_loop(k))
        assert maslov_index(LagrangianPlaneLoop(s)) == k


def test_invariant_under_change_of_basis_within_plane():
    rng = np.random.default_rng(2)
    s = rotating_loop(3)
    # a smoothly varying invertible change of basis inside each plane
    th = np.arange(s.shape[0]) * (TWO_PI / s.shape[0])
    g = np.empty((s.shape[0], 2, 2))
    g[:, 0, 0], g[:, 0, 1] = 2 + np.cos(th), 0.5 * np.sin(th)
    g[:, 1, 0], g[:, 1, 1] = 0.3, 1.5 + rng.uniform(0, 0.1)
    assert maslov_index(LagrangianPlaneLoop(s @ g)) == 3


def test_invariant_under_reparametrization():
    reparam = lambda th: th + 0.4 * np.sin(th)  # noqa: E731
    assert maslov_index(LagrangianPlaneLoop(rotating_loop(4, reparam=reparam))) == 4


def test_coarse_loop_is_rejected():
    with pytest.raises(ResolutionTooLow):
        LagrangianPlaneLoop(rotating_loop(6, m=16))


def test_non_lagrangian_sample_is_rejected():
    s = rotating_loop(1)
    s[5] = np.array([[1.0, 0], [0, 0], [0, 1.0], [0, 0]])  # span(x1, y1)
    with pytest.raises(InvalidPlaneLoop):
        LagrangianPlaneLoop(s)


def test_bad_shape_is_rejected():
    with pytest.raises(InvalidPlaneLoop):
        LagrangianPlaneLoop(np.zeros((10, 3, 2)))


def test_winding_number_of_circle():
    z = np.exp(1j * np.arange(100) * (3 * TWO_PI / 100))
    assert winding_number(z) == pytest.approx(3.0)


# ---------------------------------------------------------------------------
# disk classes


def _loop_integral_p_dq(loop, m):
    """Oracle: periodic quadrature of p . dq with dq from central differences."""
    th = np.arange(m) * (TWO_PI / m)
    h = 1e-5
    q, p = loop(th)
    qa, _ = loop(th + h)
    qb, _ = loop(th - h)
    return float(np.sum(np.sum(p * (qa - qb) / (2 * h), axis=1))) * TWO_PI / m


@pytest.mark.parametrize("kind", [DiskKind.FIBER, DiskKind.GEODESIC])
def test_area_matches_boundary_quadrature_oracle(kind, tilted_frame):
    d = build_filling(kind, tilted_frame)
    oracle = _loop_integral_p_dq(d.boundary_loop, 1 << 14)
    assert symplectic_area(d) == pytest.approx(oracle, abs=1e-6)


def test_disk_areas(frame):
    assert abs(symplectic_area(build_filling(DiskKind.FIBER, frame))) <= 1e-9
    assert symplectic_area(build_filling(DiskKind.GEODESIC, frame)) == pytest.approx(TWO_PI, abs=1e-6)
    assert symplectic_area(build_filling(DiskKind.CONSTANT, frame)) == 0.0


@pytest.mark.parametrize("kind", [DiskKind.FIBER, DiskKind.GEODESIC])
def test_stokes_area_matches_interior_quadrature(kind):
    d = build_filling(kind)
    assert direct_area(d, 512) == pytest.approx(symplectic_area(d, 512), abs=1e-4)


def test_disk_indices(frame):
    assert disk_maslov_index(build_filling(DiskKind.FIBER, frame)) == 0
    assert disk_maslov_index(build_filling(DiskKind.GEODESIC, frame)) == 2
    assert disk_maslov_index(build_filling(DiskKind.CONSTANT, frame)) == 0


def test_indices_in_tilted_frame(tilted_frame):
    assert disk_maslov_index(build_filling(DiskKind.GEODESIC, tilted_frame), 256) == 2
    assert disk_maslov_index(build_filling(DiskKind.FIBER, tilted_frame), 256) == 0


@pytest.mark.parametrize("kind,expected", [(DiskKind.FIBER, 0), (DiskKind.GEODESIC, 2)])
def test_second_trivialization_and_ambient_oracle(kind, expected):
    assert disk_maslov_index(alternate_filling(kind), 256) == expected
    assert ambient_maslov_index(build_filling(kind), 512) == expected


def test_boundary_loop_has_the_right_resolution():
    loop = boundary_plane_loop(build_filling(DiskKind.GEODESIC), 128)
    assert loop.resolution == 128 and loop.n == 2


def test_resolution_floor():
    with pytest.raises(ValueError):
        boundary_plane_loop(build_filling(DiskKind.GEODESIC), 32)


def test_open_boundary_is_rejected(frame):
    d = DiskClass(DiskKind.FIBER, frame, lambda th: (np.zeros_like(th), 0.5 * th))
    with pytest.raises(NonClosedBoundary):
        d.validate()


def test_boundary_off_the_torus_is_rejected(frame):
    good = build_filling(DiskKind.FIBER, frame)
    shifted = DiskClass(DiskKind.FIBER, frame, lambda th: (np.zeros_like(th), th), good.pieces)
    shifted.validate()

    class Off(DiskClass):
        def boundary_loop(self, theta):
            q, p = embed_arrays(np.zeros_like(theta), theta, self.frame)
            return q, 1.5 * p

    with pytest.raises(NonClosedBoundary):
        Off(DiskKind.FIBER, frame, lambda th: (np.zeros_like(th), th)).validate()


def test_bad_centers_are_rejected(frame):
    with pytest.raises(ValueError):
        build_filling(DiskKind.FIBER, frame, center=frame.N * 0.1)
    with pytest.raises(ValueError):
        build_filling(DiskKind.GEODESIC, frame, center=-frame.e2)


def test_monotonicity():
    m = monotonicity_check(256)
    assert m.constant == pytest.approx(math.pi, abs=1e-6)
    assert m.minimal_maslov == 2


def test_dimension_formula_table():
    for i_minus, i_plus, n in itertools.product(range(3), range(3), range(-2, 3)):
        assert expected_dimension(i_minus, i_plus, n) == i_minus - i_plus + n


def test_higher_dimensional_frame_is_not_supported_by_cap_transport():
    # transport uses a cross product, so fillings are built only for T*S^2
    f3 = FrameAtNorthPole.standard(3)
    d = build_filling(DiskKind.GEODESIC, f3)
    with pytest.raises(ValueError):
        disk_maslov_index(d, 64)
