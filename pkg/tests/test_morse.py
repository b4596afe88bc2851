import itertools
import math

import numpy as np
import pytest
from scipy.integrate import solve_ivp

from lagtorus.errors import IndexGap, NotAComplex, NotMorse, StepTooLarge
from lagtorus.morse import (
    MorseComplex,
    MorseFunctionSpec,
    analytic_flow_line_count,
    closed_form_flow,
    closed_form_trajectory,
    count_flow_lines,
    critical_points,
    gf2_rank,
    homology,
    integrate_circle_flow,
    morse_differential,
    negative_gradient_trajectory,
    verify_morse_smale,
)
from lagtorus.torus import TWO_PI, TorusPoint


def brute_rank_gf2(m):
    """Oracle: log2 of the size of the row span, by enumerating all subsets."""
    m = np.asarray(m, dtype=np.int64) % 2
    span = set()
    for mask in itertools.product((0, 1), repeat=m.shape[0]):
        span.add(tuple(np.asarray(mask) @ m % 2))
    return int(round(math.log2(len(span))))


def test_gf2_rank_against_enumeration():
    rng = np.random.default_rng(0)
    for _ in range(200):
        rows, cols = rng.integers(1, 7, size=2)
        m = rng.integers(0, 2, size=(rows, cols))
        assert gf2_rank(m) == brute_rank_gf2(m)


def test_gf2_rank_edge_cases():
    assert gf2_rank(np.zeros((0, 3))) == 0
    assert gf2_rank([[2, 4], [6, 8]]) == 0  # all even entries vanish mod 2
    assert gf2_rank(np.eye(5, dtype=int)) == 5
    assert gf2_rank([[1, 1], [1, 1]]) == 1


def test_critical_points():
    crits = critical_points(MorseFunctionSpec(0.01))
    assert [c.index for c in crits] == [2, 1, 1, 0]
    assert crits[0].coords == TorusPoint(0.0, 0.0)
    assert crits[-1].coords == TorusPoint(math.pi, math.pi)
    assert crits[0].value == pytest.approx(0.02)


def test_degenerate_function_is_rejected():
    class Flat(MorseFunctionSpec):
        def hessian(self, t, v):
            return np.zeros((2, 2))

    with pytest.raises(NotMorse):
        critical_points(Flat(0.01))


def test_epsilon_must_be_positive():
    with pytest.raises(ValueError):
        MorseFunctionSpec(0.0)


@pytest.mark.parametrize("eps", [0.01, -0.2, 1.0])
def test_closed_form_flow_solves_the_ode(eps):
    theta0 = np.array([0.3, -2.0, 3.0, 6.0])
    s_end = 7.0
    sol = solve_ivp(lambda s, y: eps * np.sin(y), (0, s_end), theta0, rtol=1e-12, atol=1e-13)
    np.testing.assert_allclose(closed_form_flow(theta0, eps, s_end), sol.y[:, -1], atol=1e-9)


def test_rk4_matches_closed_form_over_long_times():
    theta0 = np.array([1e-3, 1.0, -2.5, 3.1])
    times, out, err = integrate_circle_flow(theta0, 0.05, 1000.0, 0.5)
    exact = closed_form_flow(theta0[None, :], 0.05, times[:, None])
    assert np.max(np.abs(out - exact)) < 1e-8
    assert err <= 1e-12


def test_step_too_large():
    with pytest.raises(StepTooLarge):
        integrate_circle_flow(np.array([0.5]), 200.0, 2000.0, 2000.0)


def test_trajectory_from_near_maximum_decreases_to_minimum():
    spec = MorseFunctionSpec(0.01)
    traj = negative_gradient_trajectory(TorusPoint(0.01, 0.01), spec, 2000.0, 1.0)
    f = traj.values(spec)
    assert np.all(np.diff(f) <= 1e-15)
    end = traj.points()[-1]
    assert abs(end.t - math.pi) < 1e-6 and abs(end.v - math.pi) < 1e-6


def test_trajectory_on_fixed_circle_stays_there():
    spec = MorseFunctionSpec(0.01)
    traj = negative_gradient_trajectory(TorusPoint(0.5, 0.0), spec, 1500.0, 1.0)
    assert np.max(np.abs(traj.angles[:, 1])) == 0.0
    assert abs(traj.angles[-1, 0] - math.pi) < 1e-5


def test_reverse_flow_climbs():
    spec = MorseFunctionSpec(0.01)
    traj = closed_form_trajectory(TorusPoint(3.0, 3.0), spec, np.linspace(0, 2000, 50), reverse=True)
    assert np.all(np.diff(traj.values(spec)) >= -1e-15)
    assert np.max(np.abs(traj.angles[-1])) < 1e-6


def test_analytic_counts():
    crits = critical_points(MorseFunctionSpec(0.01))
    top, s1, s2, bottom = crits
    assert analytic_flow_line_count(top, s1) == 2
    assert analytic_flow_line_count(top, s2) == 2
    assert analytic_flow_line_count(s1, bottom) == 2
    assert analytic_flow_line_count(top, bottom) == 0


@pytest.mark.parametrize("eps", [0.005, 0.05])
def test_shooting_counts(eps):
    spec = MorseFunctionSpec(eps)
    top, s1, s2, bottom = critical_points(spec)
    for a, b in ((top, s1), (top, s2), (s1, bottom), (s2, bottom)):
        c = count_flow_lines(a, b, spec)
        assert c.count == 2 and c.count_mod2 == 0 and c.analytic == 2


def test_shooting_rejects_index_gap():
    spec = MorseFunctionSpec(0.01)
    top, _, _, bottom = critical_points(spec)
    with pytest.raises(IndexGap):
        count_flow_lines(top, bottom, spec)


@pytest.mark.parametrize("eps", [0.005, 0.01, 0.05])
def test_torus_homology(eps):
    c = morse_differential(MorseFunctionSpec(eps))
    assert c.is_zero()
    assert c.square_residual() == 0
    np.testing.assert_array_equal(c.flow_line_counts[1], [[2, 2]])
    np.testing.assert_array_equal(c.flow_line_counts[2], [[2], [2]])
    h = homology(c)
    assert h.ranks == (1, 2, 1)
    assert h.euler_characteristic == 0 == h.generator_euler_characteristic


def test_homology_of_known_complexes():
    # circle with two vertices and two edges, both edges joining the vertices
    circle = MorseComplex({0: "ab", 1: "xy"}, {1: [[1, 1], [1, 1]]})
    assert homology(circle).ranks == (1, 1)
    # a single edge: contractible
    edge = MorseComplex({0: "ab", 1: "x"}, {1: [[1], [1]]})
    assert homology(edge).ranks == (1, 0)
    # sphere as two cells
    sphere = MorseComplex({0: "a", 1: "", 2: "b"}, {})
    assert homology(sphere).ranks == (1, 0, 1)


def test_not_a_complex():
    bad = MorseComplex({0: "a", 1: "x", 2: "f"}, {1: [[1]], 2: [[1]]})
    with pytest.raises(NotAComplex):
        homology(bad)


def test_differential_shape_is_checked():
    with pytest.raises(ValueError):
        MorseComplex({0: "a", 1: "xy"}, {1: [[1, 1, 1]]})


def test_morse_smale():
    r = verify_morse_smale(MorseFunctionSpec(0.01))
    assert r.ok and r.margin > 0.1
    assert r.intersection_dims[("(0,0)", "(pi,pi)")] == 2
    assert r.intersection_dims[("(0,0)", "(0,pi)")] == 1
    with pytest.raises(ValueError):
        verify_morse_smale(MorseFunctionSpec(0.01), samples=10)


def test_worked_trajectories_from_quarter_point():
    spec = MorseFunctionSpec(0.01)
    fwd = negative_gradient_trajectory(TorusPoint(math.pi / 2, math.pi), spec, 3000.0, 1.0)
    assert np.allclose(fwd.angles[-1], [math.pi, math.pi], atol=1e-6)
    back = negative_gradient_trajectory(TorusPoint(math.pi / 2, math.pi), spec, 3000.0, 1.0, reverse=True)
    end = back.points()[-1]
    assert min(end.t, TWO_PI - end.t) < 1e-6 and abs(end.v - math.pi) < 1e-12
