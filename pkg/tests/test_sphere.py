import math

import numpy as np
import pytest

from lagtorus.errors import ConstraintViolation, ZeroVector
from lagtorus.sphere import (
    CotangentPoint,
    TangentVector,
    admissible,
    canonical_one_form,
    dlambda_arrays,
    omega_arrays,
    point_residual,
    project_tangent,
    project_tangent_arrays,
    project_to_cotangent,
    random_cotangent_points,
    random_tangent_vectors,
    symplectic_form,
    tangent_residual,
)


def test_projection_normalizes_and_strips_normal_part():
    x = project_to_cotangent([0, 0, 2.0], [1.0, 2.0, 5.0])
    np.testing.assert_allclose(x.q, [0, 0, 1.0])
    np.testing.assert_allclose(x.p, [1.0, 2.0, 0.0])
    assert point_residual(x) == 0.0


def test_projection_rejects_zero_base():
    with pytest.raises(ZeroVector):
        project_to_cotangent([0, 0, 1e-14], [1, 0, 0])


def test_admissible_reprojects_small_drift_and_rejects_large():
    x = CotangentPoint(np.array([0, 0, 1 + 2e-12]), np.array([1.0, 0, 0]))
    y = admissible(x)
    assert point_residual(y) <= 1e-15
    with pytest.raises(ConstraintViolation):
        admissible(CotangentPoint(np.array([0, 0, 1.01]), np.array([1.0, 0, 0])))


def test_one_form_on_worked_example():
    x = CotangentPoint(np.array([0, 0, 1.0]), np.array([1.0, 0, 0]))
    assert canonical_one_form(x, TangentVector([1.0, 0, 0], [0, 0, -1.0])) == 1.0
    assert canonical_one_form(x, TangentVector([0, 1.0, 0], [0, 0, 0])) == 0.0


def test_two_form_is_antisymmetric_and_matches_formula():
    x = CotangentPoint(np.array([0, 0, 1.0]), np.array([0.5, 0, 0]))
    v1 = TangentVector([1.0, 0, 0], [0, 0, -0.5])
    v2 = TangentVector([0, 0, 0], [1.0, 0, 0])
    assert symplectic_form(x, v1, v2) == pytest.approx(1.0)
    assert symplectic_form(x, v2, v1) == pytest.approx(-1.0)
    assert symplectic_form(x, v1, v1) == 0.0


def test_two_form_rejects_non_tangent_vectors():
    x = CotangentPoint(np.array([0, 0, 1.0]), np.array([0, 0, 0.0]))
    with pytest.raises(ConstraintViolation):
        symplectic_form(x, TangentVector([0, 0, 1.0], [0, 0, 0]), TangentVector([1.0, 0, 0], [0, 0, 0]))


def test_two_form_is_minus_d_lambda_by_finite_differences(rng):
    # oracle: d(lambda)(X, Y) = X(lambda(Y)) - Y(lambda(X)) - lambda([X, Y]) for
    # constant ambient fields projected onto T*S^2; evaluate via a flat chart.
    q, p = random_cotangent_points(rng, 50)
    dq1, dp1 = random_tangent_vectors(rng, q, p)
    dq2, dp2 = random_tangent_vectors(rng, q, p)
    # lambda = p.dq is the restriction of the ambient form, so d lambda is the
    # restriction of dp ^ dq, evaluated pointwise
    ambient = np.sum(dp1 * dq2, axis=1) - np.sum(dq1 * dp2, axis=1)
    np.testing.assert_allclose(dlambda_arrays(dq1, dp1, dq2, dp2), ambient, atol=1e-14)
    np.testing.assert_allclose(omega_arrays(dq1, dp1, dq2, dp2), -ambient, atol=1e-14)


def test_batched_projection_matches_scalar(rng):
    q, p = random_cotangent_points(rng, 20, scale=2.0)
    dq = rng.standard_normal(q.shape)
    dp = rng.standard_normal(q.shape)
    bq, bp = project_tangent_arrays(q, p, dq, dp)
    for k in range(20):
        x = CotangentPoint(q[k], p[k])
        v = project_tangent(x, dq[k], dp[k])
        np.testing.assert_allclose(v.dq, bq[k], atol=1e-12)
        np.testing.assert_allclose(v.dp, bp[k], atol=1e-12)
        assert tangent_residual(x, v) < 1e-12


def test_random_points_are_admissible(rng):
    q, p = random_cotangent_points(rng, 100, dim=4, scale=3.0)
    assert np.max(np.abs(np.sum(q * q, axis=1) - 1)) < 1e-14
    assert np.max(np.abs(np.sum(q * p, axis=1))) < 1e-13
    assert q.shape == (100, 5)


def test_distance():
    a = CotangentPoint(np.array([0, 0, 1.0]), np.zeros(3))
    b = CotangentPoint(np.array([0, 0, 1.0]), np.array([3.0, 4.0, 0]))
    assert a.distance(b) == 5.0
    assert math.isclose(a.distance(a), 0.0)


def test_forms_are_linear_in_each_argument(rng):
    q, p = random_cotangent_points(rng, 200, scale=2.0)
    worst = 0.0
    for k in range(200):
        x = CotangentPoint(q[k], p[k])
        vs = [project_tangent(x, rng.standard_normal(3), rng.standard_normal(3)) for _ in range(3)]
        a, b = rng.uniform(-3, 3, 2)
        combo = a * vs[0] + b * vs[1]
        lin1 = canonical_one_form(x, combo, 1e-9) - a * canonical_one_form(x, vs[0], 1e-9) - b * canonical_one_form(
            x, vs[1], 1e-9
        )
        lin2 = (
            symplectic_form(x, combo, vs[2], 1e-9)
            - a * symplectic_form(x, vs[0], vs[2], 1e-9)
            - b * symplectic_form(x, vs[1], vs[2], 1e-9)
        )
        worst = max(worst, abs(lin1), abs(lin2))
    assert worst <= 1e-10
