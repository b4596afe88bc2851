import math

import numpy as np
import pytest

from lagtorus.morse import MorseFunctionSpec
from lagtorus.sphere import CotangentPoint
from lagtorus.symmetry import (
    ReflectionInvolution,
    fixed_locus_intersection,
    great_circle_reflection,
    involution_apply,
    verify_critical_points_fixed,
    verify_f_invariance,
    verify_symplectic,
    verify_torus_invariance,
)


def test_reflection_matrix_for_standard_frame(frame):
    I = great_circle_reflection(frame)
    np.testing.assert_allclose(I.matrix, np.diag([1.0, -1.0, 1.0]), atol=1e-15)
    assert I.fixed_subspace_dim() == 2 and I.fixed_base_dim() == 1


def test_apply_example(frame):
    I = great_circle_reflection(frame)
    x = CotangentPoint(np.array([0.0, 1.0, 0.0]), np.array([1.0, 0.0, 0.0]))
    y = involution_apply(I, x)
    np.testing.assert_allclose(y.q, [0, -1, 0], atol=1e-15)
    np.testing.assert_allclose(y.p, [1, 0, 0], atol=1e-15)


def test_symplectic_and_involutive(tilted_frame):
    I = great_circle_reflection(tilted_frame)
    r = verify_symplectic(I, 10_000, seed=0)
    assert r.one_form <= 1e-12 and r.two_form <= 1e-12 and r.involution <= 1e-14
    assert I.involution_residual() <= 1e-14 and I.orthogonality_residual() <= 1e-14


def test_symplectic_needs_enough_samples(frame):
    with pytest.raises(ValueError):
        verify_symplectic(great_circle_reflection(frame), samples=10)


def test_non_isometry_negative_control():
    # a shear of the base is not a cotangent-lift symmetry; lambda is not preserved
    bad = ReflectionInvolution(np.array([[1.0, 0.3, 0], [0, -1.0, 0], [0, 0, 1.0]]), np.eye(3)[:1])
    assert verify_symplectic(bad, 200).one_form > 1e-3


def test_torus_invariance(tilted_frame):
    assert verify_torus_invariance(great_circle_reflection(tilted_frame), 64, tilted_frame) <= 1e-12


def test_wrong_reflection_does_not_preserve_torus(frame):
    # reflecting across the equator swaps N and -N; the torus is not mapped by (t, v) -> (t, -v)
    I = ReflectionInvolution.fixing([frame.e1, frame.e2])
    assert verify_torus_invariance(I, 16, frame) > 0.1


def test_fixed_locus(frame):
    rep = fixed_locus_intersection(great_circle_reflection(frame), frame)
    assert rep.count == 2
    assert {c.v for c in rep.components} == {0.0, math.pi}
    assert rep.membership_residual <= 1e-12
    assert rep.momentum_symmetry_residual <= 1e-12
    assert rep.torus_fixed_set_residual == 0


def test_critical_points_fixed(frame):
    I = great_circle_reflection(frame)
    assert verify_critical_points_fixed(I, MorseFunctionSpec(0.01), frame) <= 1e-12


def test_f_invariance_and_negative_control():
    spec = MorseFunctionSpec(0.01)
    assert verify_f_invariance(spec) == 0.0
    odd = lambda t, v: spec.value(t, v) + 0.001 * np.sin(v)  # noqa: E731
    assert verify_f_invariance(spec, func=odd) > 1e-4
