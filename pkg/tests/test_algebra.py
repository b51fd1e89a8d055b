"""Symmetric-tensor algebra and the isotropic Hooke operator."""

import numpy as np
import pytest

from dynplast.common.exceptions import ConfigurationError, DimensionError
from dynplast.core.algebra import (
    HookeTensor,
    dev_split,
    from_mandel,
    frob_dot,
    frob_norm,
    hooke_apply,
    hooke_inverse,
    hooke_metric_norm,
    hooke_power,
    quadratic_Q,
    sym_outer,
    to_mandel,
    trace,
)

E1 = np.array([1.0, 0.0])
E2 = np.array([0.0, 1.0])
UNIT_HOOKE = HookeTensor(1.0, 1.0)


class TestSymOuter:

    def test_basis_vectors(self):
        np.testing.assert_array_equal(sym_outer(E1, E1), [[1.0, 0.0], [0.0, 0.0]])
        np.testing.assert_array_equal(sym_outer(E1, E2), [[0.0, 0.5], [0.5, 0.0]])

    def test_trace_is_dot_product(self, rng):
        a = rng.normal(size=(100, 3))
        b = rng.normal(size=(100, 3))
        np.testing.assert_allclose(trace(sym_outer(a, b)), np.sum(a * b, axis=-1), atol=1e-14)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            sym_outer(np.ones(2), np.ones(3))

    def test_unsupported_dimension(self):
        with pytest.raises(DimensionError):
            sym_outer(np.ones(4), np.ones(4))


class TestDevSplit:

    def test_identity_is_spherical(self):
        dev, mean = dev_split(np.eye(2))
        np.testing.assert_array_equal(dev, np.zeros((2, 2)))
        assert mean == 1.0

    def test_trace_free_is_deviatoric(self):
        dev, mean = dev_split(np.diag([1.0, -1.0]))
        np.testing.assert_array_equal(dev, np.diag([1.0, -1.0]))
        assert mean == 0.0

    def test_linear_split(self):
        dev, mean = dev_split(np.diag([3.0, 1.0]))
        np.testing.assert_allclose(dev, np.diag([1.0, -1.0]))
        assert mean == pytest.approx(2.0)


class TestHooke:

    def test_apply_identity(self):
        np.testing.assert_allclose(hooke_apply(UNIT_HOOKE, np.eye(2)), 4.0 * np.eye(2))

    def test_apply_zero(self):
        np.testing.assert_array_equal(hooke_apply(UNIT_HOOKE, np.zeros((2, 2))), np.zeros((2, 2)))

    @pytest.mark.parametrize("lam", [-0.5, 0.0, 3.0])
    def test_trace_free_input_ignores_lambda(self, lam):
        A = HookeTensor(lam, 2.0)
        np.testing.assert_allclose(hooke_apply(A, np.diag([1.0, -1.0])), 4.0 * np.diag([1.0, -1.0]))

    def test_inverse_of_spherical_stress(self):
        np.testing.assert_allclose(hooke_inverse(UNIT_HOOKE, 4.0 * np.eye(2)), np.eye(2))
        np.testing.assert_array_equal(hooke_inverse(UNIT_HOOKE, np.zeros((2, 2))), np.zeros((2, 2)))

    @pytest.mark.parametrize("dim", [2, 3])
    def test_inverse_round_trip(self, rng, dim):
        A = HookeTensor(1.7, 0.8, dim=dim)
        X = rng.normal(size=(50, dim, dim))
        X = 0.5 * (X + np.swapaxes(X, -1, -2))
        np.testing.assert_allclose(hooke_inverse(A, hooke_apply(A, X)), X, atol=1e-12)

    def test_quadratic_form(self):
        assert quadratic_Q(UNIT_HOOKE, np.eye(2)) == pytest.approx(4.0)
        assert quadratic_Q(UNIT_HOOKE, np.zeros((2, 2))) == 0.0

    def test_quadratic_form_is_half_work(self, rng):
        e = rng.normal(size=(20, 2, 2))
        e = 0.5 * (e + np.swapaxes(e, -1, -2))
        np.testing.assert_allclose(quadratic_Q(UNIT_HOOKE, e), 0.5 * frob_dot(hooke_apply(UNIT_HOOKE, e), e))

    def test_half_powers_compose(self, rng):
        A = HookeTensor(2.0, 0.5)
        X = rng.normal(size=(10, 2, 2))
        X = 0.5 * (X + np.swapaxes(X, -1, -2))
        half = hooke_power(A, 0.5, hooke_power(A, 0.5, X))
        np.testing.assert_allclose(half, hooke_apply(A, X), atol=1e-12)

    def test_metric_norm(self):
        sigma = 4.0 * np.eye(2)
        # A⁻¹σ:σ = Id:4Id = 8
        assert hooke_metric_norm(UNIT_HOOKE, sigma) == pytest.approx(np.sqrt(8.0))

    def test_wave_speeds(self):
        assert UNIT_HOOKE.p_wave_speed == pytest.approx(np.sqrt(3.0))
        assert UNIT_HOOKE.s_wave_speed == pytest.approx(1.0)
        assert UNIT_HOOKE.alpha == pytest.approx(2.0)
        assert UNIT_HOOKE.beta == pytest.approx(4.0)

    def test_ellipticity_enforced(self):
        with pytest.raises(ConfigurationError) as exc:
            HookeTensor(-2.0, 1.0)
        assert exc.value.key == "hooke.lambda"
        with pytest.raises(ConfigurationError):
            HookeTensor(1.0, 0.0)

    def test_shape_mismatch(self):
        with pytest.raises(DimensionError):
            hooke_apply(UNIT_HOOKE, np.eye(3))


class TestMandel:

    def test_isometry(self, rng):
        X = rng.normal(size=(30, 3, 3))
        X = 0.5 * (X + np.swapaxes(X, -1, -2))
        np.testing.assert_allclose(np.linalg.norm(to_mandel(X), axis=-1), frob_norm(X))
        np.testing.assert_allclose(from_mandel(to_mandel(X)), X, atol=1e-15)

    def test_bad_length(self):
        with pytest.raises(DimensionError):
            from_mandel(np.ones(4))
