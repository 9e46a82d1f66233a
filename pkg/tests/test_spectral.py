import numpy as np
import pytest

from gevrey_bbm.errors import InvalidInput, SymmetryViolation
from gevrey_bbm.norms import l2_norm
from gevrey_bbm.spectral import (
    Grid,
    SpectralField,
    dealias,
    forward_transform,
    hermitian_defect,
    inverse_transform,
    modulus_field,
    zero_field,
    zero_nyquist,
)


class TestGrid:
    def test_rejects_odd_or_tiny_n(self):
        with pytest.raises(InvalidInput):
            Grid(63)
        with pytest.raises(InvalidInput):
            Grid(4)
        with pytest.raises(InvalidInput):
            Grid(64, domain_length=0.0)

    def test_geometry(self, grid64):
        assert grid64.dx == 1.0
        assert grid64.points[0] == 0.0
        assert grid64.points[-1] == 64.0 - grid64.dx
        np.testing.assert_array_equal(
            grid64.mode_numbers[:4], [0, 1, 2, 3])
        assert grid64.mode_numbers[-1] == -1
        assert grid64.parseval_weight == 1.0 / 64.0
        assert grid64.dealias_cutoff == 21

    def test_wavenumbers_scale(self, grid64):
        np.testing.assert_allclose(
            grid64.wavenumbers, 2 * np.pi * grid64.mode_numbers / 64.0)


class TestForwardTransform:
    def test_zero_samples(self, grid64):
        field = forward_transform(np.zeros(64), grid64)
        assert np.all(field.coeffs == 0)

    def test_mean_convention(self, grid64):
        field = forward_transform(np.full(64, 3.0), grid64)
        # coeff(0) = mean * L under the fixed L/n weighting
        assert field.coeffs[0] == pytest.approx(3.0 * 64.0)
        assert np.max(np.abs(field.coeffs[1:])) == 0.0

    def test_single_cosine_two_modes(self, grid64):
        samples = np.cos(2 * np.pi * grid64.points / 64.0)
        field = forward_transform(samples, grid64)
        mags = np.abs(field.coeffs)
        nonzero = np.flatnonzero(mags > 1e-10 * mags.max())
        assert sorted(grid64.mode_numbers[nonzero].tolist()) == [-1, 1]
        assert mags[1] == pytest.approx(mags[-1])

    def test_round_trip(self, rng):
        grid = Grid(32)
        samples = rng.standard_normal(32)
        back = inverse_transform(forward_transform(samples, grid))
        assert np.max(np.abs(back - samples)) < 1e-12

    def test_shape_checked(self, grid64):
        with pytest.raises(InvalidInput):
            forward_transform(np.zeros(32), grid64)


class TestInverseTransform:
    def test_zero(self, grid64):
        assert np.all(inverse_transform(zero_field(grid64)) == 0.0)

    def test_known_cosine(self, grid64):
        samples = np.cos(2 * np.pi * grid64.points / 64.0)
        field = forward_transform(samples, grid64)
        np.testing.assert_allclose(inverse_transform(field), samples,
                                   atol=1e-12)

    def test_rejects_broken_symmetry(self, grid64):
        coeffs = np.zeros(64, dtype=complex)
        coeffs[1] = 1.0  # no conjugate partner at j = -1
        with pytest.raises(SymmetryViolation):
            inverse_transform(SpectralField(grid64, coeffs))


class TestHermitianDefect:
    def test_real_field_has_none(self, random_field):
        assert hermitian_defect(random_field) < 1e-12

    def test_zero_field(self, grid64):
        assert hermitian_defect(zero_field(grid64)) == 0.0


class TestDealias:
    def test_low_modes_untouched(self, grid64):
        coeffs = np.zeros(64, dtype=complex)
        coeffs[1] = coeffs[-1] = 2.0
        field = SpectralField(grid64, coeffs)
        np.testing.assert_array_equal(dealias(field).coeffs, coeffs)

    def test_high_modes_removed(self, grid64):
        coeffs = np.zeros(64, dtype=complex)
        coeffs[31] = coeffs[-31] = 1.0  # |j| = n/2 - 1, above n/3
        assert np.all(dealias(SpectralField(grid64, coeffs)).coeffs == 0)

    def test_survivor_count(self):
        grid = Grid(48)
        field = SpectralField(grid, np.ones(48, dtype=complex))
        survivors = np.count_nonzero(dealias(field).coeffs)
        assert survivors == 2 * (48 // 3) + 1


class TestModulusField:
    def test_zero(self, grid64):
        assert np.all(modulus_field(zero_field(grid64)).coeffs == 0)

    def test_imaginary_pair(self, grid64):
        coeffs = np.zeros(64, dtype=complex)
        coeffs[1], coeffs[-1] = 1j, -1j
        out = modulus_field(SpectralField(grid64, coeffs))
        assert out.coeffs[1] == 1.0 and out.coeffs[-1] == 1.0

    def test_preserves_l2(self, random_field):
        assert l2_norm(modulus_field(random_field)) == pytest.approx(
            l2_norm(random_field), rel=1e-13)


def test_zero_nyquist_clears_unpaired_mode(grid64):
    coeffs = np.ones(64, dtype=complex)
    out = zero_nyquist(SpectralField(grid64, coeffs))
    assert out.coeffs[32] == 0.0
    assert out.coeffs[1] == 1.0


def test_coeffs_are_write_protected(random_field):
    with pytest.raises(ValueError):
        random_field.coeffs[0] = 1.0
