import numpy as np
import pytest

from gevrey_bbm.analytics import (
    Calibration,
    calibrate_bilinear_constant,
    default_band,
    default_calibration,
    defect_scaling_fit,
    estimate_radius,
    loglog_slope,
    measure_defect,
    random_band_limited_field,
    schedule_sigma,
    track_radius,
    trilinear_defect_rate,
)
from gevrey_bbm.errors import (
    InsufficientData,
    InvalidInput,
    NoFit,
    SpectrumTooThin,
)
from gevrey_bbm.evolution import gaussian_data, sech2_data, simulate
from gevrey_bbm.multipliers import GevreyWeight, ModelParams
from gevrey_bbm.norms import h1_invariant
from gevrey_bbm.spectral import Grid, SpectralField, hermitian_defect, zero_field


class TestTrilinearDefectRate:
    def test_sigma_zero_conserves(self, random_field):
        # no weight, no defect: both routes must return (numerically) zero
        rate = trilinear_defect_rate(random_field, 0.0, 2.0)
        assert abs(rate) < 1e-10

    def test_zero_field(self, grid64):
        assert trilinear_defect_rate(zero_field(grid64), 0.1, 2.0) == 0.0

    def test_single_mode_has_no_resonant_triad(self, grid64):
        coeffs = np.zeros(64, dtype=complex)
        coeffs[2] = coeffs[-2] = 1.0
        rate = trilinear_defect_rate(SpectralField(grid64, coeffs), 0.2, 2.0)
        assert abs(rate) < 1e-10

    def test_routes_agree_on_random_fields(self, rng):
        grid = Grid(64)
        for _ in range(5):
            field = random_band_limited_field(grid, rng)
            trilinear_defect_rate(field, 0.1, 2.0)  # raises on disagreement

    def test_alpha_independent(self, rng):
        grid = Grid(64)
        field = random_band_limited_field(grid, rng)
        r2 = trilinear_defect_rate(field, 0.1, 2.0)
        r3 = trilinear_defect_rate(field, 0.1, 3.0)
        assert r2 == pytest.approx(r3, rel=1e-12)

    def test_negative_sigma_rejected(self, random_field):
        with pytest.raises(InvalidInput):
            trilinear_defect_rate(random_field, -0.1, 2.0)


class TestMeasureDefect:
    def test_sigma_zero_below_discretization_floor(self):
        grid = Grid(128)
        u0 = gaussian_data(grid, 0.5, 4.0)
        params = ModelParams(2.0, grid, 2e-3, 1.0)
        report = measure_defect(u0, 0.0, 1.0, params)
        assert report.defect_abs < 1e-8 * h1_invariant(u0)
        assert report.bound_satisfied

    def test_gaussian_within_calibrated_bound(self):
        grid = Grid(128)
        cal = default_calibration()
        u0 = gaussian_data(grid, 0.5, 4.0)
        params = ModelParams(2.0, grid, 2e-3, 1.0)
        report = measure_defect(u0, 0.1, 2.0, params, c_cal=cal.c2)
        assert report.defect_abs > 0
        assert report.bound_satisfied

    def test_leading_quadratic_scaling(self):
        # doubling sigma quadruples the defect while the sigma^2 term leads
        grid = Grid(128)
        u0 = gaussian_data(grid, 0.5, 4.0)
        params = ModelParams(2.0, grid, 2e-3, 1.0)
        small = measure_defect(u0, 0.02, 1.0, params).defect_abs
        large = measure_defect(u0, 0.04, 1.0, params).defect_abs
        assert 3.5 <= large / small <= 4.5

    def test_delta_validated(self, grid64):
        params = ModelParams(2.0, grid64, 1e-2, 1.0)
        with pytest.raises(InvalidInput):
            measure_defect(zero_field(grid64), 0.1, 0.0, params)


class TestScalingFit:
    def test_synthetic_quadratic_slope(self):
        sigmas = np.geomspace(0.01, 0.3, 8)
        assert loglog_slope(sigmas, 7.3 * sigmas**2) == pytest.approx(
            2.0, abs=0.01)

    def test_insufficient_points_raises(self):
        grid = Grid(128)
        u0 = gaussian_data(grid, 0.5, 4.0)
        params = ModelParams(2.0, grid, 2e-3, 1.0)
        with pytest.raises(InsufficientData):
            defect_scaling_fit(u0, [0.01, 0.02, 0.04, 0.08], 0.5, params,
                               floor=1e6)

    def test_sigma_list_validated(self, grid64):
        params = ModelParams(2.0, grid64, 1e-2, 1.0)
        with pytest.raises(InvalidInput):
            defect_scaling_fit(zero_field(grid64), [0.1], 1.0, params)


class TestBilinearCalibration:
    def test_reproducible(self, grid64):
        weight = GevreyWeight(0.1)
        one = calibrate_bilinear_constant(100, weight, 2.0, grid64)
        two = calibrate_bilinear_constant(100, weight, 2.0, grid64)
        assert one == two > 0

    def test_resolution_stability(self):
        weight = GevreyWeight(0.1)
        values = [calibrate_bilinear_constant(100, weight, 2.0, Grid(n))
                  for n in (64, 128, 256)]
        assert max(values) / min(values) < 2.0

    def test_sigma_stability(self, grid64):
        values = [calibrate_bilinear_constant(100, GevreyWeight(s), 2.0, grid64)
                  for s in (0.0, 0.1, 0.3)]
        assert max(values) / min(values) < 2.0

    def test_sample_budget_validated(self, grid64):
        with pytest.raises(InvalidInput):
            calibrate_bilinear_constant(50, GevreyWeight(0.1), 2.0, grid64)

    def test_random_fields_are_real_and_band_limited(self, grid128, rng):
        field = random_band_limited_field(grid128, rng)
        assert hermitian_defect(field) < 1e-12
        high = np.abs(grid128.mode_numbers) > grid128.dealias_cutoff
        assert np.all(field.coeffs[high] == 0)


class TestEstimateRadius:
    def test_rational_corrected_spectrum(self):
        grid = Grid(8192, 64.0)
        xi = grid.wavenumbers
        field = SpectralField(grid, np.exp(-0.5 * np.abs(xi)) / (1 + xi**2))
        sigma_est, r2 = estimate_radius(field, 100.0, 400.0,
                                        noise_floor=1e-200)
        assert sigma_est == pytest.approx(0.5, abs=0.01)
        assert r2 > 0.999

    def test_zero_field_is_too_thin(self, grid128):
        with pytest.raises(SpectrumTooThin):
            estimate_radius(zero_field(grid128), 0.1, 10.0)

    def test_scale_invariance(self):
        grid = Grid(1024, 64.0)
        xi = grid.wavenumbers
        field = SpectralField(grid, np.exp(-0.7 * np.abs(xi)))
        scaled = field.with_coeffs(10.0 * field.coeffs)
        lo, hi = default_band(field, 1e-14)
        one, _ = estimate_radius(field, lo, hi)
        lo, hi = default_band(scaled, 1e-13)
        two, _ = estimate_radius(scaled, lo, hi, noise_floor=1e-13)
        assert one == pytest.approx(two, rel=1e-12)

    def test_band_validated(self, random_field):
        with pytest.raises(InvalidInput):
            estimate_radius(random_field, 5.0, 1.0)

    def test_default_band_rejects_zero_field(self, grid128):
        with pytest.raises(SpectrumTooThin):
            default_band(zero_field(grid128), 1e-14)


class TestTrackRadius:
    def test_linear_flow_keeps_radius_constant(self):
        # the free flow is unimodular, so the spectrum never changes shape:
        # sigma_est is constant in t and the fitted decay exponent vanishes
        grid = Grid(256)
        # width 2 keeps the tail from the periodic truncation (the profile
        # is not exactly periodic) far below the fitting band
        u0 = sech2_data(grid, 0.5, 2.0)
        params = ModelParams(2.0, grid, 0.1, 20.0)
        traj = simulate(u0, params, GevreyWeight(0.0), sample_every=10,
                        linear=True)
        fit = track_radius(traj, noise_floor=1e-11)
        assert abs(fit.mu_fit) < 0.02
        assert fit.pointwise_ok
        estimates = [s for _, s, _ in fit.samples]
        assert max(estimates) - min(estimates) < 1e-8 * max(estimates)

    def test_needs_enough_samples(self, grid64):
        u0 = sech2_data(grid64, 0.5, 4.0)
        params = ModelParams(2.0, grid64, 0.1, 0.2)
        traj = simulate(u0, params, GevreyWeight(0.0), linear=True)
        with pytest.raises(InvalidInput):
            track_radius(traj)

    def test_no_fit_when_everything_is_transient(self):
        # all samples before t = 1 are excluded by the fit policy
        grid = Grid(256)
        u0 = sech2_data(grid, 0.5, 2.0)
        params = ModelParams(2.0, grid, 0.01, 0.5)
        traj = simulate(u0, params, GevreyWeight(0.0), sample_every=4,
                        linear=True)
        with pytest.raises(NoFit):
            track_radius(traj, noise_floor=1e-11)


class TestScheduleSigma:
    def test_two_window_formula(self):
        # C1 = C2 = 1, ||I u0|| = 1: delta = 1/8, T = 0.2 spans n = 1 windows
        result = schedule_sigma(0.2, sigma0=5.0, C1=1.0, C2=1.0)
        assert result.n_steps == 1
        assert result.delta == pytest.approx(0.125)
        # (2 C1 / (C2 * 2))^(2/3) = 1
        assert result.sigma_assigned == pytest.approx(1.0)
        assert all(ok for _, _, _, ok in result.per_step_checks)

    def test_sigma0_caps_assignment(self):
        result = schedule_sigma(0.2, sigma0=0.3, C1=1.0, C2=1.0)
        assert result.sigma_assigned == 0.3

    def test_large_horizon_decay_exponents(self):
        for alpha, mu in ((2.0, 2.0 / 3.0), (3.0, 0.5)):
            horizons = [1e2, 1e3, 1e4, 1e5]
            sigmas = [schedule_sigma(T, 1e9, 1.0, 1.0, alpha=alpha).sigma_assigned
                      for T in horizons]
            slope = loglog_slope(horizons, sigmas)
            assert slope == pytest.approx(-mu, abs=0.01)

    def test_inputs_validated(self):
        with pytest.raises(InvalidInput):
            schedule_sigma(-1.0, 1.0, 1.0, 1.0)


class TestCalibrationFile:
    def test_round_trip(self, tmp_path):
        cal = Calibration(c1=0.5, c2=0.25, alpha=2.0, sigma_ref=0.1,
                          n_points=128, domain_length=64.0, seed=7)
        path = tmp_path / "cal.txt"
        cal.save(path)
        assert Calibration.load(path) == cal

    def test_packaged_constants_load(self):
        cal = default_calibration()
        assert cal.c1 > 0 and cal.c2 > 0
        assert cal.alpha == 2.0 and cal.n_points == 128
