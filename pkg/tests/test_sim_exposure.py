import numpy as np
import pytest

from camsim.core import ImagePlane, SensorModel, SettingKind
from camsim.sim_exposure import (
    exposure_trend,
    forward_exposure,
    recover_irradiance,
    simulate_exposure,
)


def gray(value: float, gamma: float = 2.2, size: int = 8) -> ImagePlane:
    return ImagePlane(np.full((size, size, 3), value), gamma=gamma)


class TestRecoverIrradiance:
    def test_fixed_point(self):
        h = recover_irradiance(gray(1.0), SensorModel())
        assert np.all(h.data == 1.0)
        assert h.is_linear

    def test_half(self):
        h = recover_irradiance(gray(0.5), SensorModel())
        assert h.data[0, 0, 0] == pytest.approx(0.217637640824031, abs=1e-12)

    def test_forward_round_trip(self):
        model = SensorModel()
        base = ImagePlane(np.random.default_rng(0).uniform(0, 1, (8, 8, 3)), gamma=2.2)
        out = forward_exposure(recover_irradiance(base, model), 0.2, model)
        assert np.max(np.abs(out.data - base.data)) < 1e-6

    def test_rejects_linear_input(self):
        with pytest.raises(ValueError):
            recover_irradiance(ImagePlane(np.zeros((2, 2, 3)), gamma=None), SensorModel())


class TestDeterministic:
    def test_identity_at_base_exposure(self):
        base = ImagePlane(np.random.default_rng(1).uniform(0, 1, (8, 8, 3)), gamma=2.2)
        out = simulate_exposure(base, 0.2)
        assert np.array_equal(out.data, base.data)

    def test_mid_gray_double_exposure(self):
        # (2 * 0.5**2.2) ** (1/2.2), frozen by direct evaluation
        out = simulate_exposure(gray(0.5), 0.4)
        assert out.data[0, 0, 0] == pytest.approx(0.685175492360062, abs=1e-4)

    def test_saturation(self):
        # 5 * 0.9**2.2 = 3.96 > 1 clips to full scale
        out = simulate_exposure(gray(0.9), 1.0)
        assert np.all(out.data == 1.0)

    def test_monotone_in_shutter(self):
        base = ImagePlane(np.random.default_rng(2).uniform(0, 1, (8, 8, 3)), gamma=2.2)
        prev = simulate_exposure(base, 0.1)
        for s in (0.2, 0.35, 0.6, 1.0):
            cur = simulate_exposure(base, s)
            assert np.all(cur.data >= prev.data - 1e-12)
            prev = cur

    def test_saturated_pixels_stay_clipped(self):
        out_low = simulate_exposure(gray(0.95), 0.6)
        out_high = simulate_exposure(gray(0.95), 1.0)
        assert np.all(out_low.data == 1.0)
        assert np.all(out_high.data == 1.0)

    def test_shutter_range(self):
        with pytest.raises(ValueError):
            simulate_exposure(gray(0.5), 0.05)
        with pytest.raises(ValueError):
            simulate_exposure(gray(0.5), 1.5)


class TestStochastic:
    def test_bit_identical_for_same_seed(self):
        base = gray(0.5)
        a = simulate_exposure(base, 0.5, seed=77)
        b = simulate_exposure(base, 0.5, seed=77)
        assert np.array_equal(a.data, b.data)
        c = simulate_exposure(base, 0.5, seed=78)
        assert not np.array_equal(a.data, c.data)

    def test_monte_carlo_mean_matches_deterministic(self):
        # One mid-range pixel, large photon scale: the 10^4-draw mean lands
        # within 3 standard errors of the closed-form deterministic value.
        model = SensorModel(photon_scale=1e6)
        draws = 10_000
        base = gray(0.6, size=1)
        tiled = ImagePlane(np.tile(base.data, (1, draws, 1)), gamma=2.2)
        det = simulate_exposure(base, 0.5, model).data[0, 0, 0]
        out = simulate_exposure(tiled, 0.5, model, seed=5).data[0, :, 0]
        se = out.std(ddof=1) / np.sqrt(draws)
        assert abs(out.mean() - det) < 3 * se

    def test_converges_to_deterministic_at_large_photon_scale(self):
        # Noise terms vanish as photon_scale grows: read_noise -> 0,
        # dark_current -> 0, photon_scale = 1e6 agrees within 1e-2.
        model = SensorModel(photon_scale=1e6, read_noise=1e-9, dark_current=1e-12)
        base = ImagePlane(
            np.random.default_rng(3).uniform(0.05, 0.95, (32, 32, 3)), gamma=2.2)
        det = simulate_exposure(base, 0.4, model).data
        stoch = simulate_exposure(base, 0.4, model, seed=1).data
        assert np.max(np.abs(det - stoch)) < 1e-2

    def test_output_in_range(self):
        out = simulate_exposure(gray(0.95), 1.0, seed=9)
        assert out.data.min() >= 0.0 and out.data.max() <= 1.0


class TestExposureTrend:
    def test_strictly_increasing_below_saturation(self):
        series = exposure_trend([0.1, 0.5, 1.0], base=gray(0.5))
        assert series.kind is SettingKind.SHUTTER
        assert np.all(np.diff(series.values) > 0)

    def test_constant_settings_constant_series(self):
        series = exposure_trend([0.3, 0.3, 0.3])
        assert np.all(series.values == series.values[0])

    def test_linear_response_perfect_correlation(self):
        # With a linear-response model and no saturation the trend is exactly
        # proportional to shutter, so Pearson r = 1.
        model = SensorModel(gamma=1.0)
        shutters = np.random.default_rng(4).uniform(0.1, 1.0, 8)
        base = gray(0.15, gamma=1.0)
        series = exposure_trend(shutters, base=base, model=model)
        r = np.corrcoef(shutters, series.values)[0, 1]
        assert r == pytest.approx(1.0, abs=1e-12)

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            exposure_trend([])
