import numpy as np
import pytest
from scipy import stats

from camsim.core import SETTING_RANGES, SettingKind, SettingSet
from camsim.sampler import discretize_setting_set, sample_setting_set, setting_grid


class TestSampleSettingSet:
    def test_values_in_range(self):
        for kind in SettingKind:
            lo, hi = SETTING_RANGES[kind]
            sset = sample_setting_set(kind, 5, seed=42)
            assert len(sset) == 5
            assert all(lo <= v <= hi for v in sset.values)
            assert all(np.isfinite(v) for v in sset.values)

    def test_colortemp_range_example(self):
        sset = sample_setting_set(SettingKind.COLORTEMP, 5, seed=7)
        assert all(2000.0 <= v <= 10000.0 for v in sset.values)

    def test_shutter_range_example(self):
        sset = sample_setting_set(SettingKind.SHUTTER, 2, seed=7)
        assert all(0.1 <= v <= 1.0 for v in sset.values)

    def test_bitwise_reproducible(self):
        a = sample_setting_set(SettingKind.FOCAL, 16, seed=99)
        b = sample_setting_set(SettingKind.FOCAL, 16, seed=99)
        assert a.values == b.values
        assert sample_setting_set(SettingKind.FOCAL, 16, seed=100).values != a.values

    def test_uniformity_ks(self):
        lo, hi = SETTING_RANGES[SettingKind.FOCAL]
        values = sample_setting_set(SettingKind.FOCAL, 20000, seed=5).values
        ks = stats.kstest(values, "uniform", args=(lo, hi - lo)).statistic
        assert ks < 0.02

    def test_coverage_approaches_endpoints(self):
        lo, hi = SETTING_RANGES[SettingKind.BOKEH]
        values = np.asarray(sample_setting_set(SettingKind.BOKEH, 20000, seed=3).values)
        span = hi - lo
        assert values.min() < lo + 0.01 * span
        assert values.max() > hi - 0.01 * span

    def test_too_few_frames(self):
        with pytest.raises(ValueError):
            sample_setting_set(SettingKind.BOKEH, 1, seed=0)


class TestDiscretize:
    def test_endpoint_is_fixed_point(self):
        for n_bins in (2, 5, 100):
            sset = SettingSet(SettingKind.COLORTEMP, (2000.0, 10000.0), seed=0)
            snapped = discretize_setting_set(sset, n_bins)
            assert snapped.values == (2000.0, 10000.0)

    def test_nearest_grid_brute_force(self):
        # Oracle: nearest of the 100 grid points by direct distance scan.
        grid = setting_grid(SettingKind.COLORTEMP, 100)
        value = 6033.0
        expected = float(grid[np.argmin(np.abs(grid - value))])
        sset = SettingSet(SettingKind.COLORTEMP, (value, 2000.0), seed=0)
        assert discretize_setting_set(sset, 100).values[0] == expected

    def test_two_point_tie_goes_low(self):
        # 0.55 is equidistant from {0.1, 1.0}; ties round to the lower index.
        sset = SettingSet(SettingKind.SHUTTER, (0.55, 0.56, 0.54), seed=0)
        snapped = discretize_setting_set(sset, 2)
        assert snapped.values == (0.1, 1.0, 0.1)

    def test_every_sample_lands_on_grid(self):
        sset = sample_setting_set(SettingKind.SHUTTER, 500, seed=21)
        grid = set(setting_grid(SettingKind.SHUTTER, 100).tolist())
        snapped = discretize_setting_set(sset, 100)
        assert all(v in grid for v in snapped.values)

    def test_bad_bins(self):
        sset = SettingSet(SettingKind.SHUTTER, (0.5, 0.6), seed=0)
        with pytest.raises(ValueError):
            discretize_setting_set(sset, 1)
