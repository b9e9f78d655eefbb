import numpy as np
import pytest

from camsim.core import ImagePlane, SensorSpec
from camsim.sim_focal import (
    LowResolutionWarning,
    crop_fraction,
    crop_window,
    focal_mask,
    fov,
    resize_lanczos,
    simulate_focal,
)

SPEC = SensorSpec()  # full-frame 36x24 mm, 24 mm base


class TestFov:
    def test_horizontal_24mm(self):
        assert fov(SPEC, 24.0) == pytest.approx(73.7397952917, abs=1e-3)

    def test_exact_90_degrees(self):
        assert fov(SPEC, 18.0, "horizontal") == pytest.approx(90.0, abs=1e-12)

    def test_diagonal_50mm(self):
        # 2*atan(sqrt(36^2 + 24^2) / 100), frozen by direct evaluation
        assert fov(SPEC, 50.0, "diagonal") == pytest.approx(46.793003344, abs=1e-3)

    def test_vertical_smaller_than_horizontal(self):
        assert fov(SPEC, 35.0, "vertical") < fov(SPEC, 35.0, "horizontal")

    def test_strictly_decreasing_in_focal(self):
        for axis in ("horizontal", "vertical", "diagonal"):
            fs = np.linspace(24.0, 70.0, 50)
            values = [fov(SPEC, f, axis) for f in fs]
            assert np.all(np.diff(values) < 0)

    def test_errors(self):
        with pytest.raises(ValueError):
            fov(SPEC, 0.0)
        with pytest.raises(ValueError):
            fov(SPEC, 50.0, "sideways")


class TestCropWindow:
    def test_fraction_is_focal_ratio(self):
        assert crop_fraction(SPEC, 48.0) == 0.5
        assert crop_fraction(SPEC, 70.0) == pytest.approx(24.0 / 70.0)

    def test_double_focal_halves_window(self):
        x0, y0, cw, ch = crop_window(SPEC, 48.0, 4000, 3000)
        assert (cw, ch) == (2000, 1500)
        assert (x0, y0) == (1000, 750)

    def test_70mm_round_half_up(self):
        # rho = 24/70: 4000*rho = 1371.43 -> 1371; 3000*rho = 1028.57 -> 1029
        x0, y0, cw, ch = crop_window(SPEC, 70.0, 4000, 3000)
        assert (cw, ch) == (1371, 1029)
        assert (x0, y0) == ((4000 - 1371) // 2, (3000 - 1029) // 2)

    def test_identity_at_base(self):
        assert crop_window(SPEC, 24.0, 640, 480) == (0, 0, 640, 480)

    def test_nesting(self):
        rng = np.random.default_rng(8)
        for _ in range(300):
            f1, f2 = np.sort(rng.uniform(24.0, 70.0, 2))
            x1, y1, w1, h1 = crop_window(SPEC, f1, 4000, 3000)
            x2, y2, w2, h2 = crop_window(SPEC, f2, 4000, 3000)
            assert x2 >= x1 and y2 >= y1
            assert x2 + w2 <= x1 + w1 and y2 + h2 <= y1 + h1

    def test_errors(self):
        with pytest.raises(ValueError):
            crop_window(SPEC, 23.0, 4000, 3000)   # below base focal
        with pytest.raises(ValueError):
            crop_window(SPEC, 70.0, 4, 4)          # sub-2x2 crop


class TestResize:
    def test_constant_preserved(self):
        out = resize_lanczos(np.full((40, 60), 0.37), 30, 20)
        assert np.allclose(out, 0.37, atol=1e-12)
        assert out.shape == (20, 30)

    def test_identity_size(self):
        rng = np.random.default_rng(0)
        data = rng.uniform(0, 1, (16, 16))
        assert np.allclose(resize_lanczos(data, 16, 16), data, atol=1e-12)

    def test_downscale_follows_coordinate_map(self):
        # A linear ramp resamples exactly along the pixel-center map
        # x_in = (o + 0.5)/scale - 0.5 (away from edge clamping).
        ramp = np.tile(np.linspace(0.0, 1.0, 64), (32, 1))
        out = resize_lanczos(ramp, 32, 16)
        x_in = (np.arange(32) + 0.5) / 0.5 - 0.5
        expected = np.tile(x_in / 63.0, (16, 1))
        assert np.allclose(out[:, 3:-3], expected[:, 3:-3], atol=1e-12)


class TestSimulateFocal:
    def test_warns_below_floor(self, textured_image):
        with pytest.warns(LowResolutionWarning):
            simulate_focal(textured_image, SPEC, 48.0, (32, 24))

    def test_identity_focal_resize_only(self, textured_image):
        with pytest.warns(LowResolutionWarning):
            out = simulate_focal(textured_image, SPEC, 24.0, (64, 48))
        ref = resize_lanczos(textured_image.data, 64, 48)
        assert np.allclose(out.data, np.clip(ref, 0, 1), atol=1e-12)

    def test_output_size_and_range(self, textured_image):
        with pytest.warns(LowResolutionWarning):
            out = simulate_focal(textured_image, SPEC, 55.0, (48, 32))
        assert (out.width, out.height) == (48, 32)
        assert out.data.min() >= 0.0 and out.data.max() <= 1.0

    def test_repeat_simulation_bit_identical(self, textured_image):
        with pytest.warns(LowResolutionWarning):
            a = simulate_focal(textured_image, SPEC, 40.0, (48, 32))
            b = simulate_focal(textured_image, SPEC, 40.0, (48, 32))
        assert np.array_equal(a.data, b.data)

    def test_scale_consistency_of_known_target(self):
        # A centered bright square of known width scales by f2/f1 (+-1 px).
        data = np.zeros((1000, 1000, 3))
        data[460:540, 460:540] = 1.0   # 80 px wide
        base = ImagePlane(data)
        with pytest.warns(LowResolutionWarning):
            out24 = simulate_focal(base, SPEC, 24.0, (500, 500))
            out48 = simulate_focal(base, SPEC, 48.0, (500, 500))
        width24 = (out24.data[250, :, 0] > 0.5).sum()
        width48 = (out48.data[250, :, 0] > 0.5).sum()
        assert abs(width48 - 2 * width24) <= 2


class TestFocalMask:
    def test_identity_all_ones(self):
        mask = focal_mask(24.0, SPEC, (64, 48))
        assert np.all(mask.data == 1.0)

    def test_half_fraction_quarter_area(self):
        mask = focal_mask(48.0, SPEC, (100, 80))
        frac = mask.data[:, :, 0].mean()
        assert frac == pytest.approx(0.25, abs=0.02)

    def test_tightest_crop_fraction(self):
        mask = focal_mask(70.0, SPEC, (200, 200))
        frac = mask.data[:, :, 0].mean()
        assert frac == pytest.approx((24.0 / 70.0) ** 2, abs=0.01)

    def test_binary_and_centered(self):
        mask = focal_mask(40.0, SPEC, (50, 50)).data[:, :, 0]
        assert set(np.unique(mask)) <= {0.0, 1.0}
        ys, xs = np.nonzero(mask)
        assert abs((ys.min() + ys.max()) / 2 - 24.5) <= 1.0
        assert abs((xs.min() + xs.max()) / 2 - 24.5) <= 1.0
