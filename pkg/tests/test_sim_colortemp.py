import math

import numpy as np
import pytest

from camsim.core import ImagePlane
from camsim.sim_colortemp import apply_color_temperature, apply_gains, kelvin_to_rgb


def oracle_kelvin_to_rgb(kelvin: float):
    """Independent scalar transcription of the three-regime mapping."""
    t = kelvin / 100.0
    warm_g = 99.47 * math.log(t) - 161.12
    warm_b = (138.52 * math.log(t - 10.0) - 305.04) if t > 10.0 else 0.0
    cool_r = 329.70 * (t - 60.0) ** -0.1933 if t > 60.0 else math.inf
    cool_g = 288.12 * (t - 60.0) ** -0.1155 if t > 60.0 else math.inf
    if t <= 66.0:
        rgb = (255.0, max(0.0, warm_g), max(0.0, warm_b))
    elif t <= 88.0:
        rgb = (0.5 * (255.0 + cool_r),
               0.5 * (cool_g + warm_g),
               0.5 * (warm_b + 255.0))
    else:
        rgb = (cool_r, cool_g, 255.0)
    return tuple(min(max(c, 0.0), 255.0) for c in rgb)


class TestKelvinToRgb:
    @pytest.mark.parametrize("kelvin,expected", [
        # Frozen from high-precision evaluation of the mapping.
        (2000.0, (255.0, 136.865489, 13.914087)),
        (6600.0, (255.0, 255.0, 252.551716)),      # G saturates at the clip
        (10000.0, (161.599775, 188.163541, 255.0)),
    ])
    def test_frozen_values(self, kelvin, expected):
        got = kelvin_to_rgb(kelvin)
        assert got.r == pytest.approx(expected[0], abs=1e-4)
        assert got.g == pytest.approx(expected[1], abs=1e-4)
        assert got.b == pytest.approx(expected[2], abs=1e-4)

    def test_matches_oracle_on_grid(self):
        for kelvin in range(2000, 10001, 10):
            got = kelvin_to_rgb(float(kelvin))
            exp = oracle_kelvin_to_rgb(float(kelvin))
            assert (got.r, got.g, got.b) == pytest.approx(exp, abs=1e-9)

    def test_branch_boundaries_one_sided(self):
        # At the exact boundary the lower branch applies; immediately above,
        # the upper branch does.  Both regimes are discontinuous there.
        for boundary in (6600.0, 8800.0):
            at = kelvin_to_rgb(boundary)
            assert (at.r, at.g, at.b) == pytest.approx(
                oracle_kelvin_to_rgb(boundary), abs=1e-9)
            above = math.nextafter(boundary, math.inf)
            got = kelvin_to_rgb(above)
            assert (got.r, got.g, got.b) == pytest.approx(
                oracle_kelvin_to_rgb(above), abs=1e-9)
        # The discontinuity is real: R drops sharply crossing temp = 88.
        assert kelvin_to_rgb(8800.0).r - kelvin_to_rgb(8801.0).r > 10.0

    def test_domain(self):
        kelvin_to_rgb(1000.0)
        kelvin_to_rgb(40000.0)
        for bad in (999.9, 40000.1, -5.0):
            with pytest.raises(ValueError):
                kelvin_to_rgb(bad)

    def test_warm_branch_monotone(self):
        grid = np.arange(2000.0, 6601.0, 1.0)
        triples = [kelvin_to_rgb(k) for k in grid]
        assert all(t.r == 255.0 for t in triples)
        g = np.array([t.g for t in triples])
        b = np.array([t.b for t in triples])
        assert np.all(np.diff(g) >= 0.0)
        assert np.all(np.diff(b) >= 0.0)

    def test_cool_branch_monotone(self):
        grid = np.arange(8801.0, 10001.0, 1.0)
        triples = [kelvin_to_rgb(k) for k in grid]
        assert all(t.b == 255.0 for t in triples)
        r = np.array([t.r for t in triples])
        g = np.array([t.g for t in triples])
        assert np.all(np.diff(r) <= 0.0)
        assert np.all(np.diff(g) <= 0.0)

    def test_coolness_ordering(self):
        warm = kelvin_to_rgb(2000.0)
        cool = kelvin_to_rgb(10000.0)
        assert cool.b / cool.r > warm.b / warm.r


class TestApplyColorTemperature:
    def test_white_at_2000k(self):
        white = ImagePlane(np.ones((4, 4, 3)))
        out = apply_color_temperature(white, 2000.0)
        expected = (1.0, 0.5367274, 0.0545650)   # frozen gains = rgb/255
        for ch in range(3):
            assert np.allclose(out.data[:, :, ch], expected[ch], atol=1e-3)

    def test_unit_gains_identity(self):
        img = ImagePlane(np.random.default_rng(0).uniform(0, 1, (6, 6, 3)))
        out = apply_gains(img, (1.0, 1.0, 1.0))
        assert np.array_equal(out.data, img.data)

    def test_black_fixed_point(self):
        black = ImagePlane(np.zeros((4, 4, 3)))
        for kelvin in (2000.0, 5500.0, 10000.0):
            assert np.array_equal(apply_color_temperature(black, kelvin).data, black.data)

    def test_never_exceeds_input(self):
        img = ImagePlane(np.random.default_rng(1).uniform(0, 1, (8, 8, 3)))
        for kelvin in (2000.0, 4000.0, 6600.0, 9000.0):
            out = apply_color_temperature(img, kelvin)
            assert np.all(out.data <= img.data + 1e-15)

    def test_preserves_encoding(self):
        img = ImagePlane(np.full((2, 2, 3), 0.5), gamma=2.4)
        assert apply_color_temperature(img, 5000.0).gamma == 2.4

    def test_domain_propagates(self):
        img = ImagePlane(np.full((2, 2, 3), 0.5))
        with pytest.raises(ValueError):
            apply_color_temperature(img, 1500.0)   # outside the setting range
