"""Color-temperature simulation: Kelvin to RGB gains applied per channel.

The Kelvin mapping is an empirical blackbody approximation with three
regimes over temp = kelvin / 100:

    temp <= 66:      R = 255
                     G = max(0, 99.47 ln(temp) - 161.12)
                     B = max(0, 138.52 ln(temp - 10) - 305.04)
    66 < temp <= 88: the average of the two outer regimes' expressions
    temp > 88:       R = 329.70 (temp - 60)^-0.1933
                     G = 288.12 (temp - 60)^-0.1155
                     B = 255

followed by a final clip to [0, 255].  The mid regime averages two
formulas that do not meet, so the mapping is discontinuous at temp = 66
and temp = 88; it is applied verbatim, without smoothing.  Channel gains
are rgb/255 with no brightness renormalization and are applied in the
image's stored encoding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import ImagePlane, SettingKind, check_setting_value

KELVIN_DOMAIN = (1000.0, 40000.0)


@dataclass(frozen=True)
class RgbTriple:
    r: float
    g: float
    b: float

    def gains(self) -> tuple[float, float, float]:
        return self.r / 255.0, self.g / 255.0, self.b / 255.0


def kelvin_to_rgb(kelvin: float) -> RgbTriple:
    """Map a color temperature in Kelvin to an RGB triple in [0, 255]."""
    lo, hi = KELVIN_DOMAIN
    if not (lo <= kelvin <= hi):
        raise ValueError(f"kelvin {kelvin!r} outside supported domain [{lo}, {hi}]")
    temp = kelvin / 100.0

    # ln(temp - 10) underflows to -inf at the domain edge temp == 10;
    # the max(0, .) wrapper makes that branch 0 there.
    def _blue_warm(t: float) -> float:
        if t <= 10.0:
            return -math.inf
        return 138.52 * math.log(t - 10.0) - 305.04

    if temp <= 66.0:
        r = 255.0
        g = max(0.0, 99.47 * math.log(temp) - 161.12)
        b = max(0.0, _blue_warm(temp))
    elif temp <= 88.0:
        r = 0.5 * (255.0 + 329.70 * (temp - 60.0) ** -0.1933)
        g = 0.5 * (288.12 * (temp - 60.0) ** -0.1155
                   + 99.47 * math.log(temp) - 161.12)
        b = 0.5 * (_blue_warm(temp) + 255.0)
    else:
        r = 329.70 * (temp - 60.0) ** -0.1933
        g = 288.12 * (temp - 60.0) ** -0.1155
        b = 255.0

    clip = lambda v: min(max(v, 0.0), 255.0)
    return RgbTriple(clip(r), clip(g), clip(b))


def apply_gains(img: ImagePlane, gains: tuple[float, float, float]) -> ImagePlane:
    """Multiply per-channel gains in the stored encoding, clipped to [0, 1]."""
    out = img.data * np.asarray(gains, dtype=np.float64)
    return ImagePlane(np.clip(out, 0.0, 1.0), gamma=img.gamma)


def apply_color_temperature(img: ImagePlane, kelvin: float) -> ImagePlane:
    """Rescale RGB channel ratios to match the given color temperature."""
    check_setting_value(SettingKind.COLORTEMP, kelvin)
    return apply_gains(img, kelvin_to_rgb(kelvin).gains())
