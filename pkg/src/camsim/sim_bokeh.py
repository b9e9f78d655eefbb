"""Disparity-driven variable blur with a fixed foreground refocus.

A classical, deterministic renderer: per-pixel circle-of-confusion radius
r(p) = K * |disp(p) - d_focus| pixels (disparity normalized to [0, 1], so
radius is capped at K), rendered with an occlusion-aware uniform-disc
gather (see camsim._kernels).  A disc rather than a Gaussian: the blur of
a circular aperture is disc-shaped.  The refocused disparity stays at the
foreground plane, so the subject remains sharp while the background blur
scales with K.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from PIL import Image

from ._kernels import disc_gather_blur
from .core import DisparityMap, EffectSeries, ImagePlane, SettingKind, check_setting_value
from .metrics import mean_abs_laplacian

# Sharp sources bleeding over defocused pixels are damped to this weight;
# tau is the relative defocus slack under which a source still counts as
# "at least as defocused" as the target.
DEFAULT_TAU = 0.2
DEFAULT_TAU_LEAK = 0.05

# |disp - d_focus| beyond which a pixel counts as background for trend
# measurement.
BACKGROUND_DEFOCUS = 0.2


@dataclass(frozen=True)
class BokehParams:
    blur: float                      # K, in [1, 30]
    focus_disparity: float           # refocused disparity plane, in [0, 1]
    max_radius_px: float | None = None   # defaults to K (unit disparity span)
    tau: float = DEFAULT_TAU
    tau_leak: float = DEFAULT_TAU_LEAK

    def __post_init__(self):
        check_setting_value(SettingKind.BOKEH, self.blur)
        if not 0.0 <= self.focus_disparity <= 1.0:
            raise ValueError("focus_disparity must be in [0, 1]")
        if self.max_radius_px is None:
            object.__setattr__(self, "max_radius_px", self.blur)


def depth_to_disparity(depth: np.ndarray, eps: float = 1e-3) -> DisparityMap:
    """Reciprocal depth, min-max normalized so larger means closer.

    Constant depth has no usable normalization; the result is then an
    all-zero map with the ``degenerate`` flag set.
    """
    depth = np.asarray(depth, dtype=np.float64)
    if depth.ndim != 2:
        raise ValueError(f"depth must be a 2-D array, got shape {depth.shape}")
    if not np.all(np.isfinite(depth)) or depth.min() < 0:
        raise ValueError("depth values must be finite and non-negative")
    d = 1.0 / (depth + eps)
    lo, hi = d.min(), d.max()
    if hi == lo:
        return DisparityMap(np.zeros_like(d), degenerate=True)
    return DisparityMap((d - lo) / (hi - lo))


def pick_focus_disparity(disp: DisparityMap, percentile: float = 95.0) -> float:
    """Foreground disparity plane: a high percentile of the map."""
    return float(np.percentile(disp.data, percentile))


def render_bokeh(img: ImagePlane, disp: DisparityMap, params: BokehParams) -> ImagePlane:
    """Apply the disc-gather defocus blur to one frame."""
    if (img.height, img.width) != (disp.height, disp.width):
        raise ValueError(
            f"image {img.width}x{img.height} and disparity "
            f"{disp.width}x{disp.height} resolutions differ")
    defocus = np.abs(disp.data - params.focus_disparity)
    out = disc_gather_blur(img.data, defocus, params.blur, params.max_radius_px,
                           params.tau, params.tau_leak)
    return ImagePlane(np.clip(out, 0.0, 1.0), gamma=img.gamma)


def blur_trend(
    img: ImagePlane,
    disp: DisparityMap,
    blur_values,
    focus_disparity: float | None = None,
    background_threshold: float = BACKGROUND_DEFOCUS,
) -> EffectSeries:
    """Background sharpness (mean |3x3 Laplacian|) per blur value.

    Measured over the region with |disp - d_focus| > background_threshold;
    nonincreasing when blur values increase.
    """
    blur_values = list(blur_values)
    if focus_disparity is None:
        focus_disparity = pick_focus_disparity(disp)
    background = np.abs(disp.data - focus_disparity) > background_threshold
    if not background.any():
        raise ValueError("no background region beyond the defocus threshold")
    values = []
    for k in blur_values:
        frame = render_bokeh(img, disp, BokehParams(blur=k, focus_disparity=focus_disparity))
        values.append(mean_abs_laplacian(frame, mask=background))
    return EffectSeries(kind=SettingKind.BOKEH, values=np.asarray(values),
                        extras={"blur_values": blur_values})


def load_disparity(path) -> DisparityMap:
    """Read a disparity map: single-channel PNG (DN/255) or a CEMB tensor.

    CEMB files use frame 0, channel 0.
    """
    with open(path, "rb") as fh:
        magic = fh.read(4)
    if magic == b"CEMB":
        from .embedding import read_tensor

        tensor = read_tensor(path)
        return DisparityMap(np.clip(tensor.data[0, 0].astype(np.float64), 0.0, 1.0))
    with Image.open(path) as im:
        arr = np.asarray(im.convert("L"), dtype=np.float64) / 255.0
    return DisparityMap(arr)
