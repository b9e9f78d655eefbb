"""Focal-length simulation by field-of-view-ratio center crop and resize.

For a pinhole model the linear crop fraction between a base and target
focal length is

    rho = tan(fov(f_target)/2) / tan(fov(f_base)/2) = f_base / f_target

independent of which FoV axis is used.  The centered rho-window is cropped
(sizes rounded half-up per dimension, window origin at floor((dim-cw)/2))
and resampled to a common output size.

Resampling filter: separable 3-lobe windowed sinc (Lanczos),
L(t) = sinc(t) * sinc(t/3) for |t| < 3, with the kernel stretched by the
scale factor on downscale (anti-aliasing) and per-output-pixel weight
normalization.  Out-of-range taps clamp to the edge sample.  Outputs are
clipped to [0, 1] because the kernel has negative lobes.
"""

from __future__ import annotations

import math
import warnings

import numpy as np

from .core import ImagePlane, SensorSpec

FOV_AXES = ("horizontal", "vertical", "diagonal")

# Below this base-image short side, focal crops start from too little
# detail; the quality floor warns rather than fails.
MIN_BASE_SHORT_SIDE = 3000


class LowResolutionWarning(UserWarning):
    """Base image is below the recommended resolution floor for focal crops."""


def fov(spec: SensorSpec, focal_mm: float, axis: str = "horizontal") -> float:
    """Field of view in degrees: 2 * arctan(sensor_dim / (2 f))."""
    if not focal_mm > 0:
        raise ValueError("focal length must be positive")
    if axis not in FOV_AXES:
        raise ValueError(f"axis must be one of {FOV_AXES}, got {axis!r}")
    if axis == "horizontal":
        dim = spec.width_mm
    elif axis == "vertical":
        dim = spec.height_mm
    else:
        dim = math.hypot(spec.width_mm, spec.height_mm)
    return math.degrees(2.0 * math.atan(dim / (2.0 * focal_mm)))


def crop_fraction(spec: SensorSpec, f_target: float) -> float:
    """Linear crop fraction rho = f_base / f_target (pinhole identity)."""
    if f_target < spec.base_focal_mm:
        raise ValueError(
            f"target focal {f_target} mm must be >= base focal {spec.base_focal_mm} mm")
    return spec.base_focal_mm / f_target


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def crop_window(spec: SensorSpec, f_target: float, width: int, height: int):
    """Centered crop window (x0, y0, cw, ch) for a target focal length."""
    rho = crop_fraction(spec, f_target)
    cw = _round_half_up(rho * width)
    ch = _round_half_up(rho * height)
    if cw < 2 or ch < 2:
        raise ValueError(f"crop window {cw}x{ch} is smaller than 2x2 pixels")
    return (width - cw) // 2, (height - ch) // 2, cw, ch


def _lanczos_weights(n_in: int, n_out: int, lobes: int = 3) -> np.ndarray:
    """Row-normalized (n_out, n_in) resampling matrix for one axis."""
    scale = n_out / n_in
    f = min(scale, 1.0)           # kernel stretch for anti-aliased downscale
    support = lobes / f
    w = np.zeros((n_out, n_in))
    for o in range(n_out):
        x = (o + 0.5) / scale - 0.5
        i0 = int(math.ceil(x - support))
        i1 = int(math.floor(x + support))
        taps = np.arange(i0, i1 + 1)
        t = (x - taps) * f
        k = np.sinc(t) * np.sinc(t / lobes)
        k[np.abs(t) >= lobes] = 0.0
        np.add.at(w[o], np.clip(taps, 0, n_in - 1), k)
        w[o] /= w[o].sum()
    return w


def resize_lanczos(data: np.ndarray, out_width: int, out_height: int) -> np.ndarray:
    """Separable Lanczos resize of an HxW or HxWxC array."""
    if out_width < 1 or out_height < 1:
        raise ValueError("output size must be at least 1x1")
    wy = _lanczos_weights(data.shape[0], out_height)
    wx = _lanczos_weights(data.shape[1], out_width)
    out = np.tensordot(wy, data, axes=(1, 0))
    out = np.tensordot(wx, out, axes=(1, 1))
    return np.swapaxes(out, 0, 1)


def simulate_focal(
    base: ImagePlane,
    spec: SensorSpec,
    f_target: float,
    out_size: tuple[int, int],
) -> ImagePlane:
    """Crop-zoom a base frame to the FoV of a longer focal length.

    ``out_size`` is (width, height); every frame of a set must share it so
    the set is uniform.
    """
    if min(base.width, base.height) < MIN_BASE_SHORT_SIDE:
        warnings.warn(
            f"base image short side {min(base.width, base.height)} px is below "
            f"the recommended {MIN_BASE_SHORT_SIDE} px floor for focal simulation",
            LowResolutionWarning, stacklevel=2)
    x0, y0, cw, ch = crop_window(spec, f_target, base.width, base.height)
    crop = base.data[y0:y0 + ch, x0:x0 + cw]
    out_w, out_h = out_size
    resized = np.clip(resize_lanczos(crop, out_w, out_h), 0.0, 1.0)
    return ImagePlane(resized, gamma=base.gamma)


def focal_mask(
    f_target: float,
    spec: SensorSpec,
    out_size: tuple[int, int],
) -> ImagePlane:
    """Base-frame-resolution mask: 1 inside the crop window, 0 outside."""
    out_w, out_h = out_size
    x0, y0, cw, ch = crop_window(spec, f_target, out_w, out_h)
    mask = np.zeros((out_h, out_w, 3))
    mask[y0:y0 + ch, x0:x0 + cw] = 1.0
    return ImagePlane(mask, gamma=None)
