"""Frame-set evaluation: effect trends, trend correlation, consistency.

Per-kind effect measurements over a frame set:

  * bokeh     - mean |3x3 Laplacian| of luma per frame (sharpness)
  * shutter   - mean Rec.709 luma per frame (brightness)
  * colortemp - per-frame channel means, reduced to mean(B) - mean(R)
                (a single coolness axis keeps the trend correlation
                well-defined; per-channel correlation is available)
  * focal     - cumulative scale factors anchored at 1.0 for frame 0,
                from pairwise log-polar magnitude-spectrum phase
                correlation (deterministic, exact for the pure
                similarity transforms that crop-zoom produces)

Trend accuracy is the Pearson correlation between the generated and
reference effect series.  Frame-wise consistency is the mean perceptual
distance over adjacent pairs; the default metric is DSSIM = (1 - SSIM)/2
with k1=0.01, k2=0.03 and uniform 8x8 windows evaluated at valid
positions only (no boundary padding).  Neural perceptual metrics plug in
through the same two-image callable signature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import ndimage

from .core import EffectSeries, ImagePlane, SettingKind, luma

PerceptualMetric = Callable[[ImagePlane, ImagePlane], float]
QualityMetric = Callable[[Sequence[ImagePlane]], float]

_LAPLACIAN_3X3 = np.array([[0.0, 1.0, 0.0],
                           [1.0, -4.0, 1.0],
                           [0.0, 1.0, 0.0]])

SSIM_K1 = 0.01
SSIM_K2 = 0.03
SSIM_WINDOW = 8


class ScaleEstimationError(RuntimeError):
    """Spectral scale registration failed (textureless or degenerate frames)."""


# ---------------------------------------------------------------------------
# Sharpness


def mean_abs_laplacian(img: ImagePlane | np.ndarray, mask: np.ndarray | None = None) -> float:
    """Mean absolute response of the 4-neighbor 3x3 Laplacian on luma.

    Boundary handling is nearest-edge replication.  ``mask`` restricts the
    mean to a pixel subset.
    """
    gray = luma(img) if isinstance(img, ImagePlane) else np.asarray(img, dtype=np.float64)
    lap = np.abs(ndimage.convolve(gray, _LAPLACIAN_3X3, mode="nearest"))
    if mask is not None:
        if mask.shape != gray.shape:
            raise ValueError("mask shape must match the image")
        if not mask.any():
            raise ValueError("mask selects no pixels")
        return float(lap[mask].mean())
    return float(lap.mean())


# ---------------------------------------------------------------------------
# SSIM / DSSIM


def _box_means(x: np.ndarray, win: int) -> np.ndarray:
    """Means over all win x win windows at valid positions (integral image)."""
    c = np.cumsum(np.cumsum(x, axis=0), axis=1)
    c = np.pad(c, ((1, 0), (1, 0)))
    s = c[win:, win:] - c[:-win, win:] - c[win:, :-win] + c[:-win, :-win]
    return s / (win * win)


def ssim(a: ImagePlane, b: ImagePlane, window: int = SSIM_WINDOW,
         k1: float = SSIM_K1, k2: float = SSIM_K2) -> float:
    """Mean SSIM over valid windows, averaged across RGB channels.

    Window moments are uncorrected (maximum-likelihood) means; the
    dynamic range is 1.0.
    """
    if a.data.shape != b.data.shape:
        raise ValueError("images must share a resolution")
    if min(a.height, a.width) < window:
        raise ValueError(f"images must be at least {window}x{window}")
    c1 = (k1 * 1.0) ** 2
    c2 = (k2 * 1.0) ** 2
    scores = []
    for ch in range(3):
        x = a.data[:, :, ch]
        y = b.data[:, :, ch]
        mx = _box_means(x, window)
        my = _box_means(y, window)
        vx = _box_means(x * x, window) - mx * mx
        vy = _box_means(y * y, window) - my * my
        cov = _box_means(x * y, window) - mx * my
        num = (2.0 * mx * my + c1) * (2.0 * cov + c2)
        den = (mx * mx + my * my + c1) * (vx + vy + c2)
        scores.append((num / den).mean())
    return float(np.mean(scores))


def dssim(a: ImagePlane, b: ImagePlane) -> float:
    """Structural dissimilarity (1 - SSIM) / 2; the default perceptual metric."""
    return (1.0 - ssim(a, b)) / 2.0


def consistency_score(frames: Sequence[ImagePlane],
                      metric: PerceptualMetric | None = None) -> float:
    """Mean perceptual distance over adjacent frame pairs."""
    if len(frames) < 2:
        raise ValueError("need at least two frames")
    metric = metric or dssim
    return float(np.mean([metric(frames[i], frames[i + 1])
                          for i in range(len(frames) - 1)]))


# ---------------------------------------------------------------------------
# Trend correlation


def pearson(x, y) -> float:
    """Pearson r with a fixed convention for zero-variance series:
    1.0 when both series are constant, 0.0 when only one is.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError(f"series shapes differ: {x.shape} vs {y.shape}")
    if x.size < 2:
        raise ValueError("need at least two points")
    if np.array_equal(x, y):
        return 1.0
    xc = x - x.mean()
    yc = y - y.mean()
    vx = float(xc @ xc)
    vy = float(yc @ yc)
    if vx == 0.0 or vy == 0.0:
        return 1.0 if (vx == 0.0 and vy == 0.0) else 0.0
    return float(np.clip((xc @ yc) / math.sqrt(vx * vy), -1.0, 1.0))


def trend_corrcoef(generated: EffectSeries | np.ndarray,
                   reference: EffectSeries | np.ndarray) -> float:
    """Pearson correlation between two effect trends.

    Per-channel series (2-D) correlate channel-wise and average.
    """
    g = generated.values if isinstance(generated, EffectSeries) else np.asarray(generated)
    r = reference.values if isinstance(reference, EffectSeries) else np.asarray(reference)
    if g.shape != r.shape:
        raise ValueError(f"series lengths differ: {g.shape} vs {r.shape}")
    if g.ndim == 2:
        return float(np.mean([pearson(g[:, c], r[:, c]) for c in range(g.shape[1])]))
    return pearson(g, r)


# ---------------------------------------------------------------------------
# Spectral scale estimation (focal trend)


def _hann2d(h: int, w: int) -> np.ndarray:
    return np.outer(np.hanning(h), np.hanning(w))


def _highpass(h: int, w: int) -> np.ndarray:
    # Cosine-product emphasis: kills the DC-heavy low frequencies that
    # otherwise dominate the log-polar correlation.
    fy = np.linspace(-0.5, 0.5, h, endpoint=False)
    fx = np.linspace(-0.5, 0.5, w, endpoint=False)
    x = np.outer(np.cos(np.pi * fy), np.cos(np.pi * fx))
    return (1.0 - x) * (2.0 - x)


def _logpolar_spectrum(gray: np.ndarray, n_theta: int, n_r: int):
    h, w = gray.shape
    f = np.fft.fftshift(np.abs(np.fft.fft2((gray - gray.mean()) * _hann2d(h, w))))
    f = np.log1p(f * _highpass(h, w))
    r_min = 1.0
    r_max = min(h, w) / 2.0 - 1.0
    base = (r_max / r_min) ** (1.0 / (n_r - 1))
    radii = r_min * base ** np.arange(n_r)
    thetas = np.pi * np.arange(n_theta) / n_theta
    ys = h // 2 + np.outer(np.sin(thetas), radii)
    xs = w // 2 + np.outer(np.cos(thetas), radii)
    lp = ndimage.map_coordinates(f, [ys, xs], order=1, mode="constant", cval=0.0)
    return lp, base


def _phase_correlate(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    fa = np.fft.fft2(a - a.mean())
    fb = np.fft.fft2(b - b.mean())
    cross = fa * np.conj(fb)
    mag = np.abs(cross)
    if mag.max() == 0.0:
        raise ScaleEstimationError("empty spectrum; frames look textureless")
    return np.real(np.fft.ifft2(cross / np.maximum(mag, 1e-15 * mag.max())))


def estimate_scale(a: ImagePlane, b: ImagePlane, n_theta: int = 256,
                   n_r: int = 512, min_peak_snr: float = 5.0) -> float:
    """Relative magnification of ``b`` with respect to ``a`` (> 1 = zoomed in).

    Log-polar resampling of the magnitude spectra turns scaling into a
    translation along the log-radius axis, recovered by phase correlation
    with parabolic sub-bin refinement.
    """
    ga = luma(a)
    gb = luma(b)
    if ga.shape != gb.shape:
        raise ValueError("frames must share a resolution")
    if ga.std() < 1e-9 or gb.std() < 1e-9:
        raise ScaleEstimationError("constant frame; no texture to register")
    lpa, base = _logpolar_spectrum(ga, n_theta, n_r)
    lpb, _ = _logpolar_spectrum(gb, n_theta, n_r)
    corr = _phase_correlate(lpa, lpb)
    peak = float(corr.max())
    snr = (peak - corr.mean()) / max(corr.std(), 1e-15)
    if not math.isfinite(snr) or snr < min_peak_snr:
        raise ScaleEstimationError(
            f"correlation peak too weak (snr {snr:.2f} < {min_peak_snr})")
    it, ir = np.unravel_index(int(corr.argmax()), corr.shape)
    # Parabolic refinement along the log-radius axis, with wraparound.
    c0 = corr[it, (ir - 1) % n_r]
    c1 = corr[it, ir]
    c2 = corr[it, (ir + 1) % n_r]
    denom = c0 - 2.0 * c1 + c2
    frac = 0.0 if denom == 0.0 else float(np.clip(0.5 * (c0 - c2) / denom, -0.5, 0.5))
    shift = ir + frac
    if shift > n_r / 2:
        shift -= n_r
    # Magnifying b by s compresses its spectrum by s: lp_b(k) = lp_a(k + d)
    # with d = ln(s)/ln(base), and F_a * conj(F_b) correlation peaks at +d.
    return float(base ** shift)


# ---------------------------------------------------------------------------
# Effect series and evaluation


def measure_effect(frames: Sequence[ImagePlane], kind: SettingKind,
                   color_reduce: str = "diff") -> EffectSeries:
    """Per-frame effect measurements for one setting kind (see module doc)."""
    if len(frames) < 2:
        raise ValueError("need at least two frames")
    shape = frames[0].data.shape
    if any(f.data.shape != shape for f in frames):
        raise ValueError("frames must share a resolution")

    if kind is SettingKind.BOKEH:
        values = np.array([mean_abs_laplacian(f) for f in frames])
    elif kind is SettingKind.SHUTTER:
        values = np.array([float(luma(f).mean()) for f in frames])
    elif kind is SettingKind.COLORTEMP:
        means = np.array([f.data.reshape(-1, 3).mean(axis=0) for f in frames])
        if color_reduce == "channels":
            return EffectSeries(kind=kind, values=means)
        if color_reduce != "diff":
            raise ValueError(f"unknown color_reduce {color_reduce!r}")
        values = means[:, 2] - means[:, 0]
    elif kind is SettingKind.FOCAL:
        pairwise = [estimate_scale(frames[i], frames[i + 1])
                    for i in range(len(frames) - 1)]
        values = np.concatenate([[1.0], np.cumprod(pairwise)])
        return EffectSeries(kind=kind, values=values,
                            extras={"pairwise_scales": [float(p) for p in pairwise]})
    else:
        raise ValueError(f"unknown kind {kind!r}")
    return EffectSeries(kind=kind, values=values)


@dataclass
class EvalReport:
    """Evaluation summary for one generated frame set against a reference."""

    kind: SettingKind
    accuracy_corrcoef: float
    consistency: float
    reference_consistency: float
    quality: float | None = None
    generated_series: list = field(default_factory=list)
    reference_series: list = field(default_factory=list)
    notes: dict = field(default_factory=dict)

    @property
    def consistency_gap(self) -> float:
        """|consistency - reference_consistency|; proximity to the reference
        is the criterion, not a smaller value."""
        return abs(self.consistency - self.reference_consistency)

    def to_dict(self) -> dict:
        return {
            "schema_version": 1,
            "task": self.kind.value,
            "accuracy_corrcoef": self.accuracy_corrcoef,
            "consistency": self.consistency,
            "reference_consistency": self.reference_consistency,
            "consistency_gap": self.consistency_gap,
            "quality": self.quality,
            "generated_series": self.generated_series,
            "reference_series": self.reference_series,
            "notes": self.notes,
        }


def evaluate(
    generated: Sequence[ImagePlane],
    reference: Sequence[ImagePlane],
    kind: SettingKind,
    values: Sequence[float] | None = None,
    metric: PerceptualMetric | None = None,
    quality_metric: QualityMetric | None = None,
    color_reduce: str = "diff",
) -> EvalReport:
    """Score a generated frame set against physically simulated references."""
    if len(generated) != len(reference):
        raise ValueError(
            f"frame counts differ: {len(generated)} generated vs {len(reference)} reference")
    if values is not None and len(values) != len(generated):
        raise ValueError("setting values must match the frame count")
    gen_series = measure_effect(generated, kind, color_reduce=color_reduce)
    ref_series = measure_effect(reference, kind, color_reduce=color_reduce)
    notes = {}
    if kind is SettingKind.FOCAL:
        notes["scale_method"] = "log-polar magnitude-spectrum phase correlation"
        notes["generated_pairwise_scales"] = gen_series.extras["pairwise_scales"]
        notes["reference_pairwise_scales"] = ref_series.extras["pairwise_scales"]
    if values is not None:
        notes["setting_values"] = [float(v) for v in values]
    return EvalReport(
        kind=kind,
        accuracy_corrcoef=trend_corrcoef(gen_series, ref_series),
        consistency=consistency_score(generated, metric=metric),
        reference_consistency=consistency_score(reference, metric=metric),
        quality=None if quality_metric is None else float(quality_metric(generated)),
        generated_series=np.asarray(gen_series.values).tolist(),
        reference_series=np.asarray(ref_series.values).tolist(),
        notes=notes,
    )
