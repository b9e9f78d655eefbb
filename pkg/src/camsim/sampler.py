"""Continuous random sampling of camera-setting values.

Values are drawn independently and uniformly over each setting's legal
range and kept in draw order: sets are deliberately never sorted, so
downstream consumers learn the values themselves rather than a direction.
Duplicates and near-duplicates within a set are allowed.
"""

from __future__ import annotations

import numpy as np

from .core import SETTING_RANGES, SettingKind, SettingSet


def sample_setting_set(kind: SettingKind, f_r: int, seed: int) -> SettingSet:
    """Draw ``f_r`` values uniformly from the kind's continuous range.

    Deterministic for a given seed; resampling with the same seed
    reproduces the identical value list bitwise.
    """
    if f_r < 2:
        raise ValueError(f"a contrastive set needs at least 2 frames, got {f_r}")
    lo, hi = SETTING_RANGES[kind]
    rng = np.random.default_rng(seed)
    values = rng.uniform(lo, hi, size=f_r)
    return SettingSet(kind=kind, values=tuple(float(v) for v in values), seed=seed)


def setting_grid(kind: SettingKind, n_bins: int) -> np.ndarray:
    """The ``n_bins`` uniformly spaced grid points spanning the kind's range."""
    if n_bins < 2:
        raise ValueError(f"need at least 2 grid points, got {n_bins}")
    lo, hi = SETTING_RANGES[kind]
    return lo + np.arange(n_bins) * ((hi - lo) / (n_bins - 1))


def discretize_setting_set(setting_set: SettingSet, n_bins: int) -> SettingSet:
    """Snap each value to the nearest of ``n_bins`` uniform grid points.

    Ties round toward the lower grid index.  This exists only to reproduce
    the discrete-sampling ablation baseline; the main pipeline stays
    continuous.
    """
    grid = setting_grid(setting_set.kind, n_bins)
    lo, hi = SETTING_RANGES[setting_set.kind]
    step = (hi - lo) / (n_bins - 1)
    snapped = []
    for v in setting_set.values:
        t = (v - lo) / step
        k = int(np.floor(t + 0.5))
        # Half-way points go to the lower index; detect them within a few
        # ulps so decimal halves (e.g. 0.55 between 0.1 and 1.0) count.
        if k > 0 and abs(t + 0.5 - k) <= 8 * np.finfo(float).eps * max(1.0, abs(t)):
            k -= 1
        snapped.append(float(grid[min(max(k, 0), n_bins - 1)]))
    return SettingSet(kind=setting_set.kind, values=tuple(snapped), seed=setting_set.seed)
