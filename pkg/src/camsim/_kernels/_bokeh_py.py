"""Pure-NumPy disc-gather blur kernel (fallback path).

For each output pixel p with circle-of-confusion radius
r(p) = blur_strength * defocus(p) (capped at max_radius, in pixels),
the kernel gathers every in-bounds source q with |q - p| <= r(p):

    out(p) = img(p) + sum_q w(q) * (img(q) - img(p)) / sum_q w(q)
    w(q)   = 1         if defocus(q) >= defocus(p) * (1 - tau)
             tau_leak  otherwise

The leak weight suppresses sharp (near-focus) sources bleeding into
defocused regions.  The center-relative accumulation makes constant
images exact fixed points.  Pixels with r < 0.5 are copied unchanged.

Vectorized as a loop over window offsets; visits the same (p, q) pairs in
the same order as the compiled kernel, so results agree to rounding.
"""

from __future__ import annotations

import numpy as np


def render(img: np.ndarray, defocus: np.ndarray, blur_strength: float,
           max_radius: float, tau: float, tau_leak: float) -> np.ndarray:
    h, w = defocus.shape
    r = np.minimum(blur_strength * defocus, max_radius)
    blurred = r >= 0.5
    if not blurred.any():
        return img.copy()
    r2 = r * r
    thresh = defocus * (1.0 - tau)
    acc = np.zeros_like(img)
    wsum = np.zeros((h, w))
    r_max = r.max()
    radius = int(np.floor(r_max))
    for dy in range(-radius, radius + 1):
        ys = slice(max(0, -dy), h - max(0, dy))
        qys = slice(max(0, dy), h - max(0, -dy))
        for dx in range(-radius, radius + 1):
            d2 = dy * dy + dx * dx
            if d2 > r_max * r_max:
                continue
            xs = slice(max(0, -dx), w - max(0, dx))
            qxs = slice(max(0, dx), w - max(0, -dx))
            inside = d2 <= r2[ys, xs]
            wq = np.where(defocus[qys, qxs] >= thresh[ys, xs], 1.0, tau_leak)
            wq = wq * inside
            acc[ys, xs] += wq[:, :, None] * (img[qys, qxs] - img[ys, xs])
            wsum[ys, xs] += wq
    out = img + acc / wsum[:, :, None]
    out[~blurred] = img[~blurred]
    return out
