"""Hot-kernel backends: compiled Cython core with a pure-NumPy fallback.

The compiled extension is preferred when importable; set the environment
variable ``CAMSIM_PURE_PYTHON=1`` to force the fallback (useful for
benchmarking and for installs without a compiler).  Both backends share
one contract, documented in ``_bokeh_py``.
"""

from __future__ import annotations

import os

import numpy as np

from . import _bokeh_py

BACKEND = "numpy"
_render = _bokeh_py.render

if os.environ.get("CAMSIM_PURE_PYTHON") != "1":
    try:
        from . import _bokeh_cy

        _render = _bokeh_cy.render
        BACKEND = "cython"
    except ImportError:
        pass


def available_backends() -> dict:
    """Name -> kernel callable for every importable backend."""
    backends = {"numpy": _bokeh_py.render}
    try:
        from . import _bokeh_cy

        backends["cython"] = _bokeh_cy.render
    except ImportError:
        pass
    return backends


def disc_gather_blur(img: np.ndarray, defocus: np.ndarray, blur_strength: float,
                     max_radius: float, tau: float, tau_leak: float) -> np.ndarray:
    """Occlusion-aware variable-radius disc blur (active backend)."""
    img = np.ascontiguousarray(img, dtype=np.float64)
    defocus = np.ascontiguousarray(defocus, dtype=np.float64)
    if img.ndim != 3 or img.shape[2] != 3 or img.shape[:2] != defocus.shape:
        raise ValueError(
            f"image {img.shape} and defocus {defocus.shape} shapes are incompatible")
    return _render(img, defocus, float(blur_strength), float(max_radius),
                   float(tau), float(tau_leak))
