import numpy as np
import pytest
from scipy import ndimage

from camsim.core import DisparityMap, ImagePlane


def textured_rgb(height: int, width: int, seed: int = 0) -> np.ndarray:
    """Multi-octave smoothed noise with a natural-ish spectrum, in [0, 1]."""
    rng = np.random.default_rng(seed)
    img = np.zeros((height, width))
    for sigma, amp in [(1, 0.5), (4, 1.0), (16, 2.0)]:
        img += amp * ndimage.gaussian_filter(rng.standard_normal((height, width)), sigma)
    img -= img.min()
    img /= img.max()
    rgb = np.stack([img, np.roll(img, 3, axis=0), np.roll(img, 3, axis=1)], axis=2)
    return 0.1 + 0.8 * rgb


@pytest.fixture
def textured_image() -> ImagePlane:
    return ImagePlane(textured_rgb(96, 128, seed=7))


def two_plane_scene(height: int = 120, width: int = 160, seed: int = 3):
    """Textured scene with a sharp foreground disk on a distant background.

    Returns (image, disparity, focus_disparity): disparity 1.0 on the disk,
    0.0 elsewhere, focus on the foreground.
    """
    data = textured_rgb(height, width, seed=seed)
    yy, xx = np.mgrid[:height, :width]
    disk = (yy - height / 2) ** 2 + (xx - width / 2) ** 2 <= (min(height, width) / 5) ** 2
    disp = np.where(disk, 1.0, 0.0)
    return ImagePlane(data), DisparityMap(disp), 1.0
