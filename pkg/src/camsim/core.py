"""Shared domain types, color helpers, and the seeding contract.

All types are immutable after construction (frozen dataclasses holding
read-only NumPy arrays), so they are safe to share across threads.  Pixel
storage is floating point in [0, 1]; quantization to 8-bit happens only at
PNG I/O, with round-half-up at the boundaries.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from PIL import Image

# Display gamma assumed for files that carry no encoding metadata.
DEFAULT_GAMMA = 2.2


class SettingKind(enum.Enum):
    """The four camera intrinsic settings this toolkit simulates."""

    BOKEH = "bokeh"
    FOCAL = "focal"
    SHUTTER = "shutter"
    COLORTEMP = "colortemp"


# Legal continuous range per setting kind (closed intervals).
# Bokeh is a dimensionless blur strength, focal is mm, shutter is a
# normalized exposure scale, colortemp is Kelvin.
SETTING_RANGES: dict[SettingKind, tuple[float, float]] = {
    SettingKind.BOKEH: (1.0, 30.0),
    SettingKind.FOCAL: (24.0, 70.0),
    SettingKind.SHUTTER: (0.1, 1.0),
    SettingKind.COLORTEMP: (2000.0, 10000.0),
}


def check_setting_value(kind: SettingKind, value: float) -> float:
    """Validate one setting value against its kind's legal range."""
    lo, hi = SETTING_RANGES[kind]
    v = float(value)
    if not math.isfinite(v) or v < lo or v > hi:
        raise ValueError(f"{kind.value} value {value!r} outside legal range [{lo}, {hi}]")
    return v


@dataclass(frozen=True)
class CameraSetting:
    """A tagged scalar camera setting."""

    kind: SettingKind
    value: float

    def __post_init__(self):
        object.__setattr__(self, "value", check_setting_value(self.kind, self.value))


def _freeze(arr: np.ndarray) -> np.ndarray:
    out = np.ascontiguousarray(arr, dtype=np.float64)
    if out is arr:
        out = arr.copy()
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class ImagePlane:
    """H x W x 3 RGB image with values in [0, 1].

    ``gamma`` is the encoding exponent: pixel = linear ** (1/gamma).
    ``gamma=None`` marks a linear-encoded (scene-referred) image.
    """

    data: np.ndarray
    gamma: float | None = DEFAULT_GAMMA

    def __post_init__(self):
        arr = np.asarray(self.data)
        if arr.ndim != 3 or arr.shape[2] != 3:
            raise ValueError(f"image data must be HxWx3, got shape {arr.shape}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError("image must be at least 1x1")
        if not np.all(np.isfinite(arr)):
            raise ValueError("image contains non-finite values")
        if arr.min() < 0.0 or arr.max() > 1.0:
            raise ValueError("image values must lie in [0, 1]")
        if self.gamma is not None and not self.gamma > 0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")
        object.__setattr__(self, "data", _freeze(arr))

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def is_linear(self) -> bool:
        return self.gamma is None


@dataclass(frozen=True, eq=False)
class DisparityMap:
    """H x W normalized inverse-depth map in [0, 1]; larger means closer.

    ``degenerate`` flags maps produced from constant depth, where min-max
    normalization is undefined and the map is all zeros by convention.
    """

    data: np.ndarray
    degenerate: bool = False

    def __post_init__(self):
        arr = np.asarray(self.data)
        if arr.ndim != 2:
            raise ValueError(f"disparity data must be HxW, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("disparity contains non-finite values")
        if arr.min() < 0.0 or arr.max() > 1.0:
            raise ValueError("disparity values must lie in [0, 1]")
        object.__setattr__(self, "data", _freeze(arr))

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]


@dataclass(frozen=True)
class SettingSet:
    """An unordered collection of sampled values of one setting kind.

    Values stay in sampled order; nothing in the pipeline may sort them.
    """

    kind: SettingKind
    values: tuple[float, ...]
    seed: int

    def __post_init__(self):
        vals = tuple(check_setting_value(self.kind, v) for v in self.values)
        if len(vals) < 1:
            raise ValueError("a setting set needs at least one value")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        object.__setattr__(self, "values", vals)

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class SensorSpec:
    """Physical sensor geometry used for field-of-view math."""

    width_mm: float = 36.0
    height_mm: float = 24.0
    base_focal_mm: float = 24.0

    def __post_init__(self):
        for name in ("width_mm", "height_mm", "base_focal_mm"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")


@dataclass(frozen=True)
class SensorModel:
    """Sensor/ISP parameters for the exposure imaging chain.

    ``photon_scale`` sets the full-scale photon count at unit irradiance
    and controls shot-noise magnitude.  When left unset, ``full_well`` is
    derived as quantum_efficiency * photon_scale * base_exposure so that a
    base-length exposure of a unit-irradiance pixel exactly fills the well,
    and ``conversion_gain`` is derived so a full well maps to ADC full
    scale.  These defaults make the stochastic chain agree in expectation
    with the deterministic one.
    """

    quantum_efficiency: float = 0.6
    dark_current: float = 0.01       # electrons per second
    read_noise: float = 2.0          # std dev, in post-gain DN
    gamma: float = DEFAULT_GAMMA
    adc_bits: int = 10
    base_exposure: float = 0.2       # seconds
    photon_scale: float = 10000.0    # photons at unit irradiance over base_exposure
    full_well: float | None = None   # electrons
    conversion_gain: float | None = None  # DN per electron

    def __post_init__(self):
        if not 0 < self.quantum_efficiency <= 1:
            raise ValueError("quantum_efficiency must be in (0, 1]")
        if not 1 <= self.adc_bits <= 16:
            raise ValueError("adc_bits must be in [1, 16]")
        for name in ("dark_current", "read_noise", "gamma", "base_exposure",
                     "photon_scale"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be strictly positive")
        if self.full_well is None:
            object.__setattr__(
                self, "full_well",
                self.quantum_efficiency * self.photon_scale * self.base_exposure)
        if self.conversion_gain is None:
            object.__setattr__(
                self, "conversion_gain", self.adc_max / self.full_well)
        for name in ("conversion_gain", "full_well"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be strictly positive")

    @property
    def adc_max(self) -> int:
        """Highest ADC code (full scale) for the configured bit depth."""
        return 2**self.adc_bits - 1


@dataclass(frozen=True, eq=False)
class EffectSeries:
    """Per-frame scalar (or per-channel) measurements of one camera effect."""

    kind: SettingKind
    values: np.ndarray
    extras: dict = field(default_factory=dict)

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=np.float64)
        if arr.ndim not in (1, 2) or arr.shape[0] < 1:
            raise ValueError(f"series must be a non-empty 1-D or 2-D array, got {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("series contains non-finite values")
        object.__setattr__(self, "values", _freeze(arr))

    def __len__(self) -> int:
        return self.values.shape[0]


# ---------------------------------------------------------------------------
# Seeding


_GOLDEN = 0x9E3779B97F4A7C15
_MASK64 = (1 << 64) - 1


def splitmix64(x: int) -> int:
    """One SplitMix64 finalization round (Steele et al. mixing constants)."""
    x &= _MASK64
    x ^= x >> 30
    x = (x * 0xBF58476D1CE4E5B9) & _MASK64
    x ^= x >> 27
    x = (x * 0x94D049BB133111EB) & _MASK64
    x ^= x >> 31
    return x


def derive_frame_seed(master_seed: int, frame_index: int) -> int:
    """Derive a per-frame seed from a master seed.

    The mix is fixed so datasets reproduce across runs:

        seed_i = splitmix64((master + (i + 1) * 0x9E3779B97F4A7C15) mod 2^64)

    The finalizer is bijective, so distinct (master, index) inputs that map
    to distinct pre-mix values always produce distinct seeds.
    """
    if frame_index < 0:
        raise ValueError("frame_index must be non-negative")
    return splitmix64((master_seed + (frame_index + 1) * _GOLDEN) & _MASK64)


# ---------------------------------------------------------------------------
# Gamma encoding


def to_linear(img: ImagePlane) -> ImagePlane:
    """Decode a gamma-encoded image to linear: v -> v ** gamma."""
    if img.is_linear:
        raise ValueError("image is already linear-encoded")
    if img.data.min() < 0:
        raise ValueError("negative pixel values have no gamma decoding")
    return ImagePlane(np.power(img.data, img.gamma), gamma=None)


def from_linear(img: ImagePlane, gamma: float = DEFAULT_GAMMA) -> ImagePlane:
    """Encode a linear image with a display gamma: v -> v ** (1/gamma)."""
    if not img.is_linear:
        raise ValueError("image is not linear-encoded")
    if not gamma > 0:
        raise ValueError("gamma must be positive")
    if img.data.min() < 0:
        raise ValueError("negative pixel values have no gamma encoding")
    return ImagePlane(np.power(img.data, 1.0 / gamma), gamma=gamma)


def luma(img: ImagePlane) -> np.ndarray:
    """Rec.709 luma weights applied to the stored encoding."""
    d = img.data
    return 0.2126 * d[:, :, 0] + 0.7152 * d[:, :, 1] + 0.0722 * d[:, :, 2]


# ---------------------------------------------------------------------------
# PNG I/O (8-bit RGB); pixel mapping is DN/255.0 on read and
# floor(v*255 + 0.5) on write.


def quantize_u8(data: np.ndarray) -> np.ndarray:
    """[0,1] floats to 8-bit DN with round-half-up."""
    return np.floor(np.clip(data, 0.0, 1.0) * 255.0 + 0.5).astype(np.uint8)


def read_image(path, gamma: float | None = None) -> ImagePlane:
    """Read an 8-bit RGB PNG (or any PIL-readable raster) as an ImagePlane.

    Files carrying a PNG gAMA chunk are honored (encoding gamma = 1/gAMA);
    otherwise the default display gamma 2.2 is assumed.
    """
    with Image.open(path) as im:
        if gamma is None:
            file_gamma = im.info.get("gamma")
            gamma = (1.0 / file_gamma) if file_gamma else DEFAULT_GAMMA
        arr = np.asarray(im.convert("RGB"), dtype=np.float64) / 255.0
    return ImagePlane(arr, gamma=gamma)


def write_image(img: ImagePlane, path) -> None:
    """Write an ImagePlane as an 8-bit RGB PNG."""
    Image.fromarray(quantize_u8(img.data), mode="RGB").save(path, format="PNG")
