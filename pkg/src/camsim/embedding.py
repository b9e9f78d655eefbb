"""Camera-encoder inputs: coarse per-frame embeddings and label-difference
features over a pluggable text-embedding provider.

The coarse embedding encodes each frame's setting as a pixel-level
physical prior of shape (frames, channels, height, width):

  * bokeh     - constant plane 1/K^2: the peak weight of a unit-integral
                Gaussian blur kernel whose width grows with K, normalized
                so K=1 gives 1.  Strictly decreasing in K.
  * focal     - the crop-window mask at (h, w) resolution, replicated
                across channels.
  * shutter   - constant plane s / base_exposure (brightness ratio).
  * colortemp - first three channels hold the per-channel RGB gains,
                remaining channels are zero (needs c >= 3).

Difference features embed each frame's formatted label and take adjacent
differences e[i+1] - e[i]; the final frame pads with a zero vector.  The
bundled provider is a deterministic seeded hash of the label string
mapped to a unit vector; a real text encoder can be plugged through the
same interface, in-process or over HTTP.
"""

from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass
from typing import Protocol, Sequence, runtime_checkable

import numpy as np

from .core import SensorSpec, SettingKind, SettingSet
from .dataset import format_label
from .sim_colortemp import kelvin_to_rgb
from .sim_focal import focal_mask

CEMB_MAGIC = b"CEMB"
CEMB_VERSION = 1

BASE_EXPOSURE = 0.2


@dataclass(frozen=True, eq=False)
class EmbeddingTensor:
    """Frame-major (f_r, c, h, w) float32 tensor."""

    data: np.ndarray

    def __post_init__(self):
        arr = np.ascontiguousarray(self.data, dtype=np.float32)
        if arr.ndim != 4:
            raise ValueError(f"tensor must be 4-D (f_r, c, h, w), got {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("tensor contains non-finite values")
        if arr is self.data:
            arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    @property
    def f_r(self) -> int:
        return self.data.shape[0]

    @property
    def channels(self) -> int:
        return self.data.shape[1]

    @property
    def height(self) -> int:
        return self.data.shape[2]

    @property
    def width(self) -> int:
        return self.data.shape[3]


class ProviderError(RuntimeError):
    """A text-embedding provider failed for one frame."""

    def __init__(self, frame_index: int, message: str):
        super().__init__(f"frame {frame_index}: {message}")
        self.frame_index = frame_index


@runtime_checkable
class EmbeddingProvider(Protocol):
    """Deterministic text embedder producing unit-norm vectors."""

    dim: int

    def embed(self, text: str) -> np.ndarray: ...


class HashEmbeddingProvider:
    """Seeded-hash stand-in provider: sha256(label) seeds a generator whose
    standard-normal draw is normalized to a unit vector.  Deterministic
    per text and self-contained, for tests and offline pipelines.
    """

    def __init__(self, dim: int = 256):
        if dim < 1:
            raise ValueError("dim must be positive")
        self.dim = dim

    def embed(self, text: str) -> np.ndarray:
        seed = int.from_bytes(hashlib.sha256(text.encode("utf-8")).digest()[:8], "little")
        vec = np.random.default_rng(seed).standard_normal(self.dim)
        return vec / np.linalg.norm(vec)


class HttpEmbeddingProvider:
    """Client for an external text-embedding service.

    Request: POST ``endpoint`` with JSON {"text": <label>};
    response: JSON {"embedding": [<dim floats>]}.  Outputs are normalized
    to unit length to uphold the provider invariant.
    """

    def __init__(self, endpoint: str, dim: int, timeout: float = 30.0):
        self.endpoint = endpoint
        self.dim = dim
        self.timeout = timeout

    def embed(self, text: str) -> np.ndarray:
        import requests

        resp = requests.post(self.endpoint, json={"text": text}, timeout=self.timeout)
        resp.raise_for_status()
        vec = np.asarray(resp.json()["embedding"], dtype=np.float64)
        if vec.shape != (self.dim,):
            raise ValueError(f"service returned shape {vec.shape}, expected ({self.dim},)")
        norm = np.linalg.norm(vec)
        if norm == 0:
            raise ValueError("service returned a zero vector")
        return vec / norm


def coarse_embedding(settings: SettingSet, c: int, h: int, w: int,
                     spec: SensorSpec | None = None,
                     base_exposure: float = BASE_EXPOSURE) -> EmbeddingTensor:
    """Physical-prior tensor built from setting values alone (never pixels)."""
    if min(c, h, w) < 1:
        raise ValueError("dims must be at least 1")
    kind = settings.kind
    if kind is SettingKind.COLORTEMP and c < 3:
        raise ValueError("colortemp coarse embedding needs at least 3 channels")
    spec = spec or SensorSpec()
    frames = np.zeros((len(settings), c, h, w), dtype=np.float32)
    for i, value in enumerate(settings.values):
        if kind is SettingKind.BOKEH:
            frames[i] = 1.0 / (value * value)
        elif kind is SettingKind.SHUTTER:
            frames[i] = value / base_exposure
        elif kind is SettingKind.FOCAL:
            mask = focal_mask(value, spec, (w, h)).data[:, :, 0]
            frames[i] = mask[None, :, :]
        else:
            gains = kelvin_to_rgb(value).gains()
            for ch in range(3):
                frames[i, ch] = gains[ch]
    return EmbeddingTensor(frames)


def setting_diff_features(settings: SettingSet,
                          provider: EmbeddingProvider) -> list[np.ndarray]:
    """Adjacent differences of per-frame label embeddings, zero-padded last."""
    vectors = []
    for i, value in enumerate(settings.values):
        label = format_label(settings.kind, value)
        try:
            vec = np.asarray(provider.embed(label), dtype=np.float64)
        except Exception as exc:
            raise ProviderError(i, str(exc)) from exc
        if vec.shape != (provider.dim,):
            raise ProviderError(i, f"bad embedding shape {vec.shape}")
        vectors.append(vec)
    diffs = [vectors[i + 1] - vectors[i] for i in range(len(vectors) - 1)]
    diffs.append(np.zeros(provider.dim))
    return diffs


def assemble_encoder_input(coarse: EmbeddingTensor,
                           diffs: Sequence[np.ndarray]) -> EmbeddingTensor:
    """Concatenate difference features onto the coarse channels (c -> 2c).

    Each vector is truncated or zero-padded to c*h*w and reshaped
    row-major to (c, h, w), so tensors stay portable across providers of
    any dimension.
    """
    if len(diffs) != coarse.f_r:
        raise ValueError(f"got {len(diffs)} diff vectors for {coarse.f_r} frames")
    c, h, w = coarse.channels, coarse.height, coarse.width
    size = c * h * w
    blocks = []
    for vec in diffs:
        vec = np.asarray(vec, dtype=np.float32).ravel()
        block = np.zeros(size, dtype=np.float32)
        block[:min(size, vec.size)] = vec[:size]
        blocks.append(block.reshape(c, h, w))
    return EmbeddingTensor(np.concatenate([coarse.data, np.stack(blocks)], axis=1))


# ---------------------------------------------------------------------------
# Tensor file format: magic "CEMB", version u16 LE, dims f_r,c,h,w u32 LE,
# payload float32 LE, row-major frame-major.


def write_tensor(tensor: EmbeddingTensor, path) -> None:
    header = struct.pack("<4sH4I", CEMB_MAGIC, CEMB_VERSION,
                         tensor.f_r, tensor.channels, tensor.height, tensor.width)
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(tensor.data.astype("<f4").tobytes())


def read_tensor(path) -> EmbeddingTensor:
    with open(path, "rb") as fh:
        header = fh.read(struct.calcsize("<4sH4I"))
        magic, version, f_r, c, h, w = struct.unpack("<4sH4I", header)
        if magic != CEMB_MAGIC:
            raise ValueError(f"not a CEMB tensor file (magic {magic!r})")
        if version != CEMB_VERSION:
            raise ValueError(f"unsupported CEMB version {version}")
        payload = fh.read(4 * f_r * c * h * w)
    data = np.frombuffer(payload, dtype="<f4")
    if data.size != f_r * c * h * w:
        raise ValueError("truncated CEMB payload")
    return EmbeddingTensor(data.reshape(f_r, c, h, w))
