"""Contrastive dataset assembly: captions, per-frame simulation, manifests.

A contrastive set is one base scene rendered at several values of a single
camera setting, paired with a scene description that never varies across
frames.  Frames are simulated on demand from the base image, the sampled
values, and the config, so any stored frame can be rebuilt bit-exactly
from the manifest metadata.

Base-image quality gates per task:

  * focal     - short side >= 3000 px (enough detail to survive cropping)
  * bokeh     - a disparity sidecar must exist with p95 - p5 spread > 0.3
                (a distinguishable foreground)
  * shutter / colortemp - mean luma in [0.25, 0.75] (sane neutral exposure)

Gates warn-and-skip by default; ``strict`` turns them into failures.

Captions come from a sidecar text file ("<stem>.txt" next to the image)
when present, else from a configured HTTP captioning endpoint
(POST {"image_b64": ...} -> {"caption": ...}); otherwise set construction
fails.
"""

from __future__ import annotations

import base64
import concurrent.futures
import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Protocol, Sequence

import numpy as np

from . import sim_bokeh, sim_colortemp, sim_exposure, sim_focal
from .config import (captioner_endpoint, config_hash, load_config,
                     sensor_model_from, sensor_spec_from)
from .core import (
    DisparityMap,
    ImagePlane,
    SettingKind,
    SettingSet,
    derive_frame_seed,
    luma,
    read_image,
    write_image,
)
from .sampler import sample_setting_set

logger = logging.getLogger("camsim.dataset")

MANIFEST_SCHEMA_VERSION = 1

IMAGE_SUFFIXES = (".png", ".jpg", ".jpeg")


class CaptionError(RuntimeError):
    """No caption could be produced for a base image."""


class QualityGateError(RuntimeError):
    """A base image failed the task's quality gate."""


class ManifestError(RuntimeError):
    """Manifest file is missing, malformed, or of an unsupported schema."""


# ---------------------------------------------------------------------------
# Label formatting


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def _fixed(value: float, decimals: int) -> str:
    scale = 10 ** decimals
    return f"{math.floor(value * scale + 0.5) / scale:.{decimals}f}"


def format_label(kind: SettingKind, value: float) -> str:
    """Per-frame label token; rounding is half-up throughout."""
    if kind is SettingKind.COLORTEMP:
        return f"{_round_half_up(value)}K"
    if kind is SettingKind.FOCAL:
        return f"{_round_half_up(value)}mm"
    if kind is SettingKind.SHUTTER:
        return _fixed(value, 2)
    return _fixed(value, 1)


def format_set_label(settings: SettingSet) -> str:
    """Bracketed set label, e.g. "<9933K; 3626K; 6302K; 4039K; 2400K>"."""
    return "<" + "; ".join(format_label(settings.kind, v) for v in settings.values) + ">"


# ---------------------------------------------------------------------------
# Caption sources


class CaptionSource(Protocol):
    def caption(self, image_path: Path) -> str: ...


class SidecarCaptionSource:
    """Caption from "<stem>.txt" next to the image."""

    def caption(self, image_path: Path) -> str:
        sidecar = Path(image_path).with_suffix(".txt")
        if not sidecar.exists():
            raise CaptionError(f"no caption sidecar {sidecar}")
        text = sidecar.read_text(encoding="utf-8").strip()
        if not text:
            raise CaptionError(f"caption sidecar {sidecar} is empty")
        return text


class HttpCaptionSource:
    """Client for an external captioning service.

    Request: POST ``endpoint`` with JSON {"image_b64": <base64 bytes>};
    response: JSON {"caption": <text>}.  Determinism per (image, service
    config) is the service's contract.
    """

    def __init__(self, endpoint: str, timeout: float = 60.0):
        self.endpoint = endpoint
        self.timeout = timeout

    def caption(self, image_path: Path) -> str:
        import requests

        payload = base64.b64encode(Path(image_path).read_bytes()).decode("ascii")
        try:
            resp = requests.post(self.endpoint, json={"image_b64": payload},
                                 timeout=self.timeout)
            resp.raise_for_status()
            text = str(resp.json()["caption"]).strip()
        except Exception as exc:
            raise CaptionError(f"caption service failed for {image_path}: {exc}") from exc
        if not text:
            raise CaptionError(f"caption service returned empty text for {image_path}")
        return text


class ChainCaptionSource:
    """Sidecar first, then the configured endpoint, else error."""

    def __init__(self, endpoint: str | None):
        self.sidecar = SidecarCaptionSource()
        self.http = HttpCaptionSource(endpoint) if endpoint else None

    def caption(self, image_path: Path) -> str:
        try:
            return self.sidecar.caption(image_path)
        except CaptionError:
            if self.http is None:
                raise CaptionError(
                    f"no caption sidecar for {image_path} and no endpoint configured")
        return self.http.caption(image_path)


def default_caption_source(config: dict) -> CaptionSource:
    return ChainCaptionSource(captioner_endpoint(config))


# ---------------------------------------------------------------------------
# Quality gates and sidecar discovery


def disparity_sidecar(image_path: Path) -> Path:
    return Path(image_path).with_suffix(".disparity.png")


def check_quality_gate(kind: SettingKind, base: ImagePlane,
                       disparity: DisparityMap | None, config: dict) -> None:
    gates = config["quality_gates"]
    if kind is SettingKind.FOCAL:
        short = min(base.width, base.height)
        if short < gates["focal_min_short_side"]:
            raise QualityGateError(
                f"short side {short} px below the focal floor "
                f"{gates['focal_min_short_side']} px")
    elif kind is SettingKind.BOKEH:
        if disparity is None:
            raise QualityGateError("no disparity map for bokeh rendering")
        spread = float(np.percentile(disparity.data, 95) - np.percentile(disparity.data, 5))
        if spread <= gates["bokeh_min_disparity_spread"]:
            raise QualityGateError(
                f"disparity spread {spread:.3f} too small for a "
                f"distinguishable foreground")
    else:
        mean_luma = float(luma(base).mean())
        if not gates["luma_min"] <= mean_luma <= gates["luma_max"]:
            raise QualityGateError(
                f"mean luma {mean_luma:.3f} outside "
                f"[{gates['luma_min']}, {gates['luma_max']}]")


# ---------------------------------------------------------------------------
# Frame rendering


def render_frame(kind: SettingKind, base: ImagePlane, value: float,
                 frame_seed: int, config: dict,
                 disparity: DisparityMap | None = None) -> ImagePlane:
    """Simulate one frame; deterministic given (inputs, config, seed)."""
    if kind is SettingKind.COLORTEMP:
        return sim_colortemp.apply_color_temperature(base, value)
    if kind is SettingKind.SHUTTER:
        seed = frame_seed if config["exposure"]["stochastic"] else None
        return sim_exposure.simulate_exposure(base, value, sensor_model_from(config),
                                              seed=seed)
    if kind is SettingKind.FOCAL:
        out_size = (config["focal"]["out_width"], config["focal"]["out_height"])
        return sim_focal.simulate_focal(base, sensor_spec_from(config), value, out_size)
    if kind is SettingKind.BOKEH:
        if disparity is None:
            raise ValueError("bokeh rendering needs a disparity map")
        b = config["bokeh"]
        params = sim_bokeh.BokehParams(
            blur=value,
            focus_disparity=sim_bokeh.pick_focus_disparity(disparity, b["focus_percentile"]),
            tau=b["tau"],
            tau_leak=b["tau_leak"],
        )
        return sim_bokeh.render_bokeh(base, disparity, params)
    raise ValueError(f"unknown kind {kind!r}")


# ---------------------------------------------------------------------------
# Contrastive sets


@dataclass(frozen=True, eq=False)
class FrameRecord:
    value: float
    path: str | None = None
    image: ImagePlane | None = None


@dataclass(frozen=True, eq=False)
class ContrastiveSet:
    set_id: str
    base_image: str
    scene_description: str
    kind: SettingKind
    frames: tuple[FrameRecord, ...]
    seed: int
    sim_config_hash: str
    extras: dict = field(default_factory=dict)

    def __post_init__(self):
        if len(self.frames) < 2:
            raise ValueError("a contrastive set needs at least two frames")

    @property
    def values(self) -> tuple[float, ...]:
        return tuple(f.value for f in self.frames)

    def setting_set(self) -> SettingSet:
        return SettingSet(kind=self.kind, values=self.values, seed=self.seed)

    def to_dict(self) -> dict:
        d = {
            "set_id": self.set_id,
            "base_image": self.base_image,
            "scene_description": self.scene_description,
            "kind": self.kind.value,
            "seed": self.seed,
            "sim_config_hash": self.sim_config_hash,
            "frames": [{"value": f.value, "path": f.path} for f in self.frames],
        }
        d.update(self.extras)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ContrastiveSet":
        d = dict(d)
        try:
            frames = tuple(FrameRecord(value=f["value"], path=f.get("path"))
                           for f in d.pop("frames"))
            return cls(
                set_id=d.pop("set_id"),
                base_image=d.pop("base_image"),
                scene_description=d.pop("scene_description"),
                kind=SettingKind(d.pop("kind")),
                seed=d.pop("seed"),
                sim_config_hash=d.pop("sim_config_hash"),
                frames=frames,
                extras=d,  # unknown fields ride along opaquely
            )
        except KeyError as exc:
            raise ManifestError(f"set entry is missing field {exc}") from exc


def build_contrastive_set(
    base_path,
    kind: SettingKind,
    f_r: int,
    seed: int,
    config: dict | None = None,
    caption_source: CaptionSource | None = None,
    set_id: str | None = None,
) -> ContrastiveSet:
    """Build one set with in-memory frames.

    Raises QualityGateError when the base fails the task gate and
    CaptionError when no scene description can be obtained; callers decide
    whether those skip or abort the batch.
    """
    config = config if config is not None else load_config()
    base_path = Path(base_path)
    base = read_image(base_path)
    disparity = None
    if kind is SettingKind.BOKEH:
        sidecar = disparity_sidecar(base_path)
        disparity = sim_bokeh.load_disparity(sidecar) if sidecar.exists() else None
    check_quality_gate(kind, base, disparity, config)

    source = caption_source or default_caption_source(config)
    description = source.caption(base_path)
    settings = sample_setting_set(kind, f_r, seed)

    frames = []
    for i, value in enumerate(settings.values):
        try:
            img = render_frame(kind, base, value, derive_frame_seed(seed, i),
                               config, disparity=disparity)
        except Exception as exc:
            raise RuntimeError(f"frame {i} (value {value!r}) failed: {exc}") from exc
        frames.append(FrameRecord(value=value, image=img))

    return ContrastiveSet(
        set_id=set_id or f"{kind.value}_{base_path.stem}_{seed:016x}",
        base_image=str(base_path),
        scene_description=description,
        kind=kind,
        frames=tuple(frames),
        seed=seed,
        sim_config_hash=config_hash(config),
    )


def write_set_frames(cset: ContrastiveSet, out_dir) -> ContrastiveSet:
    """Persist in-memory frames as PNGs under "<set_id>/frame_<i>.png"."""
    out_dir = Path(out_dir)
    set_dir = out_dir / cset.set_id
    set_dir.mkdir(parents=True, exist_ok=True)
    frames = []
    for i, frame in enumerate(cset.frames):
        if frame.image is None:
            raise ValueError(f"frame {i} has no in-memory image to write")
        rel = f"{cset.set_id}/frame_{i}.png"
        write_image(frame.image, out_dir / rel)
        frames.append(FrameRecord(value=frame.value, path=rel, image=frame.image))
    return ContrastiveSet(
        set_id=cset.set_id, base_image=cset.base_image,
        scene_description=cset.scene_description, kind=cset.kind,
        frames=tuple(frames), seed=cset.seed,
        sim_config_hash=cset.sim_config_hash, extras=cset.extras)


# ---------------------------------------------------------------------------
# Manifests


def write_manifest(sets: Sequence[ContrastiveSet], path) -> None:
    doc = {
        "schema_version": MANIFEST_SCHEMA_VERSION,
        "sets": [s.to_dict() for s in sets],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_manifest(path) -> list[ContrastiveSet]:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ManifestError(f"cannot read manifest {path}: {exc}") from exc
    version = doc.get("schema_version")
    if version != MANIFEST_SCHEMA_VERSION:
        raise ManifestError(
            f"manifest schema version {version!r} unsupported "
            f"(expected {MANIFEST_SCHEMA_VERSION})")
    return [ContrastiveSet.from_dict(entry) for entry in doc["sets"]]


def missing_frames(sets: Sequence[ContrastiveSet], root) -> dict[str, list[str]]:
    """Per-set relative paths of frame files that do not exist under root."""
    root = Path(root)
    missing = {}
    for cset in sets:
        gone = [f.path for f in cset.frames if f.path and not (root / f.path).exists()]
        if gone:
            missing[cset.set_id] = gone
    return missing


# ---------------------------------------------------------------------------
# Batch building


def list_base_images(input_dir) -> list[Path]:
    input_dir = Path(input_dir)
    images = sorted(p for p in input_dir.iterdir()
                    if p.suffix.lower() in IMAGE_SUFFIXES
                    and not p.name.endswith(".disparity.png"))
    if not images:
        raise FileNotFoundError(f"no base images under {input_dir}")
    return images


def build_dataset(
    input_dir,
    kind: SettingKind,
    f_r: int,
    count: int,
    seed: int,
    out_dir,
    config: dict | None = None,
    strict: bool = False,
    jobs: int = 1,
    caption_source: CaptionSource | None = None,
) -> Path:
    """Build ``count`` sets cycling over the base images; returns the
    manifest path.  Set i uses master seed derive_frame_seed(seed, i), so
    the whole dataset is reproducible from one seed.  Output ordering is
    deterministic regardless of ``jobs``.
    """
    config = config if config is not None else load_config()
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    images = list_base_images(input_dir)

    def build(index: int) -> ContrastiveSet:
        base = images[index % len(images)]
        return build_contrastive_set(
            base, kind, f_r, derive_frame_seed(seed, index), config=config,
            caption_source=caption_source,
            set_id=f"{kind.value}_{index:04d}_{base.stem}")

    indices = range(count)
    if jobs > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_guarded(build, strict), indices))
    else:
        results = [_guarded(build, strict)(i) for i in indices]

    sets = []
    for result in results:
        if result is None:
            continue
        sets.append(write_set_frames(result, out_dir))
        logger.info("set written", extra={"ctx": {
            "set_id": sets[-1].set_id, "frames": len(sets[-1].frames)}})
    manifest = out_dir / "manifest.json"
    write_manifest(sets, manifest)
    return manifest


def _guarded(build, strict: bool):
    def run(index: int):
        try:
            return build(index)
        except (QualityGateError, CaptionError) as exc:
            if strict:
                raise
            logger.warning("set skipped: %s", exc, extra={"ctx": {"set_index": index}})
            return None
    return run
