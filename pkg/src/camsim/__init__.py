"""camsim: physically-based camera-intrinsics simulation toolkit.

Builds contrastive multi-frame datasets (one scene, one varying camera
setting), coarse camera-setting embeddings, and trend/consistency
evaluation of frame sets against physically simulated references.
"""

from .core import (
    CameraSetting,
    DisparityMap,
    EffectSeries,
    ImagePlane,
    SensorModel,
    SensorSpec,
    SettingKind,
    SettingSet,
    SETTING_RANGES,
    derive_frame_seed,
    from_linear,
    luma,
    read_image,
    to_linear,
    write_image,
)

__version__ = "0.1.0"

__all__ = [
    "CameraSetting",
    "DisparityMap",
    "EffectSeries",
    "ImagePlane",
    "SensorModel",
    "SensorSpec",
    "SettingKind",
    "SettingSet",
    "SETTING_RANGES",
    "derive_frame_seed",
    "from_linear",
    "luma",
    "read_image",
    "to_linear",
    "write_image",
    "__version__",
]
