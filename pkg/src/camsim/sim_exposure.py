"""Shutter-speed simulation through a CMOS-style imaging chain.

The chain models a displayed image L captured at exposure t from a scene
irradiance map H (linear, in [0, 1] at base exposure):

    electrons ~ Poisson(t * QE * (H * photon_scale + mu_dark))
    electrons clipped at the full-well capacity
    DN = electrons * conversion_gain + N(0, read_noise^2)
    DN quantized by a uniform adc_bits ADC, then L = (DN / DN_max)^(1/gamma)

A linear camera response is assumed.  The deterministic mode is the
noise-free, unquantized limit of the same chain:

    L = clip(m * H)^(1/gamma),  m = shutter / base_exposure

With the default derived sensor constants (full_well = QE * photon_scale *
base_exposure, conversion_gain = DN_max / full_well) the stochastic chain
matches the deterministic output in expectation, up to shot/read noise and
quantization.

Poisson sampling is exact below rate 256 and uses the rounded normal
approximation rate + sqrt(rate) * N(0,1) above; the threshold is fixed so
independent implementations agree statistically.
"""

from __future__ import annotations

import numpy as np

from .core import (
    EffectSeries,
    ImagePlane,
    SensorModel,
    SettingKind,
    check_setting_value,
    luma,
    to_linear,
)

# Rate above which Poisson draws switch to the rounded normal approximation.
POISSON_EXACT_MAX = 256.0


def recover_irradiance(base: ImagePlane, model: SensorModel) -> ImagePlane:
    """Approximate scene irradiance H from a gamma-encoded base image.

    H = base**gamma (the model's gamma), normalized so that a deterministic
    exposure of length base_exposure reproduces the base image exactly.
    """
    if base.is_linear:
        raise ValueError("base image must be gamma-encoded")
    return to_linear(ImagePlane(base.data, gamma=model.gamma))


def _hybrid_poisson(rng: np.random.Generator, rate: np.ndarray) -> np.ndarray:
    out = np.empty_like(rate)
    small = rate < POISSON_EXACT_MAX
    out[small] = rng.poisson(rate[small])
    large = ~small
    if large.any():
        lam = rate[large]
        draw = lam + np.sqrt(lam) * rng.standard_normal(lam.shape)
        out[large] = np.maximum(np.round(draw), 0.0)
    return out


def forward_exposure(
    irradiance: ImagePlane,
    shutter: float,
    model: SensorModel,
    seed: int | None = None,
) -> ImagePlane:
    """Expose a linear irradiance map for ``shutter`` seconds of scale.

    ``seed=None`` selects the deterministic (noise-free) chain; an integer
    seed selects the stochastic chain, which is bit-identical for identical
    seeds.  Output is gamma-encoded and clipped to [0, 1].
    """
    check_setting_value(SettingKind.SHUTTER, shutter)
    if not irradiance.is_linear:
        raise ValueError("irradiance must be linear-encoded")
    h = irradiance.data

    if seed is None:
        m = shutter / model.base_exposure
        signal = np.clip(m * h, 0.0, 1.0)
    else:
        rng = np.random.default_rng(seed)
        rate = shutter * model.quantum_efficiency * (
            h * model.photon_scale + model.dark_current)
        electrons = np.minimum(_hybrid_poisson(rng, rate), model.full_well)
        dn = electrons * model.conversion_gain
        dn = dn + model.read_noise * rng.standard_normal(dn.shape)
        dn = np.clip(np.round(dn), 0.0, model.adc_max)
        signal = dn / model.adc_max
    return ImagePlane(np.clip(np.power(signal, 1.0 / model.gamma), 0.0, 1.0),
                      gamma=model.gamma)


def simulate_exposure(
    base: ImagePlane,
    shutter: float,
    model: SensorModel | None = None,
    seed: int | None = None,
) -> ImagePlane:
    """Re-expose a gamma-encoded base image at a new shutter scale."""
    model = model or SensorModel()
    check_setting_value(SettingKind.SHUTTER, shutter)
    if seed is None and shutter == model.base_exposure:
        # m == 1 is an exact identity; short-circuit to keep it bit-exact.
        return ImagePlane(base.data, gamma=model.gamma)
    return forward_exposure(recover_irradiance(base, model), shutter, model, seed=seed)


def exposure_trend(
    shutters,
    base: ImagePlane | None = None,
    model: SensorModel | None = None,
) -> EffectSeries:
    """Expected mean-brightness series over a list of shutter values.

    Deterministic forward renders of ``base`` (mid-gray by default); the
    series is strictly increasing in shutter until global saturation.
    """
    shutters = list(shutters)
    if not shutters:
        raise ValueError("need at least one shutter value")
    model = model or SensorModel()
    if base is None:
        base = ImagePlane(np.full((8, 8, 3), 0.5), gamma=model.gamma)
    values = [float(luma(simulate_exposure(base, s, model)).mean()) for s in shutters]
    return EffectSeries(kind=SettingKind.SHUTTER, values=np.asarray(values))
