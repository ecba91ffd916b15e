"""Bundled defaults: the reference model catalog and experiment knobs.

The catalog carries the profiled averages of three on-device classifiers
(resnet18, resnet34, shufflenetv2) plus the server-side resnext101, which
is the lone remote profile.  Local inference energy defaults to inference
time times a device power rating, converted from milliseconds; the remote
profile charges the node nothing beyond the transfer.
"""
from __future__ import annotations

from .core import ChannelModel, ConstraintPair, Locality, ModelProfile

DEFAULT_DEVICE_POWER_W = 7.5
DEFAULT_RESPONSE_TIME_MS = 5.0

DEFAULT_TIME_BUDGET_MS = 350.0
DEFAULT_ENERGY_BUDGET = 100.0
DEFAULT_JOB_COUNT = 3923
DEFAULT_JOBS_PER_SLOT = 10
DEFAULT_SLOTS = 100

DEFAULT_MEDIAN_MB = 0.115
DEFAULT_SIGMA_LOG = 0.6

# (accuracy %, inference time ms, locality), ids assigned in order.
_PROFILE_ROWS = (
    ("resnet18", 72.01986328, 28.07417981, Locality.LOCAL),
    ("resnet34", 76.79044298, 42.45949233, Locality.LOCAL),
    ("shufflenetv2", 66.15977267, 19.44331129, Locality.LOCAL),
    ("resnext101", 87.05788745, 5.1610317, Locality.REMOTE),
)

MODEL_NAMES = tuple(row[0] for row in _PROFILE_ROWS)


def make_default_catalog(device_power_w: float = DEFAULT_DEVICE_POWER_W) -> tuple[ModelProfile, ...]:
    profiles = []
    for idx, (_, accuracy, infer_ms, locality) in enumerate(_PROFILE_ROWS, start=1):
        if locality is Locality.LOCAL:
            energy = infer_ms * device_power_w / 1000.0
        else:
            energy = 0.0
        profiles.append(
            ModelProfile(
                id=idx,
                avg_accuracy=accuracy,
                avg_inference_time_ms=infer_ms,
                inference_energy=energy,
                locality=locality,
            )
        )
    return tuple(profiles)


def make_default_channel(response_time_ms: float = DEFAULT_RESPONSE_TIME_MS) -> ChannelModel:
    return ChannelModel(
        bandwidth_mbps=100.0,
        energy_per_megabyte=1.8,
        response_time_ms=response_time_ms,
    )


def make_default_constraints() -> ConstraintPair:
    return ConstraintPair(
        time_budget_ms=DEFAULT_TIME_BUDGET_MS,
        energy_budget=DEFAULT_ENERGY_BUDGET,
    )
