"""File formats: model catalogs, channels, instances and size lists.

All JSON object schemas are strict: required fields must be present and
unknown fields are rejected, so a typo in a config fails loudly instead of
silently falling back to a default.
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

from .core import (
    Assignment,
    ChannelModel,
    ConstraintPair,
    ContractViolation,
    JobSpec,
    Locality,
    ModelProfile,
    SlotInstance,
    validate_catalog,
)


class InputError(ValueError):
    """Malformed input file or config: message carries the location."""


def _as_number(value: Any, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise InputError(f"{where}: expected a number, got {value!r}")
    return float(value)


def _as_int(value: Any, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise InputError(f"{where}: expected an integer, got {value!r}")
    return value


def _check_fields(obj: Mapping[str, Any], required: Sequence[str], where: str) -> None:
    if not isinstance(obj, Mapping):
        raise InputError(f"{where}: expected an object, got {type(obj).__name__}")
    missing = [f for f in required if f not in obj]
    if missing:
        raise InputError(f"{where}: missing field(s) {', '.join(missing)}")
    unknown = [f for f in obj if f not in required]
    if unknown:
        raise InputError(f"{where}: unknown field(s) {', '.join(sorted(unknown))}")


_CATALOG_FIELDS = ("id", "avg_accuracy", "avg_inference_time_ms", "inference_energy", "locality")
_CHANNEL_FIELDS = ("bandwidth_mbps", "energy_per_megabyte", "response_time_ms")


def parse_catalog(data: Any, where: str = "catalog") -> tuple[ModelProfile, ...]:
    if not isinstance(data, list):
        raise InputError(f"{where}: expected a JSON array of model objects")
    profiles = []
    for pos, entry in enumerate(data):
        ctx = f"{where}[{pos}]"
        _check_fields(entry, _CATALOG_FIELDS, ctx)
        loc_raw = entry["locality"]
        try:
            locality = Locality(loc_raw)
        except ValueError:
            raise InputError(f"{ctx}: locality must be 'local' or 'remote', got {loc_raw!r}") from None
        try:
            profiles.append(
                ModelProfile(
                    id=_as_int(entry["id"], f"{ctx}.id"),
                    avg_accuracy=_as_number(entry["avg_accuracy"], f"{ctx}.avg_accuracy"),
                    avg_inference_time_ms=_as_number(
                        entry["avg_inference_time_ms"], f"{ctx}.avg_inference_time_ms"
                    ),
                    inference_energy=_as_number(
                        entry["inference_energy"], f"{ctx}.inference_energy"
                    ),
                    locality=locality,
                )
            )
        except ContractViolation as exc:
            raise InputError(f"{ctx}: {exc}") from None
    try:
        validate_catalog(profiles)
    except ContractViolation as exc:
        raise InputError(f"{where}: {exc}") from None
    return tuple(profiles)


def parse_channel(data: Any, where: str = "channel") -> ChannelModel:
    _check_fields(data, _CHANNEL_FIELDS, where)
    try:
        return ChannelModel(
            bandwidth_mbps=_as_number(data["bandwidth_mbps"], f"{where}.bandwidth_mbps"),
            energy_per_megabyte=_as_number(
                data["energy_per_megabyte"], f"{where}.energy_per_megabyte"
            ),
            response_time_ms=_as_number(data["response_time_ms"], f"{where}.response_time_ms"),
        )
    except ContractViolation as exc:
        raise InputError(f"{where}: {exc}") from None


def catalog_to_json(catalog: Iterable[ModelProfile]) -> list[dict]:
    return [
        {
            "id": p.id,
            "avg_accuracy": p.avg_accuracy,
            "avg_inference_time_ms": p.avg_inference_time_ms,
            "inference_energy": p.inference_energy,
            "locality": p.locality.value,
        }
        for p in catalog
    ]


def channel_to_json(channel: ChannelModel) -> dict:
    return {
        "bandwidth_mbps": channel.bandwidth_mbps,
        "energy_per_megabyte": channel.energy_per_megabyte,
        "response_time_ms": channel.response_time_ms,
    }


def _load_json(path: str | Path, where: str) -> Any:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise InputError(f"{where}: file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{where}: invalid JSON in {path}: {exc}") from None


def load_catalog(path: str | Path) -> tuple[ModelProfile, ...]:
    return parse_catalog(_load_json(path, "catalog"), where=f"catalog {path}")


def load_channel(path: str | Path) -> ChannelModel:
    return parse_channel(_load_json(path, "channel"), where=f"channel {path}")


def load_sizes(path: str | Path) -> list[float]:
    """Read one positive decimal megabyte value per line."""
    sizes = []
    try:
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                text = line.strip()
                if not text:
                    continue
                try:
                    value = float(text)
                except ValueError:
                    raise InputError(f"{path}: line {lineno}: not a number: {text!r}") from None
                if not value > 0.0:
                    raise InputError(f"{path}: line {lineno}: size must be positive, got {value}")
                sizes.append(value)
    except FileNotFoundError:
        raise InputError(f"sizes file not found: {path}") from None
    if not sizes:
        raise InputError(f"{path}: no sizes found")
    return sizes


_INSTANCE_FIELDS = ("jobs", "catalog", "channel", "constraints")
_JOB_FIELDS = ("id", "size_mb")
_CONSTRAINT_FIELDS = ("time_budget_ms", "energy_budget")


def parse_constraints(data: Any, where: str = "constraints") -> ConstraintPair:
    _check_fields(data, _CONSTRAINT_FIELDS, where)
    try:
        return ConstraintPair(
            time_budget_ms=_as_number(data["time_budget_ms"], f"{where}.time_budget_ms"),
            energy_budget=_as_number(data["energy_budget"], f"{where}.energy_budget"),
        )
    except ContractViolation as exc:
        raise InputError(f"{where}: {exc}") from None


def parse_instance(data: Any, where: str = "instance") -> SlotInstance:
    _check_fields(data, _INSTANCE_FIELDS, where)
    if not isinstance(data["jobs"], list) or not data["jobs"]:
        raise InputError(f"{where}.jobs: expected a non-empty array")
    jobs = []
    for pos, entry in enumerate(data["jobs"]):
        ctx = f"{where}.jobs[{pos}]"
        _check_fields(entry, _JOB_FIELDS, ctx)
        try:
            jobs.append(
                JobSpec(id=_as_int(entry["id"], f"{ctx}.id"), size_mb=_as_number(entry["size_mb"], f"{ctx}.size_mb"))
            )
        except ContractViolation as exc:
            raise InputError(f"{ctx}: {exc}") from None
    catalog = parse_catalog(data["catalog"], where=f"{where}.catalog")
    channel = parse_channel(data["channel"], where=f"{where}.channel")
    constraints = parse_constraints(data["constraints"], where=f"{where}.constraints")
    try:
        return SlotInstance(jobs, catalog, channel, constraints)
    except ContractViolation as exc:
        raise InputError(f"{where}: {exc}") from None


def load_instance(path: str | Path) -> SlotInstance:
    return parse_instance(_load_json(path, "instance"), where=f"instance {path}")


def instance_to_json(instance: SlotInstance) -> dict:
    return {
        "jobs": [{"id": j.id, "size_mb": j.size_mb} for j in instance.jobs],
        "catalog": catalog_to_json(instance.catalog),
        "channel": channel_to_json(instance.channel),
        "constraints": {
            "time_budget_ms": instance.constraints.time_budget_ms,
            "energy_budget": instance.constraints.energy_budget,
        },
    }
