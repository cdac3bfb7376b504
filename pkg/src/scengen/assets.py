"""Static simulator asset catalog: weather presets and actor blueprints.

Replaces live asset discovery with a versioned JSON file; a default
catalog mirroring common simulator blueprints ships with the package
and can be overridden per deployment.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .errors import FormatError

CATEGORIES = (
    "normal_vehicle",
    "pedestrian",
    "bicycle",
    "motorcycle",
    "van",
    "truck",
    "bus",
)

ASSET_FORMAT = "assets/1"


@dataclass(frozen=True)
class WeatherPreset:
    preset_id: str
    display_name: str
    implies_time: str | None = None


@dataclass(frozen=True)
class ActorModel:
    model_id: str
    category: str
    display_name: str
    length: float
    width: float


@dataclass(frozen=True)
class AssetCatalog:
    weather_presets: tuple[WeatherPreset, ...]
    models: tuple[ActorModel, ...]

    def preset(self, preset_id: str) -> WeatherPreset | None:
        for p in self.weather_presets:
            if p.preset_id == preset_id:
                return p
        return None

    def model(self, model_id: str) -> ActorModel | None:
        for m in self.models:
            if m.model_id == model_id:
                return m
        return None

    def models_of(self, category: str) -> tuple[ActorModel, ...]:
        return tuple(m for m in self.models if m.category == category)

    def preset_ids(self) -> list[str]:
        return [p.preset_id for p in self.weather_presets]


def _parse_catalog(payload: dict) -> AssetCatalog:
    if payload.get("format") != ASSET_FORMAT:
        raise FormatError(
            "format_version", f"expected asset catalog format {ASSET_FORMAT!r}"
        )
    presets = tuple(
        WeatherPreset(
            preset_id=p["id"], display_name=p.get("name", p["id"]),
            implies_time=p.get("implies_time"),
        )
        for p in payload.get("weather_presets", [])
    )
    models = tuple(
        ActorModel(
            model_id=m["id"], category=m["category"],
            display_name=m.get("name", m["id"]),
            length=float(m.get("length", 4.5)), width=float(m.get("width", 2.0)),
        )
        for m in payload.get("models", [])
    )
    ids = [p.preset_id for p in presets] + [m.model_id for m in models]
    if len(set(ids)) != len(ids):
        raise FormatError("duplicate_asset", "asset catalog ids must be unique")
    for m in models:
        if m.category not in CATEGORIES:
            raise FormatError("bad_category", f"model {m.model_id}: unknown category {m.category}")
    return AssetCatalog(weather_presets=presets, models=models)


def load_asset_catalog(path: str | Path | None = None) -> AssetCatalog:
    """Load a catalog file, or the bundled default when no path is given."""
    if path is None:
        text = resources.files("scengen").joinpath("data/default_assets.json").read_text()
    else:
        text = Path(path).read_text()
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError("bad_document", f"asset catalog is not valid JSON: {exc}") from None
    return _parse_catalog(payload)
