"""
Experiment configuration loading.

Configs are JSON files validated into an ExperimentSpec. Presets are
the same JSON documents shipped as package data and loaded by name.
"""

import json
import logging
from importlib import resources
from pathlib import Path
from typing import Optional, Union

from pydantic import ValidationError

from src.models.errors import ConfigNotFoundError, ConfigParseError, ConfigValidationError
from src.models.params import ExperimentSpec, format_validation_error

logger = logging.getLogger(__name__)

PRESET_PACKAGE = "src.reporting.presets"
PRESETS = ("fig1", "fig2", "fig3")


def parse_spec(data: dict) -> ExperimentSpec:
    try:
        return ExperimentSpec.model_validate(data)
    except ValidationError as exc:
        raise ConfigValidationError(format_validation_error(exc)) from exc


def _parse_json(text: str, origin: str) -> dict:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigParseError(f"{origin}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise ConfigParseError(f"{origin}: top level must be a JSON object")
    return data


def load_config(path: Union[str, Path]) -> ExperimentSpec:
    """Read and validate an experiment config file."""
    path = Path(path)
    if not path.is_file():
        raise ConfigNotFoundError(f"Config file not found: {path}")
    text = path.read_text(encoding="utf-8")
    spec = parse_spec(_parse_json(text, str(path)))
    logger.debug("Loaded config %s (%s)", path, spec.name)
    return spec


def load_preset(name: str) -> ExperimentSpec:
    """Load one of the shipped presets by name."""
    if name not in PRESETS:
        raise ConfigNotFoundError(f"Unknown preset {name!r}; choose one of {', '.join(PRESETS)}")
    resource = resources.files(PRESET_PACKAGE).joinpath(f"{name}.json")
    return parse_spec(_parse_json(resource.read_text(encoding="utf-8"), f"preset {name}"))


def apply_overrides(
    spec: ExperimentSpec,
    output_dir: Optional[str] = None,
    seed: Optional[int] = None,
    horizon: Optional[int] = None,
    replications: Optional[int] = None,
) -> ExperimentSpec:
    """Apply CLI overrides and revalidate."""
    data = spec.model_dump()
    if output_dir is not None:
        data["output_dir"] = output_dir
    for key, value in (("seed", seed), ("horizon", horizon), ("replications", replications)):
        if value is not None:
            data["simulation"][key] = value
    return parse_spec(data)
