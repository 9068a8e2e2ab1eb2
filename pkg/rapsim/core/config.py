"""
Key-value configuration files, sweep grids and scenario export/import.

Config files hold ``key = value`` lines whose keys are ScenarioParams fields.
A comma-separated value turns that key into a sweep axis.
"""

import itertools
import json
import logging
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Tuple, Union

from pydantic import ValidationError

from rapsim.core.errors import ConfigurationError
from rapsim.models import Scenario, ScenarioParams

logger = logging.getLogger(__name__)

# Export format version for future compatibility
EXPORT_VERSION = "1.0"

# M + N values of the default sweep, split 60/40 between humans and robots
DEFAULT_AGENT_COUNTS = (10, 20, 30, 40)

ParamGrid = Dict[str, List[str]]


def parse_config_text(text: str) -> Tuple[ScenarioParams, ParamGrid]:
    """Parse config text into base parameters plus any multi-valued sweep axes."""
    fields = ScenarioParams.model_fields
    scalars: Dict[str, str] = {}
    grid: ParamGrid = {}

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in fields:
            raise ConfigurationError(f"line {lineno}: unknown key {key!r}")
        values = [v.strip() for v in value.split(",") if v.strip()]
        if not values:
            raise ConfigurationError(f"line {lineno}: no value for {key!r}")
        if len(values) > 1:
            grid[key] = values
        scalars[key] = values[0]

    return build_params(scalars), grid


def build_params(values: Dict[str, Any], base: Union[ScenarioParams, None] = None) -> ScenarioParams:
    merged = base.model_dump() if base is not None else {}
    merged.update(values)
    try:
        return ScenarioParams(**merged)
    except ValidationError as e:
        raise ConfigurationError(f"Invalid settings: {e}") from e


def load_config(path: Union[str, Path]) -> Tuple[ScenarioParams, ParamGrid]:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise ConfigurationError(f"Could not read config file {path}: {e}") from e
    params, grid = parse_config_text(text)
    logger.info("Loaded config %s (%d sweep axes)", path, len(grid))
    return params, grid


def _format_value(value: Any) -> str:
    if isinstance(value, float) and value.is_integer():
        return str(int(value))
    return str(value)


def expand_grid(base: ScenarioParams, grid: Dict[str, List[Any]]) -> List[Tuple[str, ScenarioParams]]:
    """Cartesian product of the sweep axes, in key order, as labelled parameter points."""
    if not grid:
        return [("default", base)]
    keys = list(grid)
    points = []
    for combo in itertools.product(*(grid[k] for k in keys)):
        label = ";".join(f"{k}={_format_value(v)}" for k, v in zip(keys, combo))
        points.append((label, build_params(dict(zip(keys, combo)), base)))
    return points


def default_grid(base: ScenarioParams) -> List[Tuple[str, ScenarioParams]]:
    """The built-in sweep over the total number of agents."""
    points = []
    for total in DEFAULT_AGENT_COUNTS:
        humans = round(total * 0.6)
        params = build_params({"num_humans": humans, "num_robots": total - humans}, base)
        points.append((f"agents={total}", params))
    return points


def export_scenario(scenario: Scenario) -> Dict[str, Any]:
    """Wrap a scenario in a versioned export envelope."""
    return {
        "version": EXPORT_VERSION,
        "exported_at": datetime.now(timezone.utc).isoformat(),
        "scenario": scenario.model_dump(mode="json"),
    }


def import_scenario(data: Dict[str, Any]) -> Scenario:
    """Validate an export envelope and rebuild the scenario."""
    if "version" not in data or "scenario" not in data:
        raise ConfigurationError("Invalid import file format. Please use a file exported by rapsim.")

    version = str(data.get("version", "0"))
    if not version.startswith("1."):
        raise ConfigurationError(f"Unsupported export version: {version}. This build supports version 1.x")

    try:
        return Scenario.model_validate(data["scenario"])
    except ValidationError as e:
        raise ConfigurationError(f"Invalid scenario: {e}") from e


def save_scenario(scenario: Scenario, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(export_scenario(scenario), indent=2))
    return path


def read_scenario(path: Union[str, Path]) -> Scenario:
    path = Path(path)
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigurationError(f"Could not read scenario file {path}: {e}") from e
    return import_scenario(data)
