"""Scenario file loading and dumping (YAML)."""

import logging
from pathlib import Path
from typing import Any, Optional, Sequence, Union

import yaml
from pydantic import ValidationError

from app.core.config import get_settings
from app.core.errors import ScenarioParseError, ScenarioValidationError
from app.schemas.scenario import ScenarioFile

logger = logging.getLogger(__name__)

SCENARIO_SUFFIXES = (".yaml", ".yml")


def resolve_scenario_path(name_or_path: Union[str, Path]) -> Path:
    """
    Find a scenario file by path, or by bundled name such as ``city_uniform``.

    Raises:
        ScenarioParseError: Neither a file nor a bundled scenario
    """
    path = Path(name_or_path)
    if path.is_file():
        return path
    scenario_dir = Path(get_settings().SCENARIO_DIR)
    for suffix in ("",) + SCENARIO_SUFFIXES:
        candidate = scenario_dir / f"{name_or_path}{suffix}"
        if candidate.is_file():
            return candidate
    raise ScenarioParseError(str(name_or_path), "no such scenario file or bundled scenario")


def bundled_scenarios() -> list:
    scenario_dir = Path(get_settings().SCENARIO_DIR)
    return sorted(path for path in scenario_dir.iterdir() if path.suffix in SCENARIO_SUFFIXES)


def load_scenario(name_or_path: Union[str, Path]) -> ScenarioFile:
    """
    Load and validate a scenario file.

    Args:
        name_or_path: File path or bundled scenario name

    Returns:
        Validated scenario with every default filled in

    Raises:
        ScenarioParseError: Missing file or malformed YAML
        ScenarioValidationError: Content violates the scenario schema
    """
    path = resolve_scenario_path(name_or_path)
    return parse_scenario(path.read_text(encoding="utf-8"), source=str(path))


def parse_scenario(text: str, source: str = "<string>") -> ScenarioFile:
    try:
        data = yaml.safe_load(text)
        root = yaml.compose(text, Loader=yaml.SafeLoader)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        line = mark.line + 1 if mark is not None else None
        raise ScenarioParseError(source, getattr(exc, "problem", None) or str(exc), line) from exc
    if not isinstance(data, dict):
        raise ScenarioParseError(source, "top level must be a mapping", 1)

    management = data.get("management")
    if not isinstance(management, dict) or "horizon" not in management:
        logger.info("%s: no management.horizon given, using Unlimited (no horizon)", source)

    try:
        return ScenarioFile.model_validate(data)
    except ValidationError as exc:
        error = exc.errors()[0]
        loc = tuple(error["loc"])
        field = ".".join(str(part) for part in loc) or "<root>"
        raise ScenarioValidationError(source, field, error["msg"], line_of(root, loc)) from exc


def line_of(root: Optional[yaml.Node], loc: Sequence[Any]) -> Optional[int]:
    """1-based line of the deepest YAML node reachable along ``loc``."""
    if root is None:
        return None
    node = root
    for part in loc:
        child = None
        if isinstance(node, yaml.MappingNode):
            for key, value in node.value:
                if key.value == str(part):
                    child = value
                    break
        elif isinstance(node, yaml.SequenceNode) and isinstance(part, int) and part < len(node.value):
            child = node.value[part]
        if child is None:
            break
        node = child
    return node.start_mark.line + 1


def dump_scenario(scenario: ScenarioFile) -> str:
    """Resolved scenario as YAML; loading it back yields an equal scenario."""
    data = scenario.model_dump(mode="json", by_alias=True)
    return yaml.safe_dump(data, sort_keys=False, default_flow_style=False)
