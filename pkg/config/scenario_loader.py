from pathlib import Path
from typing import Any, Dict

import yaml
from pydantic import ValidationError

from models.errors import ValidationFailure
from models.scenario import Scenario


def _describe_yaml_error(path: str, e: yaml.YAMLError) -> str:
    mark = getattr(e, "problem_mark", None)
    problem = getattr(e, "problem", None) or str(e)
    if mark is not None:
        return f"{path}:{mark.line + 1}:{mark.column + 1}: {problem}"
    return f"{path}: {problem}"


def _describe_validation_error(path: str, e: ValidationError) -> str:
    lines = []
    for error in e.errors():
        where = ".".join(str(part) for part in error["loc"]) or "<root>"
        lines.append(f"{path}: {where}: {error['msg']}")
    return "\n".join(lines)


def read_scenario_data(path: str) -> Dict[str, Any]:
    try:
        with open(path, 'r', encoding='utf-8') as f:
            data = yaml.safe_load(f)
    except OSError as e:
        raise ValidationFailure(f"cannot read scenario {path}: {e}")
    except yaml.YAMLError as e:
        raise ValidationFailure(_describe_yaml_error(path, e))
    if not isinstance(data, dict):
        raise ValidationFailure(f"{path}: scenario must be a mapping with a 'version' key")
    return data


def load_scenario(path: str) -> Scenario:
    """Parse and validate a YAML scenario file"""
    data = read_scenario_data(path)
    if "version" not in data:
        raise ValidationFailure(f"{path}: missing 'version' header")
    try:
        scenario = Scenario.model_validate(data)
    except ValidationError as e:
        raise ValidationFailure(_describe_validation_error(path, e))
    if not scenario.name or scenario.name == "scenario":
        scenario = scenario.model_copy(update={"name": Path(path).stem})
    return scenario
