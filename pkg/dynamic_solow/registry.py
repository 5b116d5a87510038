from __future__ import annotations

from typing import Any, Dict, List

from .exceptions import UnknownScenario

# Reproduction scenarios
_SCENARIOS: Dict[str, Any] = {}


def register_scenario(scenario: Any) -> None:
    name = getattr(scenario, "name", None)
    if not name:
        raise ValueError("Scenario must define a class/static attribute 'name'")
    _SCENARIOS[name] = scenario


def get_scenario(name: str):
    if name not in _SCENARIOS:
        raise UnknownScenario(name, scenario_names())
    return _SCENARIOS[name]


def scenario_names() -> List[str]:
    return list(_SCENARIOS)
