from __future__ import annotations

from pathlib import Path
from typing import ClassVar, Protocol

from pydantic import BaseModel, ConfigDict, Field

from ..config import RuntimeConfig


class CheckResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    name: str
    passed: bool
    measured: str
    expected: str

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.name}: measured {self.measured}, expected {self.expected}"


class ScenarioResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    scenario: str
    checks: list[CheckResult]
    outputs: list[str] = Field(default_factory=list)
    wall_clock_seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


def check(name: str, passed: bool, measured: object, expected: str) -> CheckResult:
    text = f"{measured:.6g}" if isinstance(measured, float) else str(measured)
    return CheckResult(name=name, passed=bool(passed), measured=text, expected=expected)


class Scenario(Protocol):
    name: ClassVar[str]
    description: ClassVar[str]

    def run(self, out_dir: Path, runtime: RuntimeConfig) -> ScenarioResult: ...
