from __future__ import annotations

import os
from dataclasses import dataclass, field
from importlib import metadata
from pathlib import Path

from dotenv import load_dotenv

from .policies import DEFAULT_CHUNK_STEPS

ENV_PREFIX = "DSOLOW_"


def load_env(path: str | os.PathLike[str] | None = None) -> bool:
    # A local .env only fills variables the shell has not already set
    env_file = Path(path) if path is not None else Path.cwd() / ".env"
    if env_file.is_file():
        return load_dotenv(env_file, override=False)
    return False


def _get(key: str, default):
    val = os.getenv(f"{ENV_PREFIX}{key.upper()}")
    return default if val is None or val == "" else val


def code_version() -> str:
    try:
        return metadata.version("dynamic-solow")
    except metadata.PackageNotFoundError:
        return "0.1.0"


@dataclass
class RuntimeConfig:
    # Worker threads for sweeps and multi-seed scenarios
    parallelism: int = field(default_factory=lambda: int(_get("parallelism", os.cpu_count() or 1)))
    # Steps of pre-drawn normals per integration chunk
    chunk_steps: int = field(default_factory=lambda: int(_get("chunk_steps", DEFAULT_CHUNK_STEPS)))
    log_level: str = field(default_factory=lambda: str(_get("log_level", "INFO")).upper())
    output_dir: str = field(default_factory=lambda: str(_get("output_dir", "runs")))

    def __post_init__(self) -> None:
        self.parallelism = max(1, int(self.parallelism))
        self.chunk_steps = max(1, int(self.chunk_steps))


load_env()
