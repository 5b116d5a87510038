"""
On-disk formats: trajectory CSV, run manifest, scan CSV, histogram CSV and
key: value reports. Every file is written to a temporary name in the target
directory and renamed into place.
"""

from __future__ import annotations

import io
import logging
import os
import tempfile
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from .analysis import DurationHistogram
from .config import code_version
from .equilibria import BifurcationRecord
from .exceptions import MalformedValue
from .integrator import FULL_COLUMNS, REDUCED_COLUMNS, Trajectory
from .params import InitialState, SimConfig, ValidatedParams, dump_config

logger = logging.getLogger(__name__)

TRAJECTORY_FILE = "trajectory.csv"
MANIFEST_FILE = "manifest.json"
CONFIG_FILE = "config.txt"
SCAN_HEADER = "gamma,c2,n_equilibria,kinds,stabilities,cycle_period_days,cycle_amplitude,error"
HISTOGRAM_HEADER = "bin_start_years,bin_end_years,count"


def fmt_float(value: float) -> str:
    return f"{value:.17g}"


def write_atomic(path: str | os.PathLike[str], content: str | bytes) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    data = content.encode("utf-8") if isinstance(content, str) else content
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as f:
            f.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


class RunManifest(BaseModel):
    """Everything needed to reproduce a run bit for bit."""

    model_config = ConfigDict(frozen=True)

    params: dict[str, float]
    seed: int
    mode: str
    dt: float
    record_stride: int
    burn_in: float
    t_end: float
    noise_hold: int = 1
    mirror_noise: bool = False
    xi_on: bool = True
    initial: dict[str, float | None]
    overrides: dict[str, str] = Field(default_factory=dict)
    code_version: str = Field(default_factory=code_version)
    wall_clock_seconds: float = 0.0
    outputs: list[str] = Field(default_factory=list)

    @classmethod
    def for_run(
        cls,
        p: ValidatedParams,
        cfg: SimConfig,
        outputs: Sequence[str] = (),
        wall_clock_seconds: float = 0.0,
        overrides: Mapping[str, str] | None = None,
        xi_on: bool = True,
    ) -> "RunManifest":
        return cls(
            params=p.as_dict(),
            seed=cfg.seed,
            mode=cfg.regime_mode,
            dt=cfg.dt,
            record_stride=cfg.record_stride,
            burn_in=cfg.burn_in,
            t_end=cfg.t_end,
            noise_hold=cfg.noise_hold,
            mirror_noise=cfg.mirror_noise,
            xi_on=xi_on,
            initial=cfg.initial.model_dump(),
            overrides=dict(overrides or {}),
            wall_clock_seconds=wall_clock_seconds,
            outputs=list(outputs),
        )

    def to_params(self) -> ValidatedParams:
        return ValidatedParams(**self.params)

    def to_config(self) -> SimConfig:
        return SimConfig(
            t_end=self.t_end,
            dt=self.dt,
            record_stride=self.record_stride,
            regime_mode=self.mode,
            initial=InitialState(**self.initial),
            seed=self.seed,
            burn_in=self.burn_in,
            noise_hold=self.noise_hold,
            mirror_noise=self.mirror_noise,
        )


def trajectory_csv(traj: Trajectory) -> str:
    names = traj.column_names
    data = np.column_stack([traj[name] for name in names])
    fmts = ["%.17g"] * len(names)
    header = ",".join(names)
    if not traj.reduced:
        data = np.column_stack([data, traj.regime])
        fmts.append("%d")
        header += ",regime"
    buf = io.StringIO()
    np.savetxt(buf, data, fmt=fmts, delimiter=",", header=header, comments="")
    return buf.getvalue()


def write_run(
    out_dir: str | os.PathLike[str],
    traj: Trajectory,
    wall_clock_seconds: float = 0.0,
    overrides: Mapping[str, str] | None = None,
) -> RunManifest:
    """Write trajectory CSV, the resolved config document and the manifest."""
    out_dir = Path(out_dir)
    write_atomic(out_dir / TRAJECTORY_FILE, trajectory_csv(traj))
    write_atomic(out_dir / CONFIG_FILE, dump_config(traj.params, traj.config))
    manifest = RunManifest.for_run(
        traj.params,
        traj.config,
        outputs=[TRAJECTORY_FILE, CONFIG_FILE, MANIFEST_FILE],
        wall_clock_seconds=wall_clock_seconds,
        overrides=overrides,
        xi_on=traj.xi_on,
    )
    write_manifest(out_dir, manifest)
    logger.info(f"wrote {len(traj)} samples to {out_dir / TRAJECTORY_FILE}")
    return manifest


def write_manifest(out_dir: str | os.PathLike[str], manifest: RunManifest) -> Path:
    return write_atomic(Path(out_dir) / MANIFEST_FILE, manifest.model_dump_json(indent=2) + "\n")


def read_manifest(path: str | os.PathLike[str]) -> RunManifest:
    return RunManifest.model_validate_json(Path(path).read_text(encoding="utf-8"))


def load_trajectory_csv(path: str | os.PathLike[str]) -> Trajectory:
    """
    Rebuild a Trajectory from its CSV and the manifest in the same directory.

    Raises:
        FileNotFoundError: if either file is missing
    """
    path = Path(path)
    manifest = read_manifest(path.parent / MANIFEST_FILE)
    with path.open("r", encoding="utf-8") as f:
        header = f.readline().strip().split(",")
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)

    reduced = header == list(REDUCED_COLUMNS)
    if not reduced and header != list(FULL_COLUMNS) + ["regime"]:
        raise MalformedValue(f"{path}: unrecognised trajectory header {header}", line=1)
    names = REDUCED_COLUMNS if reduced else FULL_COLUMNS
    columns = {name: np.ascontiguousarray(data[:, i]) for i, name in enumerate(names)}
    regime = None if reduced else data[:, len(names)].astype(np.int8)
    return Trajectory(
        columns=columns,
        params=manifest.to_params(),
        config=manifest.to_config(),
        reduced=reduced,
        xi_on=manifest.xi_on,
        regime=regime,
    )


def scan_rows(records: Iterable[BifurcationRecord]) -> list[str]:
    rows = []
    for r in records:
        cycle = r.limit_cycle
        rows.append(
            ",".join(
                [
                    fmt_float(r.gamma),
                    fmt_float(r.c2),
                    str(len(r.equilibria)),
                    ";".join(pt.kind for pt in r.equilibria),
                    ";".join(pt.stability for pt in r.equilibria),
                    fmt_float(cycle.period) if cycle else "",
                    fmt_float(cycle.amplitude) if cycle else "",
                    (r.error or "").replace(",", ";").replace("\n", " "),
                ]
            )
        )
    return rows


def write_scan_csv(path: str | os.PathLike[str], records: Iterable[BifurcationRecord]) -> Path:
    return write_atomic(path, "\n".join([SCAN_HEADER, *scan_rows(records)]) + "\n")


def histogram_rows(hist: DurationHistogram) -> list[str]:
    edges = hist.edges_years
    return [f"{fmt_float(a)},{fmt_float(b)},{c}" for a, b, c in zip(edges[:-1], edges[1:], hist.counts)]


def write_histogram_csv(path: str | os.PathLike[str], hist: DurationHistogram) -> Path:
    return write_atomic(path, "\n".join([HISTOGRAM_HEADER, *histogram_rows(hist)]) + "\n")


def _report_value(value: Any) -> str:
    if isinstance(value, bool) or value is None:
        return str(value)
    if isinstance(value, float):
        return fmt_float(value)
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_report_value(v) for v in value) + "]"
    return str(value)


def format_report(mapping: Mapping[str, Any]) -> str:
    return "".join(f"{k}: {_report_value(v)}\n" for k, v in mapping.items())


def write_report(path: str | os.PathLike[str], mapping: Mapping[str, Any]) -> Path:
    return write_atomic(path, format_report(mapping))
