"""
Model parameters, simulation configuration and the plain-text config format.

Usage:
    from dynamic_solow.params import load_config, dump_config

    p, cfg = load_config("gamma = 4000\\nc2 = 1e-4\\n")
    text = dump_config(p, cfg)   # load_config(text) == (p, cfg)
"""

from __future__ import annotations

import logging
import math
from typing import Any, Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from .exceptions import (
    InvalidSimConfig,
    MalformedValue,
    NegativeRate,
    NonPositiveTimescale,
    ParameterError,
    ShareOutOfRange,
    UnknownKey,
)
from .policies import (
    BASE_CASE,
    DEFAULT_DT,
    DEFAULT_LOG_CAPITAL,
    DEFAULT_RECORD_STRIDE,
    DEFAULT_SEED,
    DEFAULT_T_END,
)

logger = logging.getLogger(__name__)

RegimeMode = Literal["general", "forced_supply", "forced_demand", "reduced_deterministic"]

# Config-file key order; "lambda" maps to the ``lambda_`` attribute
PARAM_KEYS = (
    "rho",
    "epsilon",
    "tau_y",
    "lambda",
    "delta",
    "c1",
    "c2",
    "beta1",
    "beta2",
    "gamma",
    "tau_s",
    "tau_h",
    "tau_xi",
    "sigma_xi",
)
SIM_KEYS = ("t_end", "dt", "record_stride", "regime_mode", "seed", "burn_in", "noise_hold", "mirror_noise")
INITIAL_KEYS = ("y0", "ks0", "kd0", "s0", "h0", "xi0")

_TIMESCALES = ("tau_y", "tau_s", "tau_h", "tau_xi")
_SHARES = ("rho", "lambda")
_MODE_ALIASES = {"reduced": "reduced_deterministic"}


def _attr(key: str) -> str:
    return "lambda_" if key == "lambda" else key


class ModelParams(BaseModel):
    """Raw model constants; defaults are the base case."""

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    rho: float = BASE_CASE["rho"]
    epsilon: float = BASE_CASE["epsilon"]
    tau_y: float = BASE_CASE["tau_y"]
    lambda_: float = Field(default=BASE_CASE["lambda"], alias="lambda")
    delta: float = BASE_CASE["delta"]
    c1: float = BASE_CASE["c1"]
    c2: float = BASE_CASE["c2"]
    beta1: float = BASE_CASE["beta1"]
    beta2: float = BASE_CASE["beta2"]
    gamma: float = BASE_CASE["gamma"]
    tau_s: float = BASE_CASE["tau_s"]
    tau_h: float = BASE_CASE["tau_h"]
    tau_xi: float = BASE_CASE["tau_xi"]
    sigma_xi: float = BASE_CASE["sigma_xi"]

    def get(self, key: str) -> float:
        return getattr(self, _attr(key))

    def as_dict(self) -> dict[str, float]:
        """Parameters keyed by their config names."""
        return {k: self.get(k) for k in PARAM_KEYS}

    def as_array(self) -> np.ndarray:
        """Parameters packed in ``PARAM_KEYS`` order for the compiled kernels."""
        return np.array([self.get(k) for k in PARAM_KEYS], dtype=np.float64)


class ValidatedParams(ModelParams):
    """Model parameters that passed the hard invariants. Immutable and shareable."""

    @model_validator(mode="after")
    def _check_invariants(self) -> "ValidatedParams":
        for key in PARAM_KEYS:
            if not math.isfinite(self.get(key)):
                raise ParameterError(key, self.get(key), "must be finite")
        for key in _TIMESCALES:
            if self.get(key) <= 0:
                raise NonPositiveTimescale(key, self.get(key), "timescale must be > 0")
        for key in _SHARES:
            if not 0 < self.get(key) < 1:
                raise ShareOutOfRange(key, self.get(key), "share must lie in (0, 1)")
        if self.delta <= 0:
            raise NegativeRate("delta", self.delta, "depreciation must be > 0")
        if self.epsilon < 0:
            raise NegativeRate("epsilon", self.epsilon, "technology growth must be >= 0")
        if self.sigma_xi < 0:
            raise NegativeRate("sigma_xi", self.sigma_xi, "noise amplitude must be >= 0")
        return self

    @property
    def warnings(self) -> tuple[str, ...]:
        """Timescale-ordering violations. Informational; scans explore them on purpose."""
        out = []
        chain = [("tau_xi", self.tau_xi), ("tau_h", self.tau_h), ("tau_s", self.tau_s), ("tau_y", self.tau_y)]
        if self.epsilon > 0:
            chain.append(("1/epsilon", 1.0 / self.epsilon))
        for (a, va), (b, vb) in zip(chain, chain[1:]):
            if not va < vb:
                out.append(f"timescale ordering violated: {a}={va:g} is not < {b}={vb:g}")
        return tuple(out)

    def with_overrides(self, **overrides: float) -> "ValidatedParams":
        """Return a revalidated copy with some parameters replaced (config names accepted)."""
        data = self.model_dump()
        for key, value in overrides.items():
            name = _attr(key)
            if name not in data:
                raise UnknownKey(f"Unknown parameter '{key}'", key=key)
            data[name] = float(value)
        return ValidatedParams(**data)


class DerivedQuantities(BaseModel):
    model_config = ConfigDict(frozen=True)

    R: float
    omega_y: float
    tech_timescale: float


class InitialState(BaseModel):
    """
    Starting values of the general-case state.

    ``y0`` left as None means "start with z = 0", i.e. y0 = rho * min(ks0, kd0)
    for the parameters the run uses.
    """

    model_config = ConfigDict(frozen=True)

    y0: float | None = None
    ks0: float = DEFAULT_LOG_CAPITAL
    kd0: float = DEFAULT_LOG_CAPITAL
    s0: float = 0.0
    h0: float = 0.0
    xi0: float = 0.0

    @model_validator(mode="after")
    def _check_bounds(self) -> "InitialState":
        for key in INITIAL_KEYS:
            value = getattr(self, key)
            if value is not None and not math.isfinite(value):
                raise InvalidSimConfig(f"initial_{key}", value, "must be finite")
        if not -1 < self.s0 < 1:
            raise InvalidSimConfig("initial_s0", self.s0, "sentiment must lie in (-1, 1)")
        if not -1 < self.h0 < 1:
            raise InvalidSimConfig("initial_h0", self.h0, "information must lie in (-1, 1)")
        return self

    def resolved_y0(self, p: ModelParams) -> float:
        if self.y0 is not None:
            return self.y0
        return p.rho * min(self.ks0, self.kd0)

    @classmethod
    def balanced(cls, p: ModelParams, s0: float = 0.0, h0: float = 0.0) -> "InitialState":
        """
        Start on the supply-driven balanced path.

        Capital sits where lambda*e^{y-k} = delta + R with y = rho*k, so the
        log-supply/demand gap is closed from the first day.
        """
        R = p.epsilon / (1.0 - p.rho)
        k = math.log(p.lambda_ / (p.delta + R)) / (1.0 - p.rho)
        return cls(y0=p.rho * k, ks0=k, kd0=k, s0=s0, h0=h0, xi0=0.0)


class SimConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    t_end: float = DEFAULT_T_END
    dt: float = DEFAULT_DT
    record_stride: int = DEFAULT_RECORD_STRIDE
    regime_mode: RegimeMode = "general"
    initial: InitialState = Field(default_factory=InitialState)
    seed: int = DEFAULT_SEED
    burn_in: float = 0.0
    # Number of consecutive steps that share one OU value
    noise_hold: int = 1
    # Drive the run with the negated news path of the same seed
    mirror_noise: bool = False

    @model_validator(mode="after")
    def _check_consistency(self) -> "SimConfig":
        if not (math.isfinite(self.dt) and self.dt > 0):
            raise InvalidSimConfig("dt", self.dt, "step must be > 0")
        if not (math.isfinite(self.t_end) and self.t_end >= self.dt):
            raise InvalidSimConfig("t_end", self.t_end, "horizon must be >= dt")
        if self.record_stride < 1:
            raise InvalidSimConfig("record_stride", self.record_stride, "stride must be >= 1")
        if not (0 <= self.burn_in < self.t_end):
            raise InvalidSimConfig("burn_in", self.burn_in, "burn-in must lie in [0, t_end)")
        if not 0 <= self.seed < 2**64:
            raise InvalidSimConfig("seed", self.seed, "seed must be a 64-bit unsigned integer")
        if self.noise_hold < 1:
            raise InvalidSimConfig("noise_hold", self.noise_hold, "hold must be >= 1")
        return self

    @property
    def n_steps(self) -> int:
        return int(round(self.t_end / self.dt))


def validate(raw: ModelParams) -> ValidatedParams:
    """Check hard invariants; ordering problems are logged and kept on ``.warnings``."""
    p = raw if isinstance(raw, ValidatedParams) else ValidatedParams(**raw.model_dump())
    for msg in p.warnings:
        logger.warning(msg)
    return p


def derived_quantities(p: ValidatedParams) -> DerivedQuantities:
    R = p.epsilon / (1.0 - p.rho)
    tech = math.inf if p.epsilon == 0 else 1.0 / p.epsilon
    return DerivedQuantities(R=R, omega_y=1.0 / p.tau_y, tech_timescale=tech)


# ============================================================================
# Plain-text configuration
# ============================================================================


def _parse_lines(text: str) -> dict[str, tuple[str, int]]:
    entries: dict[str, tuple[str, int]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise MalformedValue(f"Expected 'key = value', got {line!r}", line=lineno)
        key, value = (part.strip() for part in line.split("=", 1))
        if not key or not value:
            raise MalformedValue(f"Expected 'key = value', got {line!r}", key=key or None, line=lineno)
        if key in entries:
            raise MalformedValue(f"Duplicate key '{key}'", key=key, line=lineno)
        entries[key] = (value, lineno)
    return entries


def _known(key: str) -> bool:
    if key in PARAM_KEYS or key in SIM_KEYS:
        return True
    return key.startswith("initial_") and key[len("initial_"):] in INITIAL_KEYS


def config_overrides(text: str) -> dict[str, str]:
    """Keys set by a config document, with their raw values, in document order."""
    entries = _parse_lines(text)
    for key, (_, lineno) in entries.items():
        if not _known(key):
            raise UnknownKey(f"Unknown key '{key}'", key=key, line=lineno)
    return {k: v for k, (v, _) in entries.items()}


def _as_float(key: str, value: str, lineno: int) -> float:
    try:
        out = float(value)
    except ValueError:
        raise MalformedValue(f"Value for '{key}' is not a number: {value!r}", key=key, line=lineno) from None
    if not math.isfinite(out):
        raise MalformedValue(f"Value for '{key}' is not finite: {value!r}", key=key, line=lineno)
    return out


def _as_int(key: str, value: str, lineno: int) -> int:
    try:
        return int(value)
    except ValueError:
        raise MalformedValue(f"Value for '{key}' is not an integer: {value!r}", key=key, line=lineno) from None


def _as_bool(key: str, value: str, lineno: int) -> bool:
    lowered = value.lower()
    if lowered in ("true", "1"):
        return True
    if lowered in ("false", "0"):
        return False
    raise MalformedValue(f"Value for '{key}' is not a boolean: {value!r}", key=key, line=lineno)


def load_config(text: str) -> tuple[ValidatedParams, SimConfig]:
    """
    Parse a ``key = value`` document; unspecified keys take base-case defaults.

    Raises:
        UnknownKey: for keys outside the documented set
        MalformedValue: for unparsable lines or values
        ParameterError: for any validation failure
    """
    entries = _parse_lines(text)
    params: dict[str, Any] = {}
    sim: dict[str, Any] = {}
    initial: dict[str, Any] = {}

    for key, (value, lineno) in entries.items():
        if key in PARAM_KEYS:
            params[_attr(key)] = _as_float(key, value, lineno)
        elif key in ("record_stride", "seed", "noise_hold"):
            sim[key] = _as_int(key, value, lineno)
        elif key == "regime_mode":
            mode = _MODE_ALIASES.get(value, value)
            if mode not in RegimeMode.__args__:
                raise MalformedValue(f"Unknown regime_mode {value!r}", key=key, line=lineno)
            sim[key] = mode
        elif key == "mirror_noise":
            sim[key] = _as_bool(key, value, lineno)
        elif key in SIM_KEYS:
            sim[key] = _as_float(key, value, lineno)
        elif _known(key):
            initial[key[len("initial_"):]] = _as_float(key, value, lineno)
        else:
            raise UnknownKey(f"Unknown key '{key}'", key=key, line=lineno)

    p = validate(ModelParams(**params))
    cfg = SimConfig(initial=InitialState(**initial), **sim)
    logger.debug(f"Loaded config with {len(entries)} override(s)")
    return p, cfg


def _fmt(value: float) -> str:
    return f"{value:.17g}"


def dump_config(p: ModelParams, cfg: SimConfig) -> str:
    """Serialize a full parameter set and simulation config; floats keep 17 significant digits."""
    lines = ["# model parameters"]
    lines += [f"{k} = {_fmt(v)}" for k, v in p.as_dict().items()]
    lines.append("# simulation")
    lines += [
        f"t_end = {_fmt(cfg.t_end)}",
        f"dt = {_fmt(cfg.dt)}",
        f"record_stride = {cfg.record_stride}",
        f"regime_mode = {cfg.regime_mode}",
        f"seed = {cfg.seed}",
        f"burn_in = {_fmt(cfg.burn_in)}",
        f"noise_hold = {cfg.noise_hold}",
        f"mirror_noise = {str(cfg.mirror_noise).lower()}",
    ]
    lines.append("# initial state")
    for key in INITIAL_KEYS:
        value = getattr(cfg.initial, key)
        if value is not None:
            lines.append(f"initial_{key} = {_fmt(value)}")
    return "\n".join(lines) + "\n"
