"""System parameters, unit conversions, and scenario presets.

Everything downstream works in linear units (watts, linear gains) and
kilometers; dB/dBm appear only at the config boundary.  The LOS and NLOS
presets carry the published default parameter set and differ only in the
small-cell path-loss exponent.
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass, field

import numpy as np


class ConfigError(ValueError):
    """Invalid or inconsistent parameter configuration."""


class UnknownScenario(ConfigError):
    """Scenario name is not one of LOS / NLOS."""


def dbm_to_watts(x: float) -> float:
    """Power in dBm to watts."""
    return 10.0 ** ((x - 30.0) / 10.0)


def db_to_linear(x: float) -> float:
    """Gain in dB to linear scale."""
    return 10.0 ** (x / 10.0)


def linear_to_db(x: float) -> float:
    """Linear gain to dB."""
    return 10.0 * math.log10(x)


@dataclass(frozen=True)
class ShadowingSpec:
    """Log-normal shadowing of one link class: chi = 10^(N(mu, sigma^2)/10).

    When disabled the multiplicative factor is exactly 1.  The default
    sigma of 4 dB is the documented option used by the displacement-theorem
    cross-check; shadowing is off unless explicitly enabled.
    """

    mu_db: float = 0.0
    sigma_db: float = 4.0
    enabled: bool = False

    def __post_init__(self):
        if self.sigma_db < 0:
            raise ConfigError("shadowing sigma_db must be >= 0")


@dataclass(frozen=True)
class SystemParams:
    """All physical-layer constants in linear units and kilometers.

    Densities: lambda_l is the line-process intensity on its (angle, offset)
    parameter strip (the convention under which the planar density of
    points living on the lines is pi * lambda_l * lambda_on_line);
    lambda_m_raw is planar (1/km^2); lambda_s_raw and lambda_v_raw are
    per-line linear densities (1/km).
    """

    p_m: float = dbm_to_watts(46.0)
    p_s: float = dbm_to_watts(20.0)
    p_v: float = dbm_to_watts(20.0)
    g_m: float = 1.0
    g_s0: float = 1.0
    g_s1: float = db_to_linear(-20.0)
    g_v0: float = 1.0
    g_v1: float = 1.0
    b_m: float = 1.0
    b_s: float = 1.0
    alpha_m: float = 4.0
    alpha_s: float = 4.0
    lambda_l: float = 10.0
    lambda_m_raw: float = 1.0
    lambda_s_raw: float = 2.0
    lambda_v_raw: float = 1.0
    m_m: int = 1
    m_s0: int = 1
    m_s1: int = 1
    m_v0: int = 1
    m_v1: int = 1
    shadow_m: ShadowingSpec = field(default_factory=ShadowingSpec)
    shadow_s0: ShadowingSpec = field(default_factory=ShadowingSpec)
    shadow_s1: ShadowingSpec = field(default_factory=ShadowingSpec)
    radius: float = 5.0

    # Nakagami shapes above 4 would need high-order numerical derivatives
    # of the interference Laplace transform; rejected here, not downstream.
    MAX_SHAPE = 4

    def __post_init__(self):
        for name in ("p_m", "p_s", "p_v", "g_m", "g_s0", "g_s1", "g_v0",
                     "g_v1", "b_m", "b_s"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be strictly positive")
        for name in ("lambda_l", "lambda_m_raw", "lambda_s_raw",
                     "lambda_v_raw"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be >= 0")
        if not self.alpha_m > 2:
            raise ConfigError("alpha_m must exceed 2")
        # alpha_s = 2 is the LOS preset; interference integrals stay finite
        # because they are truncated at the simulation disk boundary.
        if not self.alpha_s >= 2:
            raise ConfigError("alpha_s must be >= 2")
        if not self.radius > 0:
            raise ConfigError("radius must be positive")
        for name in ("m_m", "m_s0", "m_s1", "m_v0", "m_v1"):
            m = getattr(self, name)
            if not (isinstance(m, (int, np.integer)) and 1 <= m):
                raise ConfigError(f"{name} must be an integer >= 1")
            if m > self.MAX_SHAPE:
                raise ConfigError(
                    f"{name} = {m} exceeds the supported maximum "
                    f"{self.MAX_SHAPE}")

    def replace(self, **changes) -> "SystemParams":
        return dataclasses.replace(self, **changes)


@dataclass(frozen=True)
class DerivedRatios:
    """Biased-power ratios driving the association inequalities."""

    a_ms: float
    b_ms: float
    a_sm: float


def derive_ratios(p: SystemParams) -> DerivedRatios:
    """Compute A_{M,S} = P_M G_M B_M / (P_S G_{S,0} B_S) and B_{M,S} = G_{V,1}/G_{V,0}.

    The whole analysis rests on a_ms > b_ms (macro tier much stronger in
    DL than the uplink gain imbalance); configurations violating it are
    rejected because they would make the excluded association case
    (DL small cell, UL macro) nonempty.
    """
    a_ms = (p.p_m * p.g_m * p.b_m) / (p.p_s * p.g_s0 * p.b_s)
    b_ms = p.g_v1 / p.g_v0
    if not a_ms > b_ms:
        raise ConfigError(
            f"a_ms = {a_ms:.6g} must exceed b_ms = {b_ms:.6g}; "
            "the joint association analysis does not apply otherwise")
    return DerivedRatios(a_ms=a_ms, b_ms=b_ms, a_sm=1.0 / a_ms)


SCENARIOS = ("LOS", "NLOS")


def scenario_preset(name: str) -> SystemParams:
    """Default parameter set; LOS has alpha_s = 2, NLOS has alpha_s = 4."""
    key = str(name).upper()
    if key not in SCENARIOS:
        raise UnknownScenario(
            f"unknown scenario {name!r}; expected one of {SCENARIOS}")
    return SystemParams(alpha_s=2.0 if key == "LOS" else 4.0)


# Config file keys mirror SystemParams field names; powers are dBm, gains
# and biases dB at this boundary only.
_DB_POWER_KEYS = {"p_m", "p_s", "p_v"}
_DB_GAIN_KEYS = {"g_m", "g_s0", "g_s1", "g_v0", "g_v1", "b_m", "b_s"}
_PLAIN_KEYS = {"alpha_m", "alpha_s", "lambda_l", "lambda_m_raw",
               "lambda_s_raw", "lambda_v_raw", "radius"}
_INT_KEYS = {"m_m", "m_s0", "m_s1", "m_v0", "m_v1"}
_SHADOW_KEYS = {"shadow_m", "shadow_s0", "shadow_s1"}

CONFIG_KEYS = sorted(_DB_POWER_KEYS | _DB_GAIN_KEYS | _PLAIN_KEYS
                     | _INT_KEYS | _SHADOW_KEYS | {"scenario"})


def params_from_config(config: dict) -> SystemParams:
    """Build SystemParams from a config mapping (dB/dBm at the boundary).

    All keys optional; the base is the scenario preset (default NLOS).
    Unknown keys are rejected with the list of valid ones.
    """
    cfg = dict(config)
    scenario = cfg.pop("scenario", "NLOS")
    base = scenario_preset(scenario)
    changes = {}
    for key, value in cfg.items():
        if key in _DB_POWER_KEYS:
            changes[key] = dbm_to_watts(float(value))
        elif key in _DB_GAIN_KEYS:
            changes[key] = db_to_linear(float(value))
        elif key in _PLAIN_KEYS:
            changes[key] = float(value)
        elif key in _INT_KEYS:
            changes[key] = int(value)
        elif key in _SHADOW_KEYS:
            if not isinstance(value, dict):
                raise ConfigError(f"{key} must be a mapping with keys "
                                  "mu_db / sigma_db / enabled")
            unknown = set(value) - {"mu_db", "sigma_db", "enabled"}
            if unknown:
                raise ConfigError(f"{key}: unknown shadowing keys {sorted(unknown)}")
            changes[key] = ShadowingSpec(
                mu_db=float(value.get("mu_db", 0.0)),
                sigma_db=float(value.get("sigma_db", 4.0)),
                enabled=bool(value.get("enabled", False)))
        else:
            raise ConfigError(
                f"unknown config key {key!r}; valid keys: {CONFIG_KEYS}")
    return base.replace(**changes)


def load_config(path: str) -> SystemParams:
    """Read a JSON config file and build validated parameters."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"config file {path} must hold a JSON object")
    return params_from_config(raw)
