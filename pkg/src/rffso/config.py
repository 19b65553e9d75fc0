"""Scenario configuration files.

INI-style ``key = value`` text with ``[section]`` headers.  Every key is
optional; missing keys take the defaults below.  SNRs are given in dB and
converted to linear here, nowhere else.

Sections and keys::

    [system]   n_s, rs, link_km, wavelength_nm, cn2
    [rf]       m_r, n_r, snr_sr_db, rho_sr, m_e, n_e, snr_se_db, rho_se
    [fso]      alpha, beta, omega, b0, rho0, phase_diff, xi, a0, path_loss,
               rho_fso, detection, snr_rd_db
    [numerics] k_truncation, mc_samples, seed, stream_count, quad_epsabs,
               otas_selection, workers
    [sweep]    variable, start_db, stop_db, step_db, schemes

``link_km``, ``wavelength_nm`` and ``cn2`` are echoed into outputs only:
turbulence strength and path loss enter the model through ``alpha``,
``beta`` and ``path_loss``.
"""

from __future__ import annotations

import configparser
import math
import re
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, RfFsoError
from .fso import FsoLink, MalagaParams, PointingParams
from .rf import RfLink
from .secrecy import ATAS, OTAS, TASE, TASR, SystemModel

__all__ = ["ScenarioConfig", "load_config", "parse_config", "db_to_linear", "SWEEP_VARIABLES"]

ALL_SCHEMES = (OTAS, TASR, TASE, ATAS)
SWEEP_VARIABLES = ("snr_rd_db", "snr_sr_db", "snr_se_db", "rs")


def db_to_linear(value_db: float) -> float:
    return 10.0 ** (value_db / 10.0)


def _positive(v):
    return v > 0


def _open_unit(v):
    return 0 < v < 1


def _nonneg(v):
    return v >= 0


def _pos_int(v):
    return v >= 1


# section -> key -> (type, default, check, description of the check)
_SCHEMA = {
    "system": {
        "n_s": (int, 5, _pos_int, ">= 1"),
        "rs": (float, 0.01, _positive, "> 0"),
        "link_km": (float, 1.0, _positive, "> 0"),
        "wavelength_nm": (float, 785.0, _positive, "> 0"),
        "cn2": (float, 1.2e-13, _positive, "> 0"),
    },
    "rf": {
        "m_r": (int, 2, _pos_int, ">= 1"),
        "n_r": (int, 2, _pos_int, ">= 1"),
        "snr_sr_db": (float, -4.0, math.isfinite, "finite"),
        "rho_sr": (float, 0.85, _open_unit, "in (0, 1)"),
        "m_e": (int, 2, _pos_int, ">= 1"),
        "n_e": (int, 2, _pos_int, ">= 1"),
        "snr_se_db": (float, -10.0, math.isfinite, "finite"),
        "rho_se": (float, 0.85, _open_unit, "in (0, 1)"),
    },
    "fso": {
        "alpha": (float, 2.296, _positive, "> 0"),
        "beta": (int, 2, _pos_int, ">= 1"),
        "omega": (float, 1.3265, _nonneg, ">= 0"),
        "b0": (float, 0.1079, _positive, "> 0"),
        "rho0": (float, 0.596, lambda v: 0 <= v < 1, "in [0, 1)"),
        "phase_diff": (float, math.pi / 2, math.isfinite, "finite"),
        "xi": (float, 6.7, _positive, "> 0"),
        "a0": (float, 1.0, lambda v: 0 < v <= 1, "in (0, 1]"),
        "path_loss": (float, 0.9, _positive, "> 0"),
        "rho_fso": (float, 0.5, _open_unit, "in (0, 1)"),
        "detection": (int, 2, lambda v: v in (1, 2), "1 or 2"),
        "snr_rd_db": (float, 10.0, math.isfinite, "finite"),
    },
    "numerics": {
        "k_truncation": (int, 80, _pos_int, ">= 1"),
        "mc_samples": (int, 10 ** 6, lambda v: v >= 1000, ">= 1000"),
        "seed": (int, 0, lambda v: 0 <= v < 2 ** 64, "in [0, 2**64)"),
        "stream_count": (int, 8, _pos_int, ">= 1"),
        "quad_epsabs": (float, 1e-9, _positive, "> 0"),
        "otas_selection": (str, "selection", lambda v: v in ("selection", "transmission"),
                           "'selection' or 'transmission'"),
        "workers": (int, 1, _pos_int, ">= 1"),
    },
    "sweep": {
        "variable": (str, "snr_rd_db", lambda v: v in SWEEP_VARIABLES,
                     "one of " + ", ".join(SWEEP_VARIABLES)),
        "start_db": (float, -10.0, math.isfinite, "finite"),
        "stop_db": (float, 20.0, math.isfinite, "finite"),
        "step_db": (float, 5.0, _positive, "> 0"),
        "schemes": (str, "otas, tasr, tase, atas", None, ""),
    },
}


@dataclass(frozen=True)
class ScenarioConfig:
    model: SystemModel
    values: dict = field(default_factory=dict)
    schemes: tuple = ALL_SCHEMES
    sweep_variable: str = "snr_rd_db"
    sweep_start: float = -10.0
    sweep_stop: float = 20.0
    sweep_step: float = 5.0

    @property
    def k_truncation(self) -> int:
        return self.values["k_truncation"]

    @property
    def mc_samples(self) -> int:
        return self.values["mc_samples"]

    @property
    def seed(self) -> int:
        return self.values["seed"]

    @property
    def stream_count(self) -> int:
        return self.values["stream_count"]

    @property
    def quad_epsabs(self) -> float:
        return self.values["quad_epsabs"]

    @property
    def otas_selection(self) -> str:
        return self.values["otas_selection"]

    @property
    def workers(self) -> int:
        return self.values["workers"]

    def sweep_points(self) -> np.ndarray:
        n = int(math.floor((self.sweep_stop - self.sweep_start) / self.sweep_step + 1e-9)) + 1
        return self.sweep_start + self.sweep_step * np.arange(n)

    def with_values(self, **overrides) -> "ScenarioConfig":
        """Re-validate with some keys replaced (keys as in the file)."""
        vals = dict(self.values)
        vals.update(overrides)
        return _build(vals, {})

    def model_at(self, sweep_value: float) -> SystemModel:
        """Model with the sweep variable set to ``sweep_value``."""
        return _model_from(dict(self.values, **{self.sweep_variable: sweep_value}), {})


def _flat_defaults() -> dict:
    return {k: spec[1] for sec in _SCHEMA.values() for k, spec in sec.items()}


def _key_lines(text: str) -> dict:
    lines, section = {}, None
    for no, raw in enumerate(text.splitlines(), start=1):
        s = raw.strip()
        m = re.match(r"\[(.+)\]$", s)
        if m:
            section = m.group(1).strip().lower()
        elif s and not s.startswith(("#", ";")) and ("=" in s or ":" in s):
            key = re.split(r"[=:]", s, maxsplit=1)[0].strip().lower()
            lines[(section, key)] = no
    return lines


def _convert(key, typ, raw, line):
    try:
        if typ is int:
            f = float(raw)
            if f != int(f):
                raise ValueError
            return int(f)
        if typ is float:
            return float(raw)
        return raw.strip().strip("'\"")
    except ValueError:
        raise ConfigError(f"{key}: cannot read {raw!r} as {typ.__name__}", key, line) from None


def _model_from(v: dict, lines: dict) -> SystemModel:
    def where(k):
        return lines.get(k)

    try:
        rf_sr = RfLink(v["m_r"], v["n_r"], db_to_linear(v["snr_sr_db"]), v["rho_sr"])
        rf_se = RfLink(v["m_e"], v["n_e"], db_to_linear(v["snr_se_db"]), v["rho_se"])
    except RfFsoError as exc:
        raise ConfigError(f"[rf] {exc}", "rf", None) from exc
    try:
        mal = MalagaParams(v["alpha"], v["beta"], v["omega"], v["b0"], v["rho0"], v["phase_diff"])
    except RfFsoError as exc:
        raise ConfigError(f"[fso] {exc}", "omega", where("omega")) from exc
    fso = FsoLink(mal, PointingParams(v["xi"], v["a0"]), v["path_loss"], v["rho_fso"],
                  v["detection"], db_to_linear(v["snr_rd_db"]))
    return SystemModel(v["n_s"], rf_sr, rf_se, fso, v["rs"], v["k_truncation"])


def _build(values: dict, lines: dict) -> ScenarioConfig:
    for sec, keys in _SCHEMA.items():
        for key, (typ, _, check, desc) in keys.items():
            val = values[key]
            if check is not None and not check(val):
                raise ConfigError(f"{key} = {val!r} must be {desc}", key, lines.get(key))
    schemes = []
    for tok in re.split(r"[,\s]+", values["schemes"].strip()):
        if not tok:
            continue
        t = tok.upper()
        if t == "ALL":
            schemes.extend(ALL_SCHEMES)
        elif t in ALL_SCHEMES:
            schemes.append(t)
        else:
            raise ConfigError(f"schemes: unknown scheme {tok!r}", "schemes", lines.get("schemes"))
    if not schemes:
        raise ConfigError("schemes: empty scheme list", "schemes", lines.get("schemes"))
    if values["stop_db"] < values["start_db"]:
        raise ConfigError("sweep range is empty (stop_db < start_db)", "stop_db", lines.get("stop_db"))
    model = _model_from(values, lines)
    return ScenarioConfig(
        model=model,
        values=dict(values),
        schemes=tuple(dict.fromkeys(schemes)),
        sweep_variable=values["variable"],
        sweep_start=values["start_db"],
        sweep_stop=values["stop_db"],
        sweep_step=values["step_db"],
    )


def parse_config(text: str) -> ScenarioConfig:
    """Parse configuration text; raises ConfigError with field and line."""
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        line = getattr(exc, "lineno", None)
        if line is None and getattr(exc, "errors", None):
            line = exc.errors[0][0]
        raise ConfigError(f"parse error: {exc}", None, line) from None
    key_lines = _key_lines(text)
    values = _flat_defaults()
    lines = {}
    for section in cp.sections():
        sec = section.lower()
        if sec not in _SCHEMA:
            raise ConfigError(f"unknown section [{section}]", section,
                              _section_line(text, section))
        for key, raw in cp.items(section):
            line = key_lines.get((sec, key))
            if key not in _SCHEMA[sec]:
                raise ConfigError(f"unknown key {key!r} in [{section}]", key, line)
            typ = _SCHEMA[sec][key][0]
            values[key] = _convert(key, typ, raw, line)
            lines[key] = line
    return _build(values, lines)


def _section_line(text, section):
    for no, raw in enumerate(text.splitlines(), start=1):
        if raw.strip().lower() == f"[{section.lower()}]":
            return no
    return None


def load_config(path) -> ScenarioConfig:
    """Read and validate a scenario file."""
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config(text)


def default_config() -> ScenarioConfig:
    return parse_config("")
