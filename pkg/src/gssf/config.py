"""Flat, typed ``key = value`` scenario configs.

Grammar (one entry per line)::

    # comment                  full-line comment
    key = value   # comment    trailing comments are stripped
                               blank lines are ignored

Keys are ``[A-Za-z_][A-Za-z0-9_]*``; a key may appear once. Values are parsed against
the scenario schema as int, float, bool (``true``/``false``) or str. Units are part of
the key name (``length_mm``, ``window_ps``). Every error names the offending key.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

REQUIRED = object()
_KEY = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")

GRID_KEYS = ("M", "window", "window_ps")
RUN_KEYS = ("scenario", "steps", "checkpoints", "model", "mode", "scheme", "backend", "out",
            "convergence_check", "samples", "fock_D", "supermodes", "phi_ceo")


class ConfigError(ValueError):
    def __init__(self, key, message):
        super().__init__(f"{key}: {message}" if key else message)
        self.key = key


_COMMON = {
    "scenario": (str, REQUIRED),
    "out": (str, None),
    "checkpoints": (int, 4),
    "scheme": (str, "rk4ip"),
    "backend": (str, "numba"),
    "convergence_check": (bool, False),
}

_CHI2 = {
    "wavelength_nm": (float, REQUIRED),
    "shg_efficiency_per_W_cm2": (float, REQUIRED),
    "length_mm": (float, REQUIRED),
    "phase_mismatch_over_L": (float, REQUIRED),
    "mismatch_sign": (int, 1),
    "gvm_fs_mm": (float, REQUIRED),
    "gvd_fh_fs2_mm": (float, REQUIRED),
    "gvd_sh_fs2_mm": (float, REQUIRED),
    "tod_fh_fs3_mm": (float, REQUIRED),
    "tod_sh_fs3_mm": (float, REQUIRED),
    "pulse_energy_pJ": (float, REQUIRED),
    "pulse_fwhm_fs": (float, REQUIRED),
    "loss": (bool, True),
    "fh_loss_db_m": (float, 30.0),
    "fh_loss_high_db_m": (float, 2000.0),
    "loss_cutoff_nm": (float, 2900.0),
    "loss_ramp_nm": (float, 50.0),
    "sh_loss_db_m": (float, 0.0),
    "M": (int, REQUIRED),
    "window_ps": (float, REQUIRED),
    "steps": (int, REQUIRED),
    "supermodes": (bool, True),
    "phi_ceo": (float, 1.0471975511965976),
}

SCHEMAS = {
    "kerr": {
        "alpha0": (float, REQUIRED),
        "g": (float, 1.0),
        "kappa_over_g": (float, 0.0),
        "t_final": (float, REQUIRED),
        "steps": (int, REQUIRED),
        "samples": (int, 100),
        "fock_D": (int, 0),
    },
    "soliton": {
        "n_bar": (float, REQUIRED),
        "M": (int, REQUIRED),
        "window": (float, 20.0),
        "t_final": (float, REQUIRED),
        "steps": (int, REQUIRED),
        "model": (str, "gssf"),
        "scheme": (str, "strang-rk4"),
        "g": (float, -1.0),
        "gvd": (float, 1.0),
        "supermodes": (bool, True),
    },
    "opg": {**_CHI2, "mode": (str, "opg-reduced")},
    "scg": {**_CHI2, "mode": (str, "full")},
}


@dataclass
class ScenarioConfig:
    scenario: str
    grid: dict = field(default_factory=dict)
    physics: dict = field(default_factory=dict)
    run: dict = field(default_factory=dict)
    source: str | None = None

    def get(self, key, default=None):
        for block in (self.run, self.grid, self.physics):
            if key in block:
                return block[key]
        return default

    def flat(self) -> dict:
        return {"scenario": self.scenario, **self.grid, **self.physics, **self.run}

    def with_(self, **kw) -> ScenarioConfig:
        d = self.flat()
        d.update(kw)
        return from_dict(d, self.source)


def _coerce(key, typ, raw):
    if not isinstance(raw, str):
        if typ is float and isinstance(raw, (int, float)) and not isinstance(raw, bool):
            return float(raw)
        if isinstance(raw, typ):
            return raw
        raise ConfigError(key, f"expected {typ.__name__}, got {raw!r}")
    s = raw.strip()
    try:
        if typ is bool:
            if s.lower() in ("true", "yes", "1"):
                return True
            if s.lower() in ("false", "no", "0"):
                return False
            raise ValueError
        if typ is int:
            return int(s)
        if typ is float:
            return float(s)
    except ValueError:
        raise ConfigError(key, f"expected {typ.__name__}, got {s!r}") from None
    return s


def parse_text(text: str) -> dict:
    """Raw ``key -> string`` mapping; syntax errors cite the line number."""
    out = {}
    for n, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(None, f"line {n}: expected 'key = value', got {line!r}")
        key, val = (s.strip() for s in line.split("=", 1))
        if not _KEY.match(key):
            raise ConfigError(key, f"line {n}: invalid key name")
        if key in out:
            raise ConfigError(key, f"line {n}: duplicate key")
        if not val:
            raise ConfigError(key, f"line {n}: empty value")
        out[key] = val
    return out


def from_dict(raw: dict, source=None) -> ScenarioConfig:
    name = raw.get("scenario")
    if name is None:
        raise ConfigError("scenario", "missing required key")
    name = str(name).strip()
    if name not in SCHEMAS:
        raise ConfigError("scenario", f"unknown scenario {name!r}; expected one of {sorted(SCHEMAS)}")
    schema = {**_COMMON, **SCHEMAS[name]}
    unknown = sorted(set(raw) - set(schema))
    if unknown:
        raise ConfigError(unknown[0], f"unknown key for scenario {name!r}")
    vals = {}
    for key, (typ, default) in schema.items():
        if raw.get(key) is not None:
            vals[key] = _coerce(key, typ, raw[key])
        elif default is REQUIRED:
            raise ConfigError(key, "missing required key")
        else:
            vals[key] = default
    _validate(name, vals)
    cfg = ScenarioConfig(name, source=None if source is None else str(source))
    for key, v in vals.items():
        if key == "scenario":
            continue
        block = cfg.grid if key in GRID_KEYS else cfg.run if key in RUN_KEYS else cfg.physics
        block[key] = v
    return cfg


def _validate(name, v):
    positive = [k for k in ("steps", "M", "window", "window_ps", "n_bar", "length_mm",
                            "wavelength_nm", "t_final", "pulse_fwhm_fs") if k in v]
    for k in positive:
        if not v[k] > 0:
            raise ConfigError(k, f"must be > 0, got {v[k]}")
    for k in ("pulse_energy_pJ", "shg_efficiency_per_W_cm2", "alpha0", "kappa_over_g",
              "samples", "fock_D", "checkpoints"):
        if k in v and v[k] < 0:
            raise ConfigError(k, f"must be >= 0, got {v[k]}")
    if "M" in v and v["M"] % 2:
        raise ConfigError("M", "must be even")
    if v.get("mismatch_sign", 1) not in (1, -1):
        raise ConfigError("mismatch_sign", "must be +1 or -1")
    if name == "soliton" and v["model"] not in ("gssf", "linearized"):
        raise ConfigError("model", "must be 'gssf' or 'linearized'")
    if name in ("opg", "scg") and v["mode"] not in ("full", "opg-reduced"):
        raise ConfigError("mode", "must be 'full' or 'opg-reduced'")
    if v["scheme"] not in ("rk4ip", "strang-rk4"):
        raise ConfigError("scheme", "must be 'rk4ip' or 'strang-rk4'")
    if v["backend"] not in ("numba", "numpy"):
        raise ConfigError("backend", "must be 'numba' or 'numpy'")
    if name == "kerr" and v["samples"] and v["steps"] % v["samples"]:
        raise ConfigError("samples", "must divide steps")


def load(path) -> ScenarioConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(None, f"cannot read config {path}: {exc}") from None
    return from_dict(parse_text(text), path)


def dumps(cfg: ScenarioConfig) -> str:
    lines = [f"# scenario config ({cfg.scenario})"]
    for k, v in cfg.flat().items():
        if v is None:
            continue
        lines.append(f"{k} = {str(v).lower() if isinstance(v, bool) else v}")
    return "\n".join(lines) + "\n"
