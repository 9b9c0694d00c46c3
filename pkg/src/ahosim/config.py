"""Run configuration: a flat key = value grammar with # comments,
numbers, strings and bracketed lists. Unknown keys are hard errors.

All physical inputs are ratios to gamma (gamma = 1 internally); times are
in units of 1/gamma.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, fields

from .errors import ConfigError
from .model import ModelParams

COMMANDS = ("classical-poincare", "lyapunov", "trajectory", "ensemble",
            "wigner", "scaling-check", "validate")

_INT_RE = re.compile(r"[+-]?\d+$")


@dataclass
class RunConfig:
    command: str = ""
    # physical parameters (ratios to gamma)
    delta: float = 0.0
    chi0: float = 0.0
    chi1: float = 0.0
    Omega: float = 0.0
    f0: float = 0.0
    f1: float = 0.0
    small_delta: float = 0.0
    n_th: float = 0.0
    chi_mod_kind: str = "constant"
    f_mod_kind: str = "constant"
    scale_lambda: float = 1.0
    # numerics
    dt: float = 1e-3
    t_final: float = 10.0
    dim: int = 32
    sample_every: int = 100
    n_traj: int = 100
    master_seed: int = 12345
    workers: int = 1
    snapshot_times: tuple = ()
    steps_per_period: int = 400
    horizon_periods: int = 2000
    skip: int = 200
    n_points: int = 1000
    poincare_t0: float = 0.0
    poincare_skip: int = 200
    renorm: bool = True
    leak_threshold: float = 1e-4
    grid_points: int = 256
    grid_half_width: float = 0.0  # 0 = automatic from dim
    levels: tuple = ()
    initial_state: str = "vacuum"
    density_file: str = ""
    separation_seed: float = 1e-8
    output_dir: str = "run"

    def model_params(self) -> ModelParams:
        return ModelParams(gamma=1.0, delta=self.delta, chi0=self.chi0,
                           chi1=self.chi1, Omega=self.Omega,
                           f0=complex(self.f0), f1=complex(self.f1),
                           small_delta=self.small_delta, n_th=self.n_th,
                           chi_mod_kind=self.chi_mod_kind,
                           f_mod_kind=self.f_mod_kind)


_FIELDS = {f.name: f for f in fields(RunConfig)}
_POSITIVE = ("dt", "t_final", "scale_lambda", "separation_seed", "leak_threshold")
_AT_LEAST_ONE = ("dim", "sample_every", "n_traj", "workers", "steps_per_period",
                 "horizon_periods", "n_points", "grid_points")
_NON_NEGATIVE = ("n_th", "skip", "poincare_skip", "poincare_t0", "grid_half_width")


def _parse_scalar(tok: str, key: str, lineno: int):
    tok = tok.strip()
    if tok.startswith('"') and tok.endswith('"') and len(tok) >= 2:
        return tok[1:-1]
    low = tok.lower()
    if low in ("true", "false"):
        return low == "true"
    if _INT_RE.match(tok):
        return int(tok)
    try:
        return float(tok)
    except ValueError:
        return tok  # bare string


def _coerce(key, value, lineno):
    f = _FIELDS[key]
    want = f.type
    if want in ("float", float):
        if isinstance(value, bool) or isinstance(value, (str, tuple)):
            raise ConfigError(f"line {lineno}: key '{key}' expects a number, got {value!r}")
        return float(value)
    if want in ("int", int):
        if not isinstance(value, int) or isinstance(value, bool):
            raise ConfigError(f"line {lineno}: key '{key}' expects an integer, got {value!r}")
        return value
    if want in ("bool", bool):
        if not isinstance(value, bool):
            raise ConfigError(f"line {lineno}: key '{key}' expects true/false, got {value!r}")
        return value
    if want in ("str", str):
        if not isinstance(value, str):
            raise ConfigError(f"line {lineno}: key '{key}' expects a string, got {value!r}")
        return value
    if want in ("tuple", tuple):
        if not isinstance(value, tuple):
            raise ConfigError(f"line {lineno}: key '{key}' expects a [list], got {value!r}")
        out = []
        for item in value:
            if isinstance(item, bool) or isinstance(item, str):
                raise ConfigError(f"line {lineno}: key '{key}' expects numeric list entries")
            out.append(float(item))
        return tuple(out)
    raise ConfigError(f"unhandled type for key '{key}'")


def _strip_comment(line: str) -> str:
    out = []
    in_str = False
    for ch in line:
        if ch == '"':
            in_str = not in_str
        if ch == "#" and not in_str:
            break
        out.append(ch)
    return "".join(out)


def parse_config(text: str) -> RunConfig:
    """Parse and fully validate a run configuration."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw).strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, rhs = line.partition("=")
        key = key.strip()
        rhs = rhs.strip()
        if key not in _FIELDS:
            raise ConfigError(f"line {lineno}: unknown key '{key}'")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key '{key}'")
        if not rhs:
            raise ConfigError(f"line {lineno}: key '{key}' has no value")
        if rhs.startswith("["):
            if not rhs.endswith("]"):
                raise ConfigError(f"line {lineno}: unterminated list for key '{key}'")
            inner = rhs[1:-1].strip()
            items = tuple(_parse_scalar(tok, key, lineno)
                          for tok in inner.split(",") if tok.strip()) if inner else ()
            value = items
        else:
            value = _parse_scalar(rhs, key, lineno)
        values[key] = _coerce(key, value, lineno)

    if "command" not in values:
        raise ConfigError("config must set 'command'")
    cfg = RunConfig(**values)
    validate_config(cfg)
    return cfg


def validate_config(cfg: RunConfig):
    if cfg.command not in COMMANDS:
        raise ConfigError(f"unknown command '{cfg.command}' "
                          f"(choose from {', '.join(COMMANDS)})")
    for key in _POSITIVE:
        if not getattr(cfg, key) > 0.0:
            raise ConfigError(f"key '{key}' must be positive")
    for key in _AT_LEAST_ONE:
        if getattr(cfg, key) < 1:
            raise ConfigError(f"key '{key}' must be >= 1")
    for key in _NON_NEGATIVE:
        if getattr(cfg, key) < 0:
            raise ConfigError(f"key '{key}' must be >= 0")
    if cfg.grid_points < 64:
        raise ConfigError("grid_points must be >= 64")
    if not cfg.output_dir:
        raise ConfigError("output_dir must be non-empty")
    try:
        cfg.model_params()
    except Exception as exc:
        raise ConfigError(str(exc)) from exc
    st = cfg.initial_state
    if not (st == "vacuum" or st.startswith("fock:") or st.startswith("coherent:")):
        raise ConfigError(f"initial_state '{st}' must be vacuum, fock:N or coherent:RE,IM")


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, tuple):
        return "[" + ", ".join(_fmt(v) for v in value) + "]"
    if isinstance(value, str):
        return f'"{value}"'
    return repr(value)


def serialize_config(cfg: RunConfig) -> str:
    """Canonical text form; parse_config(serialize_config(c)) == c."""
    lines = [f"{f.name} = {_fmt(getattr(cfg, f.name))}" for f in fields(RunConfig)]
    return "\n".join(lines) + "\n"
