"""Flat ``key = value`` run configuration.

Lines are ``key = value``; ``#`` starts a comment; blank lines are ignored.
Every problem in a file is collected before raising, so a single run of the
parser reports all of them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields
from pathlib import Path

from .params import EquationParams, SolveSchedule
from .spectral import Grid2D

__all__ = ["RunConfig", "ConfigError", "parse_config", "parse_config_text", "serialize_config",
           "INITS", "EXPERIMENTS"]

INITS = ("gaussian", "dx_gaussian", "random_smooth", "file")
EXPERIMENTS = ("evolve", "kernel_check", "decay", "commutators", "jbound", "scatter")
KINDS = ("kato", "kato_ponce", "leibniz", "calderon", "product_A", "product_dx")


class ConfigError(ValueError):
    def __init__(self, errors: list[str]):
        super().__init__("; ".join(errors))
        self.errors = list(errors)


def _auto_float(v: str):
    return None if v.strip().lower() == "auto" else float(v)


def _bool(v: str) -> bool:
    low = v.strip().lower()
    if low in ("true", "yes", "1", "on"):
        return True
    if low in ("false", "no", "0", "off"):
        return False
    raise ValueError(f"expected a boolean, got {v!r}")


def _int(v: str) -> int:
    f = float(v)
    if not f.is_integer():
        raise ValueError(f"expected an integer, got {v!r}")
    return int(f)


# key -> (parser, default); _REQUIRED marks keys without a default
_REQUIRED = object()
_SCHEMA: dict[str, tuple] = {
    "nx": (_int, _REQUIRED),
    "ny": (_int, _REQUIRED),
    "Lx": (float, _REQUIRED),
    "Ly": (float, _REQUIRED),
    "p": (_int, 1),
    "alpha": (float, 1.0),
    "gamma": (float, 0.0),
    "s": (float, 3.0),
    "dt": (_auto_float, None),
    "t_end": (float, 1.0),
    "snapshot_stride": (_int, 1),
    "cfl_guard": (float, 0.5),
    "nonlinear": (_bool, True),
    "init": (str, "gaussian"),
    "amplitude": (float, 1.0),
    "width": (float, 1.0),
    "center_x": (float, 0.0),
    "center_y": (float, 0.0),
    "seed": (_int, 0),
    "decay_rate": (float, 6.0),
    "init_file": (str, ""),
    "output_dir": (str, "out"),
    "experiment": (str, "evolve"),
    "theta": (float, 1.0),
    "kernel_t": (float, 1.0),
    "decay_t_min": (float, 5.0),
    "decay_t_max": (float, 40.0),
    "decay_samples": (_int, 36),
    "kind": (str, "kato"),
    "seeds": (_int, 50),
    "jbound_p": (_int, 2),
    "t_max": (float, 10.0),
    "r": (_auto_float, None),
    "write_snapshots": (_bool, True),
}


_PLACEHOLDERS = {"nx": 8, "ny": 8, "Lx": 1.0, "Ly": 1.0}


@dataclass
class RunConfig:
    """Validated run configuration; see README for the meaning of each key."""

    nx: int
    ny: int
    Lx: float
    Ly: float
    p: int = 1
    alpha: float = 1.0
    gamma: float = 0.0
    s: float = 3.0
    dt: float | None = None
    t_end: float = 1.0
    snapshot_stride: int = 1
    cfl_guard: float = 0.5
    nonlinear: bool = True
    init: str = "gaussian"
    amplitude: float = 1.0
    width: float = 1.0
    center_x: float = 0.0
    center_y: float = 0.0
    seed: int = 0
    decay_rate: float = 6.0
    init_file: str = ""
    output_dir: str = "out"
    experiment: str = "evolve"
    theta: float = 1.0
    kernel_t: float = 1.0
    decay_t_min: float = 5.0
    decay_t_max: float = 40.0
    decay_samples: int = 36
    kind: str = "kato"
    seeds: int = 50
    jbound_p: int = 2
    t_max: float = 10.0
    r: float | None = None
    write_snapshots: bool = True
    notices: list[str] = field(default_factory=list, compare=False, repr=False)

    @property
    def grid(self) -> Grid2D:
        return Grid2D(self.nx, self.ny, self.Lx, self.Ly)

    @property
    def params(self) -> EquationParams:
        return EquationParams(self.p, self.alpha, self.gamma, self.s)

    @property
    def schedule(self) -> SolveSchedule:
        return SolveSchedule(self.t_end, self.dt, self.snapshot_stride, self.cfl_guard)

    @property
    def r_value(self) -> float:
        return self.s - 1.0 if self.r is None else self.r


def _validate(cfg: RunConfig) -> list[str]:
    errs: list[str] = []
    for name in ("nx", "ny"):
        n = getattr(cfg, name)
        if n % 2:
            errs.append(f"{name}: must be even (got {n})")
        elif n < 8:
            errs.append(f"{name}: must be at least 8 (got {n})")
    for name in ("Lx", "Ly", "t_end", "width", "kernel_t", "t_max"):
        v = getattr(cfg, name)
        if not (math.isfinite(v) and v > 0):
            errs.append(f"{name}: must be positive (got {v})")
    for name in ("alpha", "gamma", "amplitude", "center_x", "center_y", "decay_rate"):
        if not math.isfinite(getattr(cfg, name)):
            errs.append(f"{name}: must be finite (got {getattr(cfg, name)})")
    if cfg.p < 1:
        errs.append(f"p: must be a positive integer (got {cfg.p})")
    if cfg.jbound_p < 1:
        errs.append(f"jbound_p: must be a positive integer (got {cfg.jbound_p})")
    if not cfg.s > 2:
        errs.append(f"s: must be greater than 2 (got {cfg.s})")
    if cfg.dt is not None and not (math.isfinite(cfg.dt) and cfg.dt > 0):
        errs.append(f"dt: must be positive or auto (got {cfg.dt})")
    if cfg.snapshot_stride < 1:
        errs.append(f"snapshot_stride: must be at least 1 (got {cfg.snapshot_stride})")
    if not 0 < cfg.cfl_guard <= 1:
        errs.append(f"cfl_guard: must lie in (0, 1] (got {cfg.cfl_guard})")
    if cfg.init not in INITS:
        errs.append(f"init: must be one of {', '.join(INITS)} (got {cfg.init!r})")
    if cfg.init == "file" and not cfg.init_file:
        errs.append("init_file: required when init = file")
    if cfg.init == "random_smooth" and not cfg.decay_rate > 1:
        errs.append(f"decay_rate: must exceed 1 (got {cfg.decay_rate})")
    if cfg.experiment not in EXPERIMENTS:
        errs.append(f"experiment: must be one of {', '.join(EXPERIMENTS)} (got {cfg.experiment!r})")
    if not 0 < cfg.theta <= 1:
        errs.append(f"theta: must lie in (0, 1] (got {cfg.theta})")
    if not 0 < cfg.decay_t_min < cfg.decay_t_max:
        errs.append(f"decay_t_min: must satisfy 0 < decay_t_min < decay_t_max "
                    f"(got {cfg.decay_t_min}, {cfg.decay_t_max})")
    if cfg.decay_samples < 8:
        errs.append(f"decay_samples: must be at least 8 (got {cfg.decay_samples})")
    if cfg.kind not in KINDS:
        errs.append(f"kind: must be one of {', '.join(KINDS)} (got {cfg.kind!r})")
    if cfg.seeds < 1:
        errs.append(f"seeds: must be at least 1 (got {cfg.seeds})")
    if cfg.r is not None and not (cfg.s - 1 <= cfg.r < cfg.s):
        errs.append(f"r: must lie in [s - 1, s) = [{cfg.s - 1}, {cfg.s}) (got {cfg.r})")
    return errs


def _notices(cfg: RunConfig) -> list[str]:
    out = []
    if cfg.gamma != 0 and cfg.init in ("gaussian", "random_smooth", "file"):
        out.append(f"gamma = {cfg.gamma}: init {cfg.init!r} may have nonzero x-mean; "
                   "it will be projected onto zero x-mean")
    return out


def parse_config_text(text: str) -> RunConfig:
    """Parse and validate configuration text.

    Raises:
        ConfigError: listing every problem found, each naming its key.
    """
    errs: list[str] = []
    values: dict[str, object] = {}
    failed: set[str] = set()
    for lineno, line in enumerate(text.splitlines(), 1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            errs.append(f"line {lineno}: expected 'key = value', got {body!r}")
            continue
        key, raw = (part.strip() for part in body.split("=", 1))
        if key not in _SCHEMA:
            errs.append(f"{key}: unknown key (line {lineno})")
            continue
        if key in values:
            errs.append(f"{key}: given more than once (line {lineno})")
            continue
        parser = _SCHEMA[key][0]
        try:
            values[key] = parser(raw)
        except ValueError:
            errs.append(f"{key}: cannot parse {raw!r} as {_type_name(parser)}")
            values[key] = None
            failed.add(key)
    # keys that failed to parse or are missing get placeholders so the
    # remaining keys can still be validated in the same pass
    for key, (_, default) in _SCHEMA.items():
        if key not in values:
            if default is _REQUIRED:
                errs.append(f"{key}: missing required key")
                failed.add(key)
            else:
                values[key] = default
        if key in failed:
            values[key] = _PLACEHOLDERS.get(key, _SCHEMA[key][1])
    cfg = RunConfig(**values)
    errs += [e for e in _validate(cfg) if e.split(":", 1)[0] not in failed]
    if errs:
        raise ConfigError(errs)
    cfg.notices = _notices(cfg)
    return cfg


def _type_name(parser) -> str:
    return {_int: "integer", float: "number", _auto_float: "number or auto", _bool: "boolean",
            str: "string"}.get(parser, "value")


def parse_config(path: str | Path) -> RunConfig:
    return parse_config_text(Path(path).read_text())


def serialize_config(cfg: RunConfig) -> str:
    """Text that parses back to an equal RunConfig."""
    lines = []
    for f in fields(RunConfig):
        if f.name == "notices":
            continue
        v = getattr(cfg, f.name)
        if v is None:
            text = "auto"
        elif isinstance(v, bool):
            text = "true" if v else "false"
        elif isinstance(v, float):
            text = repr(v)
        else:
            text = str(v)
        lines.append(f"{f.name} = {text}")
    return "\n".join(lines) + "\n"
