"""Declarative experiment configuration and the end-to-end pipeline.

Config files use a flat ``key = value`` grammar: one pair per line, ``#`` starts
a comment, blank lines are ignored, keys are the field names of
:class:`ExperimentConfig` (``lambda`` is accepted for ``lam``). Values are parsed
with the field's type. Precedence is command line > file > environment > defaults;
the only environment variable is ``SEMILINEAR_RECON_SEED``.
"""

from __future__ import annotations

import json
import os
import time
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from . import nonlinearity
from .forward import SolverSettings
from .invert import (ErrorMeasure, LevelInversion, ReconstructedF, RegularizationParams,
                     reconstruct, relative_error, run_inversion)
from .measure import GEOMETRIES, MeasurementGeometry, MeasurementSet, synthesize

SEED_ENV = "SEMILINEAR_RECON_SEED"


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    f_true: str = "neg_u3"
    f0: str = "neg_u2"
    N: int = 30
    epsilon0: float = 0.01
    M: float = 0.8
    lam: float = 9.3e-4
    eps_stop: float = 1e-3
    max_outer: int = 500
    geometry: str = "gamma1"
    fine_n: int = 64
    coarse_n: int = 32
    seed: int = 0
    # forward subcommand only
    delta: float = 1.0
    n: int = 64
    # solver settings; omega = 0 selects the optimal value for the grid
    omega: float = 0.0
    sor_tol: float = 1e-10
    sor_max_iter: int = 0
    picard_tol: float = 1e-8
    picard_max_iter: int = 200
    seed_source: str = field(default="default", compare=False)

    def validate(self) -> "ExperimentConfig":
        for name in (self.f_true, self.f0):
            try:
                nonlinearity.get(name)
            except KeyError as exc:
                raise ConfigError(str(exc.args[0])) from None
        if self.geometry not in GEOMETRIES:
            raise ConfigError(f"geometry must be one of {GEOMETRIES}")
        if self.N < 1:
            raise ConfigError("N must be >= 1")
        if not 0 <= self.epsilon0 < 1:
            raise ConfigError("epsilon0 must lie in [0, 1)")
        if self.fine_n % self.coarse_n:
            raise ConfigError("coarse_n must divide fine_n")
        try:
            self.settings()
            self.params()
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        return self

    def settings(self) -> SolverSettings:
        return SolverSettings(self.omega or None, self.sor_tol, self.sor_max_iter or None,
                              self.picard_tol, self.picard_max_iter)

    def params(self) -> RegularizationParams:
        return RegularizationParams(self.M, self.lam, self.eps_stop, self.max_outer)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["lambda"] = d.pop("lam")
        return d

    def to_text(self) -> str:
        """Config-file text that reproduces this configuration."""
        lines = []
        for k, v in self.to_dict().items():
            if k == "seed_source":
                continue
            lines.append(f"{k} = {v!r}" if isinstance(v, float) else f"{k} = {v}")
        return "\n".join(lines) + "\n"


_FIELDS = {f.name: f for f in fields(ExperimentConfig) if f.name != "seed_source"}
_CASTS = {"int": int, "float": float, "str": str}


def _coerce(key: str, raw: str):
    key = "lam" if key == "lambda" else key
    if key not in _FIELDS:
        raise ConfigError(f"unknown config key {key!r}")
    cast = _CASTS[_FIELDS[key].type]
    try:
        if cast is int:
            val = float(raw)
            if val != int(val):
                raise ValueError
            return key, int(val)
        return key, cast(raw.strip())
    except ValueError:
        raise ConfigError(f"bad value for {key}: {raw!r}") from None


def parse_pairs(text: str) -> dict:
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value")
        k, v = (p.strip() for p in line.split("=", 1))
        key, val = _coerce(k, v)
        out[key] = val
    return out


def load_config(path: str | None = None, overrides: list[str] | tuple = (),
                environ=None) -> ExperimentConfig:
    environ = os.environ if environ is None else environ
    values: dict = {}
    source = "default"
    if environ.get(SEED_ENV):
        values["seed"] = _coerce("seed", environ[SEED_ENV])[1]
        source = f"env:{SEED_ENV}"
    if path:
        with open(path) as fh:
            file_vals = parse_pairs(fh.read())
        if "seed" in file_vals:
            source = "file"
        values.update(file_vals)
    cli_vals = parse_pairs("\n".join(overrides))
    if "seed" in cli_vals:
        source = "cli"
    values.update(cli_vals)
    cfg = ExperimentConfig(**values)
    cfg.seed_source = source
    return cfg.validate()


def config_from_dict(d: dict) -> ExperimentConfig:
    d = dict(d)
    if "lambda" in d:
        d["lam"] = d.pop("lambda")
    return ExperimentConfig(**d).validate()


@dataclass
class RunReport:
    config: dict
    err: float | None
    err_absolute: bool
    iterations: list[int]
    converged: list[bool]
    diverged: list[bool]
    missing: list[int]
    wall_clock_seconds: float | None = None

    def to_json(self, timing: bool = False) -> str:
        d = asdict(self)
        if not timing:
            d.pop("wall_clock_seconds")
        return json.dumps(d, indent=1)


def measure_from_config(cfg: ExperimentConfig) -> MeasurementSet:
    return synthesize(nonlinearity.get(cfg.f_true), MeasurementGeometry(cfg.geometry), cfg.N,
                      cfg.epsilon0, cfg.fine_n, cfg.coarse_n, cfg.seed, cfg.settings())


def invert_measurements(cfg: ExperimentConfig, data: MeasurementSet):
    """Run every level, reconstruct and score. Returns ``(report, Fhat, levels)``."""
    t0 = time.perf_counter()
    levels: list[LevelInversion] = run_inversion(data, nonlinearity.get(cfg.f0), cfg.params(),
                                                 cfg.settings())
    Fhat: ReconstructedF = reconstruct(levels, data.N)
    err: ErrorMeasure | None
    try:
        err = relative_error(nonlinearity.get(cfg.f_true), Fhat)
    except ValueError:
        err = None
    report = RunReport(
        config=cfg.to_dict(),
        err=None if err is None else err.value,
        err_absolute=False if err is None else err.absolute,
        iterations=[lv.iterations for lv in levels],
        converged=[lv.converged for lv in levels],
        diverged=[lv.diverged for lv in levels],
        missing=[int(i) for i in np.flatnonzero(Fhat.missing)],
        wall_clock_seconds=time.perf_counter() - t0,
    )
    return report, Fhat, levels


def run_experiment(cfg: ExperimentConfig):
    return invert_measurements(cfg, measure_from_config(cfg))
