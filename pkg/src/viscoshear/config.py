"""Flat key = value configuration for the CLI and scenario pipelines."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .errors import ParseError, ValidationError
from .flow import FlowParams
from .spectrum import Grid

__all__ = ["Config", "parse_config", "load_config", "DEFAULT_CONFIG_TEXT"]

_FORMATS = ("csv", "json", "svg")

DEFAULT_CONFIG_TEXT = """\
# reference desk-scale fixture
gamma0 = 0.15
gamma1 = 0.03
gamma2 = 0.8
nu = 1e-3
"""


@dataclass(frozen=True)
class Config:
    gamma0: float = 0.15
    gamma1: float = 0.03
    gamma2: float = 0.8
    nu: float = 1e-3
    M: Optional[float] = None
    half_width: float = 20.0
    n_points: int = 8193
    tol_eig: float = 1e-8
    tol_cal: float = 1e-6
    gamma_ratio_max: float = 0.2
    delta: float = 0.01
    n_times: int = 9
    k_grid: str = "auto"
    out_dir: str = "."
    formats: tuple = ("csv", "json")

    def params(self, M: Optional[float] = None) -> FlowParams:
        m = M if M is not None else (self.M if self.M is not None else 1.0)
        return FlowParams(m, self.gamma0, self.gamma1, self.gamma2, self.nu)

    def grid(self) -> Grid:
        return Grid(self.half_width, self.n_points)

    def k_grid_values(self, k_upper: float):
        """Wave-number grid for the eigenvalue curve.

        'auto' spans [0.9, k_upper - 0.004] with 8 points; an explicit spec
        is 'start:stop:count'.
        """
        import numpy as np

        if self.k_grid == "auto":
            return np.linspace(0.9, k_upper - 0.004, 8)
        start, stop, count = self.k_grid.split(":")
        return np.linspace(float(start), float(stop), int(count))


_FLOAT_KEYS = {
    "gamma0", "gamma1", "gamma2", "nu", "M", "half_width",
    "tol_eig", "tol_cal", "gamma_ratio_max", "delta",
}
_INT_KEYS = {"n_points", "n_times"}
_STR_KEYS = {"k_grid", "out_dir", "formats"}


def parse_config(text: str) -> Config:
    """Parse flat 'key = value' text ('#' comments) into a validated Config.

    Unknown and duplicate keys are rejected with their line number; value
    validation failures name the violated invariant.
    """
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(lineno, f"expected 'key = value', got {raw.strip()!r}")
        key, _, val = line.partition("=")
        key, val = key.strip(), val.strip()
        if not key or not val:
            raise ParseError(lineno, f"expected 'key = value', got {raw.strip()!r}")
        if key not in _FLOAT_KEYS | _INT_KEYS | _STR_KEYS:
            raise ParseError(lineno, f"unknown key {key!r}")
        if key in values:
            raise ParseError(lineno, f"duplicate key {key!r}")
        if key in _FLOAT_KEYS:
            try:
                values[key] = float(val)
            except ValueError:
                raise ParseError(lineno, f"{key} must be a number, got {val!r}")
        elif key in _INT_KEYS:
            try:
                values[key] = int(val)
            except ValueError:
                raise ParseError(lineno, f"{key} must be an integer, got {val!r}")
        else:
            values[key] = val
    if "formats" in values:
        fmts = tuple(f.strip() for f in values["formats"].split(",") if f.strip())
        for f in fmts:
            if f not in _FORMATS:
                raise ValidationError(f"formats must be a subset of {{csv, json, svg}}, got {f!r}")
        values["formats"] = fmts
    cfg = Config(**values)
    _validate(cfg)
    return cfg


def _validate(cfg: Config) -> None:
    if not 0.0 < cfg.gamma0 <= 0.5:
        raise ValidationError("gamma0 must lie in (0, 0.5]")
    if not 0.0 < cfg.gamma1 <= 0.5:
        raise ValidationError("gamma1 must lie in (0, 0.5]")
    if not 0.0 < cfg.gamma2 < 1.0:
        raise ValidationError("gamma2 must lie in (0,1)")
    if not cfg.gamma1 < cfg.gamma2:
        raise ValidationError("gamma1 must be smaller than gamma2")
    if cfg.gamma1 / cfg.gamma2 > cfg.gamma_ratio_max:
        raise ValidationError(
            f"gamma1/gamma2 = {cfg.gamma1 / cfg.gamma2:g} exceeds gamma_ratio_max = "
            f"{cfg.gamma_ratio_max:g}"
        )
    if not cfg.nu > 0.0:
        raise ValidationError("nu must be positive")
    if cfg.M is not None and cfg.M < 0.0:
        raise ValidationError("M must be nonnegative")
    if cfg.n_points % 2 == 0:
        raise ValidationError("n_points must be odd")
    if cfg.n_points < 9:
        raise ValidationError("n_points must be at least 9")
    if not cfg.half_width >= 10.0:
        raise ValidationError("half_width must be >= 10")
    for name in ("tol_eig", "tol_cal"):
        if not getattr(cfg, name) > 0.0:
            raise ValidationError(f"{name} must be positive")
    if not 0.0 < cfg.delta < 1.0:
        raise ValidationError("delta must lie in (0,1)")
    if cfg.n_times < 8:
        raise ValidationError("n_times must be at least 8")
    if cfg.k_grid != "auto":
        parts = cfg.k_grid.split(":")
        if len(parts) != 3:
            raise ValidationError("k_grid must be 'auto' or 'start:stop:count'")
        try:
            float(parts[0]), float(parts[1]), int(parts[2])
        except ValueError:
            raise ValidationError("k_grid must be 'auto' or 'start:stop:count'")


def load_config(path: str) -> Config:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())
