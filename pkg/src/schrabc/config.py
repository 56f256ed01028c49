"""Run configuration: one JSON document, validated before any heavy work."""
from __future__ import annotations

import json
from pathlib import Path
from typing import List, Literal, Tuple

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from .errors import ConfigInvalid


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class ProfileConfig(_Strict):
    inner_half_width: float = Field(2.2, gt=0)
    strength: float = Field(10.0, ge=0)
    exponent: int = Field(2, ge=1)


class DtnConfig(_Strict):
    s0: float = 1.0
    D_bounds: Tuple[float, float] = (-6.0, 6.0)

    @field_validator("s0")
    @classmethod
    def _nonzero(cls, v):
        if v == 0:
            raise ValueError("s0 must be nonzero")
        return v


class ComplexityConfig(_Strict):
    eps: float = Field(1e-3, gt=0)


class ConvergenceConfig(_Strict):
    M_values: List[int] = [16, 32, 64]
    time: float = Field(0.6, ge=0)


class TruthSection(_Strict):
    big_bounds: Tuple[float, float] = (-12.0, 12.0)


class RunConfig(_Strict):
    abc: Literal["cap", "pml", "dtn0", "dtn1"] = "cap"
    method: Literal["direct", "schrodingerized", "both"] = "both"
    domain: Tuple[float, float] = (-3.0, 3.0)
    N: int = Field(64, ge=1)
    potential: Literal["default", "zero"] = "default"
    p_interval: Tuple[float, float] = (-5.0, 5.0)
    M: int = 64
    cap: ProfileConfig = ProfileConfig()
    pml: ProfileConfig = ProfileConfig()
    dtn: DtnConfig = DtnConfig()
    times: List[float] = [0.3, 0.6, 0.9]
    out_dir: str = "out"
    renormalize: bool = False
    complexity: ComplexityConfig = ComplexityConfig()
    convergence: ConvergenceConfig = ConvergenceConfig()
    truth: TruthSection = TruthSection()
    dense_max: int = Field(512, ge=0)
    self_test_tolerance: float = Field(0.05, gt=0)


def _check(cfg: RunConfig) -> RunConfig:
    lo, hi = cfg.domain
    if not lo < hi:
        raise ConfigInvalid("domain", f"need lower < upper, got {cfg.domain}")
    a, b = cfg.p_interval
    if not a < 0 < b:
        raise ConfigInvalid("p_interval", f"need a < 0 < b, got {cfg.p_interval}")
    for field, M in [("M", cfg.M)] + [(f"convergence.M_values[{k}]", m)
                                       for k, m in enumerate(cfg.convergence.M_values)]:
        if M < 2 or M % 2:
            raise ConfigInvalid(field, f"must be an even integer >= 2, got {M}")
        k0 = -a * M / (b - a)
        if abs(k0 - round(k0)) > 1e-9:
            raise ConfigInvalid(field, f"p = 0 is not a node of [{a}, {b}] with M = {M}")
    if not cfg.times:
        raise ConfigInvalid("times", "at least one output time is required")
    if any(t < 0 for t in cfg.times) or any(t1 < t0 for t0, t1 in zip(cfg.times, cfg.times[1:])):
        raise ConfigInvalid("times", "times must be nonnegative and nondecreasing")
    if cfg.abc in ("cap", "pml"):
        section = getattr(cfg, cfg.abc)
        w = section.inner_half_width
        if not (lo < -w and w < hi):
            raise ConfigInvalid(f"{cfg.abc}.inner_half_width",
                                f"inner box [-{w}, {w}] is not inside the domain {cfg.domain}")
    if cfg.abc in ("dtn0", "dtn1"):
        dlo, dhi = cfg.dtn.D_bounds
        if not (dlo < lo and hi < dhi):
            raise ConfigInvalid("dtn.D_bounds", f"{cfg.dtn.D_bounds} must strictly contain the domain {cfg.domain}")
    blo, bhi = cfg.truth.big_bounds
    if not (blo < lo and hi < bhi):
        raise ConfigInvalid("truth.big_bounds", f"{cfg.truth.big_bounds} must strictly contain the domain {cfg.domain}")
    return cfg


def parse_config(data: dict) -> RunConfig:
    try:
        cfg = RunConfig.model_validate(data)
    except ValidationError as exc:
        err = exc.errors()[0]
        field = ".".join(str(p) for p in err["loc"]) or "<root>"
        raise ConfigInvalid(field, err["msg"]) from exc
    return _check(cfg)


def load_config(path) -> RunConfig:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigInvalid("<file>", f"cannot read {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigInvalid("<root>", "config must be a JSON object")
    return parse_config(data)
