"""Experiment configuration: a TOML file validated into nested pydantic models."""

from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Annotated, Literal, Optional, Union

import tomli
from pydantic import AfterValidator, BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

KINDS = ("rsft-run", "optimize", "roc", "complexity", "freq-sweep", "variance-check", "bartlett", "radar-sim")
Kind = Literal["rsft-run", "optimize", "roc", "complexity", "freq-sweep", "variance-check", "bartlett", "radar-sim"]
EtaP = Union[float, Literal["upper"]]


class ConfigError(ValueError):
    """Unreadable or invalid configuration."""


def _pow2(v: int) -> int:
    if v <= 0 or v & (v - 1):
        raise ValueError(f"{v} is not a power of two")
    return v


Pow2 = Annotated[int, AfterValidator(_pow2)]


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class SinusoidEntry(_Section):
    bin: float = Field(description="frequency in DFT bins, may be fractional")
    snr_db: float


class SignalSection(_Section):
    n: Pow2 = 1024
    t: int = Field(50, ge=1)
    noise_var: float = Field(1.0, ge=0)
    sinusoids: list[SinusoidEntry] = Field(
        default_factory=lambda: [SinusoidEntry(bin=b, snr_db=-10.0) for b in (64.5, 200.0, 345.5, 700.0)]
    )


class WindowSection(_Section):
    pre_db: float = Field(40.0, ge=20)
    flat_db: float = Field(40.0, ge=20)


class DesignSection(_Section):
    pd: float = Field(0.9, gt=0, lt=1)
    pfa: float = Field(1e-6, gt=0, lt=1)
    n: Pow2 = 1024
    b: Pow2 = 64
    t: int = Field(50, ge=1)
    k: int = Field(4, ge=0)
    eta_m: Optional[float] = Field(1.8, gt=0, description="omit to use the measured pre-window width")
    eta_p: EtaP = 1.0
    omega_bins: float = 64.5
    noise_var: float = Field(1.0, gt=0)
    variance_bound: Literal["interval", "point"] = "interval"

    @model_validator(mode="after")
    def _check(self):
        if self.b > self.n:
            raise ValueError(f"b={self.b} must not exceed n={self.n}")
        if not self.pfa < self.pd:
            raise ValueError("pfa must be smaller than pd")
        if isinstance(self.eta_p, float) and self.eta_p < 1:
            raise ValueError("eta_p must be >= 1 or 'upper'")
        return self


class RocSection(_Section):
    b_values: list[Pow2] = [64, 128, 256, 512]
    k_values: list[int] = [4]
    snr_db_values: list[float] = [-10.0, -15.0]
    eta_p_values: list[EtaP] = [1.0]
    pfa_values: list[float] = Field(default_factory=lambda: [10.0**e for e in range(-8, 0)])
    bartlett: bool = True


class ComplexitySection(_Section):
    n: Pow2 = 1024
    t: int = Field(50, ge=1)
    k_values: list[int] = [5, 50, 100]
    b_values: list[Pow2] = Field(default_factory=lambda: [2**e for e in range(3, 11)])
    eta_m: float = 1.4
    eta_p: float = 1.0
    frontier: bool = True
    frontier_omega_bins: float = 0.5


class SweepSection(_Section):
    start_bins: float = 64.0
    stop_bins: float = 65.0
    points: int = Field(9, ge=2)


class VarianceSection(_Section):
    t_values: list[int] = [10, 50, 100, 200]
    runs: int = Field(100, ge=1)


class RsftSection(_Section):
    gamma: Optional[float] = Field(None, ge=0, description="omit to take the designed threshold")
    mu: Optional[int] = Field(None, ge=1)


class BartlettSection(_Section):
    pfa: float = Field(1e-6, gt=0, lt=1)


class RadarSection(_Section):
    scale: Literal["desk", "full"] = "desk"
    snr_db: list[float] = [-10.0, -10.0, -10.0, -10.0]
    t: int = Field(10, ge=1)
    reduced: Optional[list[Pow2]] = None
    design_snr_db: Optional[float] = -10.0
    tail: Literal["normal", "binomial"] = "binomial"
    k: int = 4
    pd: float = 0.9
    pfa: float = 1e-6
    conventional: bool = True

    @field_validator("snr_db")
    @classmethod
    def _four(cls, v):
        if len(v) != 4:
            raise ValueError("give one SNR per scene target (4 values)")
        return v

    @field_validator("reduced")
    @classmethod
    def _three(cls, v):
        if v is not None and len(v) != 3:
            raise ValueError("reduced must list three sizes")
        return v

    def dims(self) -> tuple[int, int, int]:
        return (256, 16, 8) if self.scale == "desk" else (2048, 64, 32)

    def reduced_dims(self) -> tuple[int, int, int]:
        if self.reduced is not None:
            return tuple(self.reduced)
        return (64, 8, 4) if self.scale == "desk" else (256, 16, 8)


class ExperimentConfig(_Section):
    kind: Kind = "rsft-run"
    seed: int = Field(0, ge=0)
    out_dir: str = "out"
    signal: SignalSection = SignalSection()
    windows: WindowSection = WindowSection()
    design: DesignSection = DesignSection()
    rsft: RsftSection = RsftSection()
    roc: RocSection = RocSection()
    complexity: ComplexitySection = ComplexitySection()
    sweep: SweepSection = SweepSection()
    variance: VarianceSection = VarianceSection()
    bartlett: BartlettSection = BartlettSection()
    radar: RadarSection = RadarSection()

    @model_validator(mode="after")
    def _consistent(self):
        if self.kind in ("rsft-run", "bartlett"):
            if self.design.n != self.signal.n or self.design.t != self.signal.t:
                raise ValueError("design.n and design.t must match signal.n and signal.t")
        if self.rsft.mu is not None and self.rsft.mu > self.design.t:
            raise ValueError(f"rsft.mu={self.rsft.mu} exceeds T={self.design.t}")
        red = self.radar.reduced_dims()
        for n, b in zip(self.radar.dims(), red):
            if b > n:
                raise ValueError(f"radar reduced size {b} exceeds axis length {n}")
        return self

    def digest(self) -> str:
        """SHA-256 of the canonical JSON form, ignoring the output directory."""
        body = self.model_dump(mode="json", exclude={"out_dir"})
        return hashlib.sha256(json.dumps(body, sort_keys=True).encode()).hexdigest()


def _format_error(err: ValidationError) -> str:
    lines = []
    for e in err.errors():
        loc = ".".join(str(p) for p in e["loc"]) or "<root>"
        lines.append(f"{loc}: {e['msg']}")
    return "\n".join(lines)


def build_config(data: dict, **overrides) -> ExperimentConfig:
    data = dict(data)
    data.update({k: v for k, v in overrides.items() if v is not None})
    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as err:
        raise ConfigError(_format_error(err)) from None


def load_config(path: str | Path | None, **overrides) -> ExperimentConfig:
    data: dict = {}
    if path is not None:
        try:
            with open(path, "rb") as fh:
                data = tomli.load(fh)
        except OSError as err:
            raise ConfigError(f"cannot read {path}: {err.strerror}") from None
        except tomli.TOMLDecodeError as err:
            raise ConfigError(f"{path}: {err}") from None
    return build_config(data, **overrides)
