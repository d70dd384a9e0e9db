#src/models/experiment_config.py
#18 Oct 2026

"""
Validated parameter records for every CLI subcommand. Names of fluxes,
operator families and means are checked here, before any computation starts.
"""

import logging
from pathlib import Path
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from src.numerics.euler import INITIAL_CONDITIONS
from src.numerics.means import MeanKind
from src.numerics.sbp1d import OperatorFamily
from src.numerics.twopoint import FluxId

LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


class GlobalOptions(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    gamma: float = Field(1.4, gt=1.0)
    cfl: float = Field(0.05, gt=0.0)
    seed: int = Field(0, ge=0, lt=2 ** 64)
    threads: int = Field(1, ge=1)
    log_dir: Path | None = None
    log_level: str = "INFO"

    @field_validator("log_level")
    @classmethod
    def _known_level(cls, value: str) -> str:
        value = value.upper()
        if value not in LOG_LEVELS:
            raise ValueError(f"log level must be one of {', '.join(LOG_LEVELS)}")
        return value

    @property
    def level(self) -> int:
        return getattr(logging, self.log_level)


class MeansTableConfig(GlobalOptions):
    a: float = Field(gt=0.0)
    b: float = Field(gt=0.0)
    out: Path | None = None


class FluxCheckConfig(GlobalOptions):
    flux: FluxId
    pairs: int = Field(1000, gt=0)
    out: Path | None = None


class HartenScanConfig(GlobalOptions):
    entropy: Literal["standard", "alpha"] = "standard"
    alpha: float | None = None
    trials: int = Field(1000, gt=0)
    tolerance: float = Field(1.0e-6, gt=0.0)
    out: Path | None = None

    @model_validator(mode="after")
    def _alpha_given(self):
        if self.entropy == "alpha" and self.alpha is None:
            raise ValueError("--alpha is required with --entropy alpha")
        if self.entropy == "alpha" and self.alpha == 0.0:
            raise ValueError("alpha must be nonzero")
        return self


class OperatorOptions(GlobalOptions):
    family: OperatorFamily
    nodes: int | None = Field(None, gt=0)
    elements: int | None = Field(None, gt=0)
    degree: int | None = Field(None, ge=1)

    @model_validator(mode="after")
    def _size_given(self):
        if self.family in (OperatorFamily.FD2, OperatorFamily.FD4):
            if self.nodes is None:
                raise ValueError(f"--nodes is required for {self.family.value}")
        elif self.elements is None or self.degree is None:
            raise ValueError(f"--elements and --degree are required for {self.family.value}")
        return self

    @property
    def size(self) -> int:
        if self.family in (OperatorFamily.FD2, OperatorFamily.FD4):
            return self.nodes
        return self.elements


class SbpDumpConfig(OperatorOptions):
    out: Path | None = None


class AdvectionSpectrumConfig(OperatorOptions):
    mean: MeanKind = MeanKind.ARITHMETIC
    refine: list[int] | None = None
    epsilon_scale: float | None = Field(None, gt=0.0)
    out: Path | None = None

    @field_validator("refine")
    @classmethod
    def _positive_sizes(cls, value):
        if value is not None and (not value or any(size <= 0 for size in value)):
            raise ValueError("--refine needs a list of positive sizes")
        return value


class EulerOptions(GlobalOptions):
    flux: FluxId = FluxId.SHIMA
    surface_flux: FluxId | None = None
    degree: int = Field(5, ge=1)
    elements: int = Field(4, ge=1)
    ic: str = "density_wave"

    @field_validator("flux")
    @classmethod
    def _volume_flux(cls, value: FluxId) -> FluxId:
        if not FluxId(value).is_volume_flux:
            raise ValueError(f"{FluxId(value).value} cannot be used as a volume flux")
        return value

    @field_validator("ic")
    @classmethod
    def _known_initial_condition(cls, value: str) -> str:
        if value not in INITIAL_CONDITIONS:
            raise ValueError(f"unknown initial condition '{value}' (known: {', '.join(INITIAL_CONDITIONS)})")
        return value


class EulerSpectrumConfig(EulerOptions):
    epsilon_scale: float | None = Field(None, gt=0.0)
    out: Path | None = None


class SimulateConfig(EulerOptions):
    t_end: float = Field(gt=0.0)
    out: Path | None = None
    snapshot_interval: float | None = Field(None, gt=0.0)
    snapshot_dir: Path | None = None
    fail_on_crash: bool = False


class PerturbConfig(EulerOptions):
    surface_flux: FluxId = FluxId.SHIMA
    amplitude: float = Field(1.0e-3, ge=0.0)
    t_end: float = Field(10.0, gt=0.0)
    out: Path | None = None
    fail_on_crash: bool = False
