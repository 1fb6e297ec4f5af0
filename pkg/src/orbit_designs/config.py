"""Run-time settings shared by the library and the command line."""

from __future__ import annotations

import os
from dataclasses import dataclass

from . import scalar

ENV_PRECISION = "ORBIT_DESIGNS_PRECISION"
FORMATS = ("json", "csv", "text")


@dataclass(frozen=True)
class Config:
    precision_bits: int = 256
    tolerance_exponent: int | None = None
    output_format: str = "json"
    orbit_rank_cap: int = 10

    def __post_init__(self):
        if self.precision_bits < 64:
            raise ValueError("precision_bits must be >= 64")
        if self.orbit_rank_cap < 2:
            raise ValueError("orbit_rank_cap must be >= 2")
        if self.output_format not in FORMATS:
            raise ValueError(f"output_format must be one of {FORMATS}")
        if self.tolerance_exponent is not None and self.tolerance_exponent < 1:
            raise ValueError("tolerance_exponent must be positive")

    @property
    def effective_tolerance_exponent(self) -> int:
        return self.tolerance_exponent or self.precision_bits // 2

    @classmethod
    def from_env(cls, **overrides) -> Config:
        values = {}
        env = os.environ.get(ENV_PRECISION)
        if env:
            try:
                values["precision_bits"] = int(env)
            except ValueError:
                raise ValueError(f"{ENV_PRECISION} must be an integer, got {env!r}") from None
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)

    def apply(self) -> None:
        scalar.set_precision(self.precision_bits, self.tolerance_exponent)
