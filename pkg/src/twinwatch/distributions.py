"""Clamped distribution specs used by the traffic table and delay models."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError


@dataclass(frozen=True)
class NormalSpec:
    """Normal distribution N(mean, stddev^2), optionally clamped after sampling."""

    mean: float
    stddev: float
    min_clamp: float | None = None
    max_clamp: float | None = None

    def __post_init__(self) -> None:
        if not self.stddev > 0:
            raise ConfigError(f"stddev must be > 0, got {self.stddev}")
        if (self.min_clamp is not None and self.max_clamp is not None
                and self.min_clamp > self.max_clamp):
            raise ConfigError("min_clamp exceeds max_clamp")

    def sample(self, rng: np.random.Generator) -> float:
        return self.clamp(float(rng.normal(self.mean, self.stddev)))

    def sample_many(self, rng: np.random.Generator, n: int) -> np.ndarray:
        out = rng.normal(self.mean, self.stddev, n)
        if self.min_clamp is not None:
            np.maximum(out, self.min_clamp, out=out)
        if self.max_clamp is not None:
            np.minimum(out, self.max_clamp, out=out)
        return out

    def clamp(self, value: float) -> float:
        if self.min_clamp is not None:
            value = max(value, self.min_clamp)
        if self.max_clamp is not None:
            value = min(value, self.max_clamp)
        return value

    def sample_count(self, rng: np.random.Generator) -> int:
        """One draw rounded to a non-negative integer (arrival counts)."""
        return max(0, int(round(self.sample(rng))))

    def to_dict(self) -> dict:
        return {"mean": self.mean, "stddev": self.stddev,
                "min_clamp": self.min_clamp, "max_clamp": self.max_clamp}

    @classmethod
    def from_dict(cls, d: dict) -> "NormalSpec":
        return cls(mean=d["mean"], stddev=d["stddev"],
                   min_clamp=d.get("min_clamp"), max_clamp=d.get("max_clamp"))


@dataclass(frozen=True)
class IntUniformSpec:
    """Uniform integer distribution on the inclusive range [low, high]."""

    low: int
    high: int

    def __post_init__(self) -> None:
        if self.low > self.high:
            raise ConfigError(f"empty integer range [{self.low}, {self.high}]")

    def sample(self, rng: np.random.Generator) -> int:
        return int(rng.integers(self.low, self.high + 1))

    def sample_many(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return rng.integers(self.low, self.high + 1, n)

    def to_dict(self) -> dict:
        return {"low": self.low, "high": self.high}

    @classmethod
    def from_dict(cls, d: dict) -> "IntUniformSpec":
        return cls(low=d["low"], high=d["high"])
