"""Probabilistic detection classifier.

A single camera observation is scored as a convex combination of three
normalized terms: angular deviation between the camera's optical axis and
the agent's movement direction (frontal view scores highest), camera-agent
distance, and crowd density in the field of view. A trajectory counts as
detected when the best per-camera score reaches the decision threshold.

The distance and density normalizations are deliberately kept in their
as-published increasing form (farther and more crowded both raise the
score); set ``NormalizationBounds.inverted_dn`` for the physically
intuitive decreasing variants in sensitivity studies.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .distributions import IntUniformSpec, NormalSpec
from .errors import ConfigError, DomainError

WEIGHT_SUM_TOL = 1e-9

EQUAL_WEIGHTS = (1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0)


@dataclass(frozen=True)
class NormalizationBounds:
    """Reference scales mapping raw angle/distance/density onto [0, 1]."""

    a_max: float = 90.0
    d_min: float = 1.0
    d_max: float = 18.0
    n_max: int = 18
    inverted_dn: bool = False

    def __post_init__(self) -> None:
        if self.a_max <= 0 or self.d_min <= 0 or self.d_max <= 0 or self.n_max <= 0:
            raise ConfigError("normalization bounds must be strictly positive")
        if self.d_min >= self.d_max:
            raise ConfigError("d_min must be below d_max")

    def to_dict(self) -> dict:
        return {"a_max": self.a_max, "d_min": self.d_min, "d_max": self.d_max,
                "n_max": self.n_max, "inverted_dn": self.inverted_dn}

    @classmethod
    def from_dict(cls, d: dict) -> "NormalizationBounds":
        return cls(**d)


@dataclass(frozen=True)
class DetectionWeights:
    """Weights of the angle/distance/density terms; must sum to 1."""

    w_a: float
    w_d: float
    w_n: float

    def __post_init__(self) -> None:
        for name, w in (("w_a", self.w_a), ("w_d", self.w_d), ("w_n", self.w_n)):
            if not 0.0 <= w <= 1.0:
                raise DomainError(f"{name}={w} outside [0, 1]")
        if abs(self.w_a + self.w_d + self.w_n - 1.0) > WEIGHT_SUM_TOL:
            raise DomainError(
                f"weights must sum to 1, got {self.w_a + self.w_d + self.w_n!r}")

    @classmethod
    def equal(cls) -> "DetectionWeights":
        return cls(*EQUAL_WEIGHTS)

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.w_a, self.w_d, self.w_n)

    def to_dict(self) -> dict:
        return {"w_a": self.w_a, "w_d": self.w_d, "w_n": self.w_n}

    @classmethod
    def from_dict(cls, d: dict) -> "DetectionWeights":
        return cls(w_a=d["w_a"], w_d=d["w_d"], w_n=d["w_n"])


@dataclass(frozen=True)
class DetectionThreshold:
    """Decision threshold on the per-camera score; comparison is inclusive."""

    t: float = 0.45

    def __post_init__(self) -> None:
        if not 0.0 < self.t < 1.0:
            raise DomainError(f"threshold must lie in (0, 1), got {self.t}")


@dataclass(frozen=True)
class ObservationSample:
    """One camera-vs-agent evaluation: raw terms plus the combined score."""

    camera_id: str
    time: float
    a_deg: float
    d_m: float
    n_count: int
    p: float

    def __post_init__(self) -> None:
        if self.a_deg < 0 or self.d_m < 0 or self.n_count < 0:
            raise DomainError("observation terms must be non-negative")
        if not 0.0 <= self.p <= 1.0:
            raise DomainError(f"score {self.p} outside [0, 1]")


def normalize_angle(a_deg: float, b: NormalizationBounds) -> float:
    """Map angular deviation to [0, 1]: 0 deg -> 1, a_max -> 0, beyond -> 0."""
    if a_deg < 0:
        raise DomainError(f"negative angle {a_deg}")
    if a_deg > b.a_max:
        return 0.0
    return 1.0 - a_deg / b.a_max


def normalize_distance(d_m: float, b: NormalizationBounds) -> float:
    """Map distance to [0, 1] via (d - d_min) / d_max, clamped."""
    if not np.isfinite(d_m):
        raise DomainError(f"non-finite distance {d_m}")
    v = (d_m - b.d_min) / b.d_max
    v = min(1.0, max(0.0, v))
    return 1.0 - v if b.inverted_dn else v


def normalize_density(n: int, b: NormalizationBounds) -> float:
    """Map a head count to [0, 1] via n / n_max, capped at 1."""
    if n < 0:
        raise DomainError(f"negative count {n}")
    v = min(n, b.n_max) / b.n_max
    return 1.0 - v if b.inverted_dn else v


def detection_probability(a_deg: float, d_m: float, n: int,
                          w: DetectionWeights, b: NormalizationBounds) -> float:
    """Convex combination of the three normalized observation terms."""
    return (w.w_a * normalize_angle(a_deg, b)
            + w.w_d * normalize_distance(d_m, b)
            + w.w_n * normalize_density(n, b))


def trajectory_detected(max_p_per_camera: list[float] | np.ndarray,
                        t: DetectionThreshold) -> bool:
    """True iff any camera's best score reaches the threshold.

    An empty observation set is undetected: with no camera ever seeing the
    agent there is no score to compare.
    """
    if len(max_p_per_camera) == 0:
        return False
    return max(max_p_per_camera) >= t.t


def analytic_detection_rate(p: float, m: int) -> float:
    """Closed-form trajectory detection rate for m cameras whose per-camera
    threshold exceedances are independent Bernoulli(p): 1 - (1 - p)^m."""
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"exceedance probability {p} outside [0, 1]")
    if m < 0 or int(m) != m:
        raise DomainError(f"camera count must be a non-negative integer, got {m}")
    return 1.0 - (1.0 - p) ** int(m)


def calibrate_exceedance(target_rate: float, m: int) -> float:
    """Invert the detection-rate law: the per-camera exceedance p* such that
    m independent cameras jointly detect at target_rate."""
    if not 0.0 < target_rate < 1.0:
        raise DomainError(f"target rate {target_rate} outside (0, 1)")
    if m < 1 or int(m) != m:
        raise DomainError(f"camera count must be a positive integer, got {m}")
    return 1.0 - (1.0 - target_rate) ** (1.0 / int(m))


@dataclass(frozen=True)
class SamplerConfig:
    """Stochastic observation sampler: per-camera draws of the three terms."""

    a_spec: NormalSpec = field(default_factory=lambda: NormalSpec(5.02, 1.49))
    d_spec: NormalSpec = field(default_factory=lambda: NormalSpec(5.02, 1.49))
    n_spec: IntUniformSpec = field(default_factory=lambda: IntUniformSpec(1, 18))
    bounds: NormalizationBounds = field(default_factory=NormalizationBounds)
    trajectories: int = 10_000
    seed: int = 0

    def __post_init__(self) -> None:
        if self.trajectories < 1:
            raise ConfigError("sampler needs at least one trajectory")

    def draw_normalized_terms(self, m: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Normalized (A, D, N) arrays of shape (trajectories, m)."""
        rng = np.random.default_rng(self.seed)
        shape = (self.trajectories, m)
        a = rng.normal(self.a_spec.mean, self.a_spec.stddev, shape)
        d = rng.normal(self.d_spec.mean, self.d_spec.stddev, shape)
        n = self.n_spec.sample_many(rng, shape)
        b = self.bounds
        a_norm = np.where(a > b.a_max, 0.0, 1.0 - np.clip(a, 0.0, b.a_max) / b.a_max)
        d_norm = np.clip((d - b.d_min) / b.d_max, 0.0, 1.0)
        n_norm = np.minimum(n, b.n_max) / b.n_max
        if b.inverted_dn:
            d_norm = 1.0 - d_norm
            n_norm = 1.0 - n_norm
        return a_norm, d_norm, n_norm


@dataclass(frozen=True)
class CalibrationResult:
    weights: DetectionWeights
    achieved_rate: float
    target_rate: float
    converged: bool
    evaluations: int


def _simplex_grid(step: float = 0.01) -> np.ndarray:
    """All weight triples on the unit simplex at the given grid step, plus
    the exact equal-weights point (which never lands on a 0.01 grid)."""
    k = int(round(1.0 / step))
    rows = []
    for i in range(k + 1):
        for j in range(k + 1 - i):
            rows.append((i / k, j / k, (k - i - j) / k))
    rows.append(EQUAL_WEIGHTS)
    return np.array(rows)


def calibrate_weights(target_rate: float, preset,
                      sampler: SamplerConfig, t: DetectionThreshold,
                      budget: int = 10_000,
                      grid_step: float = 0.01) -> CalibrationResult:
    """Grid-search the weight simplex for the triple whose simulated
    trajectory detection rate is closest to target_rate.

    ``preset`` may be a CameraPreset or a bare camera count; only the count
    matters here because the stochastic sampler ignores camera geometry.
    All candidates are scored on one shared set of stochastic draws (common
    random numbers), so the search is deterministic given the sampler seed.
    Ties in |rate - target| break toward equal weights, then toward the
    lexicographically smallest triple. If the budget runs out before the
    whole grid is scanned, the best weights so far are returned flagged as
    non-converged.
    """
    if not 0.0 < target_rate < 1.0:
        raise DomainError(f"target rate {target_rate} outside (0, 1)")
    camera_count = len(preset.cameras) if hasattr(preset, "cameras") else int(preset)
    if camera_count < 1:
        raise DomainError("camera count must be positive")
    if budget < 1:
        raise ConfigError("budget must be at least 1")

    a_norm, d_norm, n_norm = sampler.draw_normalized_terms(camera_count)
    features = np.stack([a_norm, d_norm, n_norm])  # (3, n_traj, m)
    grid = _simplex_grid(grid_step)
    n_candidates = min(budget, len(grid))

    best: tuple[float, float, tuple[float, float, float]] | None = None
    chunk = 64
    equal = np.array(EQUAL_WEIGHTS)
    for start in range(0, n_candidates, chunk):
        cand = grid[start:start + chunk]
        scores = np.tensordot(cand, features, axes=([1], [0]))  # (c, n_traj, m)
        rates = (scores.max(axis=2) >= t.t).mean(axis=1)
        for w, rate in zip(cand, rates):
            key = (abs(rate - target_rate),
                   float(np.abs(w - equal).sum()),
                   (w[0], w[1], w[2]))
            if best is None or key < best[:3]:
                best = key + ((float(w[0]), float(w[1]), float(w[2])), float(rate))
    assert best is not None
    _, _, _, w_best, rate_best = best
    return CalibrationResult(
        weights=DetectionWeights(*w_best),
        achieved_rate=rate_best,
        target_rate=target_rate,
        converged=n_candidates >= len(grid),
        evaluations=n_candidates,
    )
