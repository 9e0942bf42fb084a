"""Experiment configuration, loadable from JSON with strict key checking."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, fields
from pathlib import Path

from .measurement import NOISE_MODES
from .spsa import SpsaMeta


class ConfigError(ValueError):
    """Invalid experiment configuration."""


def _float_grid(lo: float, hi: float, step: float) -> list[float]:
    if step <= 0:
        raise ConfigError("grid step must be positive")
    if hi < lo:
        raise ConfigError("grid maximum is below its minimum")
    count = int(round((hi - lo) / step)) + 1
    values = [lo + i * step for i in range(count)]
    return [v for v in values if v <= hi + 1e-9 * max(1.0, abs(hi))]


@dataclass
class ExperimentConfig:
    """Parameters shared by all experiment kinds.

    Mass can be a single value (``m``) or a grid (``m_min``/``m_max``/
    ``m_step``, all three together); likewise for the noise strength.
    ``shots`` is a positive photon-pair count per measurement setting, or the
    string ``"exact"`` for the infinite-shot limit.  ``a0``/``af``/``b0``/
    ``bf`` override the optimizer gain parameters.  ``workers = 0`` picks the
    machine's CPU count.
    """

    m: float = 0.0
    m_min: float | None = None
    m_max: float | None = None
    m_step: float | None = None
    trials: int = 30
    iterations: int = 500
    shots: int | str = 1000
    noise_mode: str = "none"
    epsilon: float | None = None
    epsilon_min: float | None = None
    epsilon_max: float | None = None
    epsilon_step: float | None = None
    runs: int = 10_000
    seed: int = 0
    out_dir: str = "results"
    a0: float = 0.05
    af: float = 0.005
    b0: float = 0.1
    bf: float = 0.002
    drift_step: float = 0.0
    workers: int = 0

    def __post_init__(self) -> None:
        self.validate()

    def validate(self) -> None:
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if self.iterations < 1:
            raise ConfigError("iterations must be >= 1")
        if self.runs < 1:
            raise ConfigError("runs must be >= 1")
        if self.shots != "exact":
            if not isinstance(self.shots, int) or isinstance(self.shots, bool) or self.shots < 1:
                raise ConfigError('shots must be a positive integer or "exact"')
        if self.noise_mode not in NOISE_MODES:
            raise ConfigError(f"noise_mode must be one of {NOISE_MODES}")
        if self.epsilon is not None and not 0.0 <= self.epsilon <= 1.0:
            raise ConfigError("epsilon must lie in [0, 1]")
        for prefix in ("m", "epsilon"):
            parts = [getattr(self, f"{prefix}_{s}") for s in ("min", "max", "step")]
            given = [p is not None for p in parts]
            if any(given) and not all(given):
                raise ConfigError(f"{prefix} grid needs {prefix}_min, {prefix}_max and {prefix}_step")
            if all(given) and not _float_grid(*parts):
                raise ConfigError(f"{prefix} grid is empty")
        if self.epsilon_min is not None and not (
            0.0 <= self.epsilon_min <= self.epsilon_max <= 1.0
        ):
            raise ConfigError("epsilon grid must lie in [0, 1]")
        if self.drift_step < 0:
            raise ConfigError("drift_step must be non-negative")
        if self.workers < 0:
            raise ConfigError("workers must be non-negative")
        SpsaMeta(self.a0, self.af, self.b0, self.bf)  # range checks

    def spsa_meta(self) -> SpsaMeta:
        return SpsaMeta(self.a0, self.af, self.b0, self.bf)

    def m_values(self, default: tuple[float, float, float] | None = None) -> list[float]:
        """Mass grid if configured, the single mass otherwise.

        ``default`` supplies a fallback grid for sweep experiments when no
        grid was configured.
        """
        if self.m_min is not None:
            return _float_grid(self.m_min, self.m_max, self.m_step)
        if default is not None:
            return _float_grid(*default)
        return [self.m]

    def epsilon_values(self, default: tuple[float, float, float] | None = None) -> list[float]:
        if self.epsilon_min is not None:
            return _float_grid(self.epsilon_min, self.epsilon_max, self.epsilon_step)
        if self.epsilon is not None:
            return [self.epsilon]
        if default is not None:
            return _float_grid(*default)
        return [0.0]

    def noise_epsilon(self) -> float:
        return self.epsilon if self.epsilon is not None else 0.0

    def resolved(self) -> dict:
        return asdict(self)

    def replace(self, **overrides) -> "ExperimentConfig":
        """Copy with the given fields replaced; unknown names are rejected."""
        data = asdict(self)
        known = {f.name for f in fields(ExperimentConfig)}
        unknown = set(overrides) - known
        if unknown:
            raise ConfigError(f"unknown configuration keys: {sorted(unknown)}")
        data.update(overrides)
        return ExperimentConfig(**data)

    @classmethod
    def from_json(cls, path: str | Path) -> "ExperimentConfig":
        try:
            payload = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON in {path}: {exc}") from exc
        if not isinstance(payload, dict):
            raise ConfigError("configuration file must contain a JSON object")
        known = {f.name for f in fields(cls)}
        unknown = set(payload) - known
        if unknown:
            raise ConfigError(f"unknown configuration keys: {sorted(unknown)}")
        try:
            return cls(**payload)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc
