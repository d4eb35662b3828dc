"""Configuration management for noonforge."""

from pydantic import field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Application settings."""

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        env_prefix="NOONFORGE_",
        extra="ignore",
    )

    # Fock space capacity
    max_photons: int = 12

    # Logging
    log_level: str = "INFO"
    log_json: bool = True

    # Parallel evaluation (1 keeps everything in-process)
    workers: int = 1

    # Coarse seeding grid over tau0 x tau1 x theta
    grid_tau0: int = 21
    grid_tau1: int = 21
    grid_theta: int = 25

    # Nelder-Mead restarts and termination
    restarts: int = 16
    max_evaluations: int = 20_000
    simplex_tolerance: float = 1e-9
    stall_iterations: int = 150

    # Feasibility thresholds for the lexicographic objective
    fidelity_tolerance: float = 1e-6
    probability_tolerance: float = 1e-6
    penalty_weight: float = 1e6

    # Internal ring system
    condition_limit: float = 1e12

    # Sweeps and manifold exploration
    max_sweep_points: int = 10_000_000
    manifold_samples: int = 8

    @field_validator(
        "max_photons",
        "workers",
        "grid_tau0",
        "grid_tau1",
        "grid_theta",
        "restarts",
        "max_evaluations",
        "stall_iterations",
        "max_sweep_points",
        "manifold_samples",
    )
    @classmethod
    def validate_positive(cls, v: int) -> int:
        """Counts and sizes must be positive."""
        if v < 1:
            raise ValueError("must be a positive integer")
        return v

    @field_validator(
        "simplex_tolerance", "fidelity_tolerance", "probability_tolerance"
    )
    @classmethod
    def validate_tolerance(cls, v: float) -> float:
        """Tolerances live strictly between 0 and 1."""
        if not 0.0 < v < 1.0:
            raise ValueError("tolerance must lie in (0, 1)")
        return v

    @field_validator("penalty_weight", "condition_limit")
    @classmethod
    def validate_large(cls, v: float) -> float:
        """Penalty weight and condition limit must exceed one."""
        if v <= 1.0:
            raise ValueError("must be greater than 1")
        return v

    @property
    def grid_shape(self) -> tuple[int, int, int]:
        """Seeding grid resolution as (tau0, tau1, theta)."""
        return self.grid_tau0, self.grid_tau1, self.grid_theta


def get_settings() -> Settings:
    """Get application settings."""
    return Settings()
