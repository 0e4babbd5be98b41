"""Configuration and settings management."""

import os
from pathlib import Path
from typing import Optional

import yaml
from dotenv import load_dotenv
from pydantic import BaseModel, Field

load_dotenv()

class PrecisionConfig(BaseModel):
    """Special-function precision defaults."""
    rel_tol: float = Field(default=1e-8)
    abs_tol: float = Field(default=1e-12)
    max_contour_nodes: int = Field(default=4096)
    max_series_terms: int = Field(default=200)
    series_tol: float = Field(default=1e-12)

class QuadratureConfig(BaseModel):
    """Direct quadrature of the metric integrals."""
    rel_tol: float = Field(default=1e-8)
    abs_tol: float = Field(default=1e-12)
    max_nodes: int = Field(default=20000)

class MonteCarloConfig(BaseModel):
    """Monte-Carlo defaults."""
    n_samples: int = Field(default=10_000_000)
    seed: int = Field(default=20240521)
    n_streams: int = Field(default=1)
    n_batches: int = Field(default=100)
    confidence: float = Field(default=0.99)
    fso_sampler: str = Field(default="inverse")
    table_points: int = Field(default=512)
    table_tol: float = Field(default=1e-6, description="Max inverse-CDF table error at cell midpoints")

class FigureConfig(BaseModel):
    """Figure reproduction sweeps."""
    out_dir: Path = Field(default=Path("results/figures"))
    sweep_points: int = Field(default=9)
    methods: list[str] = Field(default_factory=lambda: ["quadrature", "monte_carlo"])
    mc_samples: int = Field(default=1_000_000)

class Settings(BaseModel):
    """Application settings."""
    results_dir: Path = Field(default=Path("results"))
    logs_dir: Path = Field(default=Path("results/logs"))
    log_level: str = Field(default="INFO")
    workers: int = Field(default=4)

    precision: PrecisionConfig = Field(default_factory=PrecisionConfig)
    quadrature: QuadratureConfig = Field(default_factory=QuadratureConfig)
    montecarlo: MonteCarloConfig = Field(default_factory=MonteCarloConfig)
    figures: FigureConfig = Field(default_factory=FigureConfig)

    @classmethod
    def load(cls, config_path: Optional[Path] = None) -> "Settings":
        """Load settings from environment and config file."""
        if config_path is None:
            config_path = Path("config.yaml")

        config_data = {}
        if config_path.exists():
            with open(config_path, 'r') as f:
                config_data = yaml.safe_load(f) or {}

        env_log_level = os.getenv("LOG_LEVEL")
        if env_log_level:
            config_data["log_level"] = env_log_level

        env_results_dir = os.getenv("RF_FSO_RESULTS_DIR")
        if env_results_dir:
            config_data["results_dir"] = env_results_dir

        env_workers = os.getenv("RF_FSO_WORKERS")
        if env_workers:
            config_data["workers"] = int(env_workers)

        env_samples = os.getenv("RF_FSO_MC_SAMPLES")
        if env_samples:
            config_data.setdefault("montecarlo", {})["n_samples"] = int(env_samples)

        env_seed = os.getenv("RF_FSO_SEED")
        if env_seed:
            config_data.setdefault("montecarlo", {})["seed"] = int(env_seed)

        return cls(**config_data)

    def ensure_directories(self):
        """Ensure all output directories exist."""
        for dir_path in [self.results_dir, self.logs_dir, self.figures.out_dir]:
            dir_path.mkdir(parents=True, exist_ok=True)

settings = Settings.load()
