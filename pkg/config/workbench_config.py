"""
Configuration management for the BMW workbench.

This module provides centralized configuration with environment variable
support, validation, and defaults sized for desk-scale runs (r <= 5).
"""

import json
import logging
import logging.handlers
import os
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict, Optional

_TRUTHY = ("true", "1", "yes")


def _default_workers() -> int:
    return max(1, os.cpu_count() or 1)


@dataclass
class LoggingConfig:
    """Logging configuration."""
    level: str = "INFO"
    file_path: str = "bmw_workbench.log"
    max_file_size_mb: int = 10
    backup_count: int = 5
    console_output: bool = True
    format_string: str = "%(asctime)s - %(name)s - %(levelname)s - %(funcName)s:%(lineno)d - %(message)s"


@dataclass
class PerformanceConfig:
    """Worker count, rewrite budget and per-operation rank caps."""
    workers: int = field(default_factory=_default_workers)
    max_rewrite_steps: int = 200000
    max_rank_classical: int = 5
    max_rank_quantum_exact: int = 4
    max_rank_quantum: int = 5
    max_rank_cells: int = 5
    max_rank_radical: int = 6
    max_rank_functor_g: int = 3
    max_rank_combinatorics: int = 64


@dataclass
class CacheConfig:
    """On-disk cache of BMW structure tables."""
    enabled: bool = True
    directory: str = ".bmw_cache"
    code_version: str = "1"


@dataclass
class SamplingConfig:
    """Random specialization points for sampled ranks and kernel reconstruction."""
    points: int = 5
    seed: int = 20240611
    max_height: int = 97
    reconstruction_start: int = 16
    reconstruction_max: int = 256
    oracle_samples: int = 200


@dataclass
class WorkbenchConfig:
    """Main workbench configuration with all subsystem configurations."""

    project_name: str = "bmw-workbench"
    version: str = "1.0.0"
    output_dir: str = "reports"

    logging: LoggingConfig = field(default_factory=LoggingConfig)
    performance: PerformanceConfig = field(default_factory=PerformanceConfig)
    cache: CacheConfig = field(default_factory=CacheConfig)
    sampling: SamplingConfig = field(default_factory=SamplingConfig)

    def __post_init__(self):
        """Post-initialization validation and environment overrides."""
        self._validate_configuration()
        self._load_environment_overrides()

    def _validate_configuration(self):
        """Validate configuration values."""
        valid_levels = ["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]
        if self.logging.level.upper() not in valid_levels:
            raise ValueError(f"Invalid log level: {self.logging.level}")

        if self.performance.workers < 1:
            raise ValueError("Workers must be at least 1")

        if self.sampling.points < 1:
            raise ValueError("Sampling needs at least one point")

        guards = {k: v for k, v in asdict(self.performance).items() if k.startswith("max_")}
        for name, value in guards.items():
            if value < 1:
                raise ValueError(f"{name} must be positive, got {value}")

        if self.sampling.max_height < 2:
            raise ValueError("max_height must be at least 2")

        if self.sampling.points > 2 * (self.sampling.max_height - 1):
            raise ValueError("max_height is too small for the requested number of points")

        if self.sampling.oracle_samples < 1:
            raise ValueError("oracle_samples must be positive")

        if self.sampling.reconstruction_start > self.sampling.reconstruction_max:
            raise ValueError("reconstruction_start exceeds reconstruction_max")

    def _load_environment_overrides(self):
        """Load configuration overrides from BMW_* environment variables."""
        self.logging.level = os.getenv("BMW_LOG_LEVEL", self.logging.level)
        self.logging.file_path = os.getenv("BMW_LOG_FILE", self.logging.file_path)

        if console_env := os.getenv("BMW_LOG_CONSOLE"):
            self.logging.console_output = console_env.lower() in _TRUTHY

        if workers_env := os.getenv("BMW_WORKERS"):
            try:
                self.performance.workers = max(1, int(workers_env))
            except ValueError:
                pass

        self.cache.directory = os.getenv("BMW_CACHE_DIR", self.cache.directory)
        if cache_env := os.getenv("BMW_CACHE_ENABLED"):
            self.cache.enabled = cache_env.lower() in _TRUTHY

        self.output_dir = os.getenv("BMW_OUTPUT_DIR", self.output_dir)

        if seed_env := os.getenv("BMW_SEED"):
            try:
                self.sampling.seed = int(seed_env)
            except ValueError:
                pass

        if points_env := os.getenv("BMW_SAMPLE_POINTS"):
            try:
                points = int(points_env)
                if points >= 1:
                    self.sampling.points = points
            except ValueError:
                pass

    def prepare_directories(self):
        """Create the output, cache and log directories."""
        Path(self.output_dir).mkdir(parents=True, exist_ok=True)
        if self.cache.enabled:
            Path(self.cache.directory).mkdir(parents=True, exist_ok=True)
        log_dir = Path(self.logging.file_path).parent
        if str(log_dir) != ".":
            log_dir.mkdir(parents=True, exist_ok=True)

    def to_dict(self) -> Dict[str, Any]:
        """Convert configuration to dictionary."""
        return {
            "project_name": self.project_name,
            "version": self.version,
            "output_dir": self.output_dir,
            "logging": asdict(self.logging),
            "performance": asdict(self.performance),
            "cache": asdict(self.cache),
            "sampling": asdict(self.sampling),
        }

    @classmethod
    def from_file(cls, config_file: str) -> "WorkbenchConfig":
        """Load configuration from a JSON or YAML file."""
        config_path = Path(config_file)
        if not config_path.exists():
            raise FileNotFoundError(f"Configuration file not found: {config_file}")

        with open(config_path, "r", encoding="utf-8") as f:
            if config_path.suffix.lower() == ".json":
                config_data = json.load(f)
            elif config_path.suffix.lower() in [".yml", ".yaml"]:
                try:
                    import yaml
                except ImportError:
                    raise ImportError("PyYAML is required to load YAML configuration files")
                config_data = yaml.safe_load(f) or {}
            else:
                raise ValueError(f"Unsupported configuration file format: {config_path.suffix}")

        return cls.from_dict(config_data)

    @classmethod
    def from_dict(cls, config_data: Dict[str, Any]) -> "WorkbenchConfig":
        """Create configuration from dictionary."""
        return cls(
            project_name=config_data.get("project_name", "bmw-workbench"),
            version=config_data.get("version", "1.0.0"),
            output_dir=config_data.get("output_dir", "reports"),
            logging=LoggingConfig(**config_data.get("logging", {})),
            performance=PerformanceConfig(**config_data.get("performance", {})),
            cache=CacheConfig(**config_data.get("cache", {})),
            sampling=SamplingConfig(**config_data.get("sampling", {})),
        )

    def save_to_file(self, config_file: str):
        """Save configuration to a file."""
        config_path = Path(config_file)
        config_path.parent.mkdir(parents=True, exist_ok=True)

        with open(config_path, "w", encoding="utf-8") as f:
            if config_path.suffix.lower() == ".json":
                json.dump(self.to_dict(), f, indent=2)
            elif config_path.suffix.lower() in [".yml", ".yaml"]:
                try:
                    import yaml
                except ImportError:
                    raise ImportError("PyYAML is required to save YAML configuration files")
                yaml.dump(self.to_dict(), f, default_flow_style=False, indent=2)
            else:
                raise ValueError(f"Unsupported configuration file format: {config_path.suffix}")


def configure_logging(config: LoggingConfig) -> logging.Logger:
    """Install the rotating file handler and optional console handler on the package logger."""
    logger = logging.getLogger("bmw_workbench")
    logger.setLevel(getattr(logging, config.level.upper()))
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
        handler.close()

    formatter = logging.Formatter(config.format_string)
    if config.file_path:
        log_dir = Path(config.file_path).parent
        if str(log_dir) != ".":
            log_dir.mkdir(parents=True, exist_ok=True)
        file_handler = logging.handlers.RotatingFileHandler(
            config.file_path,
            maxBytes=config.max_file_size_mb * 1024 * 1024,
            backupCount=config.backup_count,
            encoding="utf-8",
        )
        file_handler.setFormatter(formatter)
        logger.addHandler(file_handler)

    if config.console_output:
        console = logging.StreamHandler()
        console.setFormatter(formatter)
        logger.addHandler(console)

    logger.propagate = False
    return logger


# Global configuration instance
_config: Optional[WorkbenchConfig] = None


def get_config() -> WorkbenchConfig:
    """Get the global configuration instance."""
    global _config
    if _config is None:
        _config = WorkbenchConfig()
    return _config


def set_config(config: WorkbenchConfig):
    """Set the global configuration instance."""
    global _config
    _config = config


def load_config_from_file(config_file: str) -> WorkbenchConfig:
    """Load configuration from file and set as global."""
    config = WorkbenchConfig.from_file(config_file)
    set_config(config)
    return config


def reset_config():
    """Reset configuration to defaults."""
    global _config
    _config = None
