"""
Configuration package for the BMW workbench.
"""

from .workbench_config import (
    CacheConfig,
    LoggingConfig,
    PerformanceConfig,
    SamplingConfig,
    WorkbenchConfig,
    configure_logging,
    get_config,
    load_config_from_file,
    reset_config,
    set_config,
)

__all__ = [
    "CacheConfig",
    "LoggingConfig",
    "PerformanceConfig",
    "SamplingConfig",
    "WorkbenchConfig",
    "configure_logging",
    "get_config",
    "load_config_from_file",
    "reset_config",
    "set_config",
]
