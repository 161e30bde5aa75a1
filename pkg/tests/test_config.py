#!/usr/bin/env python3
"""
Unit tests for workbench configuration

Covers defaults, validation, BMW_* environment overrides, file round trips
and the logging setup.
"""

import json
import logging
import os
import shutil
import tempfile
import unittest
from unittest.mock import patch

import pytest

from config import (
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

try:
    import yaml  # noqa: F401

    HAS_YAML = True
except ImportError:
    HAS_YAML = False


@pytest.mark.unit
class TestWorkbenchConfig(unittest.TestCase):
    """Test cases for workbench configuration."""

    def setUp(self):
        """Set up test fixtures."""
        self.temp_dir = tempfile.mkdtemp()

    def tearDown(self):
        """Clean up test fixtures."""
        shutil.rmtree(self.temp_dir, ignore_errors=True)
        reset_config()

    def test_default_configuration(self):
        """Test default configuration values."""
        with patch.dict(os.environ, {}, clear=True):
            config = WorkbenchConfig()
        self.assertEqual(config.project_name, "bmw-workbench")
        self.assertEqual(config.output_dir, "reports")
        self.assertEqual(config.performance.max_rank_classical, 5)
        self.assertEqual(config.performance.max_rank_quantum_exact, 4)
        self.assertEqual(config.sampling.seed, 20240611)
        self.assertTrue(config.cache.enabled)
        self.assertEqual(config.sampling.max_height, 97)
        self.assertEqual(config.sampling.oracle_samples, 200)
        self.assertEqual(config.performance.max_rank_functor_g, 3)
        self.assertGreaterEqual(config.performance.workers, 1)

    def test_environment_overrides(self):
        """Test BMW_* environment variable overrides."""
        with patch.dict(os.environ, {
            "BMW_LOG_LEVEL": "DEBUG",
            "BMW_LOG_CONSOLE": "false",
            "BMW_WORKERS": "3",
            "BMW_CACHE_ENABLED": "no",
            "BMW_OUTPUT_DIR": "out",
            "BMW_SEED": "11",
            "BMW_SAMPLE_POINTS": "2",
        }):
            config = WorkbenchConfig()
            self.assertEqual(config.logging.level, "DEBUG")
            self.assertFalse(config.logging.console_output)
            self.assertEqual(config.performance.workers, 3)
            self.assertFalse(config.cache.enabled)
            self.assertEqual(config.output_dir, "out")
            self.assertEqual(config.sampling.seed, 11)
            self.assertEqual(config.sampling.points, 2)

    def test_malformed_environment_values_are_ignored(self):
        with patch.dict(os.environ, {"BMW_WORKERS": "many", "BMW_SAMPLE_POINTS": "0"}, clear=True):
            config = WorkbenchConfig()
        self.assertGreaterEqual(config.performance.workers, 1)
        self.assertEqual(config.sampling.points, 5)

    def test_configuration_validation(self):
        """Test configuration validation."""
        with self.assertRaises(ValueError):
            WorkbenchConfig(logging=LoggingConfig(level="LOUD"))
        with self.assertRaises(ValueError):
            WorkbenchConfig(performance=PerformanceConfig(workers=0))
        with self.assertRaises(ValueError):
            WorkbenchConfig(performance=PerformanceConfig(max_rank_cells=0))
        with self.assertRaises(ValueError):
            WorkbenchConfig(sampling=SamplingConfig(points=0))
        with self.assertRaises(ValueError):
            WorkbenchConfig(sampling=SamplingConfig(reconstruction_start=64, reconstruction_max=32))
        with self.assertRaises(ValueError):
            WorkbenchConfig(sampling=SamplingConfig(max_height=1))
        with self.assertRaises(ValueError):
            WorkbenchConfig(sampling=SamplingConfig(points=9, max_height=4))
        with self.assertRaises(ValueError):
            WorkbenchConfig(sampling=SamplingConfig(oracle_samples=0))

    def test_config_serialization(self):
        """Test configuration to_dict."""
        data = WorkbenchConfig().to_dict()
        self.assertIn("performance", data)
        self.assertIn("sampling", data)
        self.assertEqual(data["cache"]["directory"], ".bmw_cache")

    def test_config_from_dict(self):
        """Test creating configuration from a partial dictionary."""
        with patch.dict(os.environ, {}, clear=True):
            config = WorkbenchConfig.from_dict({
                "output_dir": "results",
                "performance": {"max_rank_cells": 4},
                "sampling": {"points": 7},
            })
        self.assertEqual(config.output_dir, "results")
        self.assertEqual(config.performance.max_rank_cells, 4)
        self.assertEqual(config.sampling.points, 7)
        self.assertEqual(config.sampling.seed, 20240611)

    def test_json_file_round_trip(self):
        path = os.path.join(self.temp_dir, "workbench.json")
        with patch.dict(os.environ, {}, clear=True):
            original = WorkbenchConfig(performance=PerformanceConfig(workers=2, max_rank_quantum=4))
            original.save_to_file(path)
            loaded = WorkbenchConfig.from_file(path)
        self.assertEqual(loaded.to_dict(), original.to_dict())
        with open(path, "r", encoding="utf-8") as f:
            self.assertEqual(json.load(f)["performance"]["workers"], 2)

    @unittest.skipUnless(HAS_YAML, "PyYAML not installed")
    def test_yaml_file_round_trip(self):
        path = os.path.join(self.temp_dir, "workbench.yaml")
        with patch.dict(os.environ, {}, clear=True):
            original = WorkbenchConfig(output_dir="yaml-reports")
            original.save_to_file(path)
            loaded = WorkbenchConfig.from_file(path)
        self.assertEqual(loaded.output_dir, "yaml-reports")

    def test_unsupported_format(self):
        path = os.path.join(self.temp_dir, "workbench.toml")
        with open(path, "w", encoding="utf-8") as f:
            f.write("")
        with self.assertRaises(ValueError):
            WorkbenchConfig.from_file(path)
        with self.assertRaises(ValueError):
            WorkbenchConfig().save_to_file(path)

    def test_missing_file(self):
        with self.assertRaises(FileNotFoundError):
            WorkbenchConfig.from_file(os.path.join(self.temp_dir, "absent.json"))

    def test_prepare_directories(self):
        config = WorkbenchConfig()
        config.output_dir = os.path.join(self.temp_dir, "reports")
        config.cache.directory = os.path.join(self.temp_dir, "cache")
        config.logging.file_path = os.path.join(self.temp_dir, "logs", "run.log")
        config.prepare_directories()
        for name in ("reports", "cache", "logs"):
            self.assertTrue(os.path.isdir(os.path.join(self.temp_dir, name)), name)


@pytest.mark.unit
class TestGlobalConfig(unittest.TestCase):
    """Test cases for the global configuration instance."""

    def setUp(self):
        self.temp_dir = tempfile.mkdtemp()
        reset_config()

    def tearDown(self):
        shutil.rmtree(self.temp_dir, ignore_errors=True)
        reset_config()

    def test_singleton(self):
        self.assertIs(get_config(), get_config())
        custom = WorkbenchConfig(output_dir="elsewhere")
        set_config(custom)
        self.assertIs(get_config(), custom)
        reset_config()
        self.assertIsNot(get_config(), custom)

    def test_load_config_from_file(self):
        path = os.path.join(self.temp_dir, "workbench.json")
        with open(path, "w", encoding="utf-8") as f:
            json.dump({"sampling": {"seed": 5}}, f)
        with patch.dict(os.environ, {}, clear=True):
            config = load_config_from_file(path)
        self.assertIs(get_config(), config)
        self.assertEqual(config.sampling.seed, 5)


@pytest.mark.unit
class TestConfigureLogging(unittest.TestCase):
    """Test cases for the package logger setup."""

    def setUp(self):
        self.temp_dir = tempfile.mkdtemp()
        self.logger = logging.getLogger("bmw_workbench")

    def tearDown(self):
        for handler in list(self.logger.handlers):
            self.logger.removeHandler(handler)
            handler.close()
        shutil.rmtree(self.temp_dir, ignore_errors=True)

    def test_file_handler_only(self):
        path = os.path.join(self.temp_dir, "logs", "workbench.log")
        logger = configure_logging(LoggingConfig(level="DEBUG", file_path=path, console_output=False))
        self.assertIs(logger, self.logger)
        self.assertEqual(logger.level, logging.DEBUG)
        self.assertEqual(len(logger.handlers), 1)
        self.assertFalse(logger.propagate)

        logging.getLogger("bmw_workbench.cli").info("hello")
        logger.handlers[0].flush()
        with open(path, "r", encoding="utf-8") as f:
            self.assertIn("hello", f.read())

    def test_reconfiguring_replaces_handlers(self):
        path = os.path.join(self.temp_dir, "workbench.log")
        configure_logging(LoggingConfig(file_path=path, console_output=True))
        configure_logging(LoggingConfig(file_path=path, console_output=True))
        self.assertEqual(len(self.logger.handlers), 2)


if __name__ == "__main__":
    unittest.main()
