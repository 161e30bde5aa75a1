#!/usr/bin/env python3
"""
Integration tests for the BMW workbench

These run whole pipelines through the command line entry point and check the
written reports against known values at rank four.
"""

import json
import logging
import os
import shutil
import tempfile
import unittest
from pathlib import Path
from unittest.mock import patch

import pytest

from bmw_workbench.cli import EXIT_OK, main
from config import reset_config

# Skip integration tests if SKIP_INTEGRATION_TESTS env var is set
SKIP_INTEGRATION = os.getenv("SKIP_INTEGRATION_TESTS", "false").lower() == "true"


@pytest.mark.integration
@pytest.mark.skipif(SKIP_INTEGRATION, reason="Integration tests disabled")
class TestRankFourPipelines(unittest.TestCase):
    """Integration tests for the rank four pipelines."""

    def setUp(self):
        """Set up test fixtures."""
        self.temp_dir = Path(tempfile.mkdtemp())
        self.out = self.temp_dir / "reports"
        self.env = patch.dict(os.environ, {
            "BMW_LOG_FILE": str(self.temp_dir / "workbench.log"),
            "BMW_LOG_CONSOLE": "false",
            "BMW_CACHE_DIR": str(self.temp_dir / "cache"),
            "BMW_OUTPUT_DIR": str(self.out),
        })
        self.env.start()
        reset_config()

    def tearDown(self):
        """Clean up test fixtures."""
        logger = logging.getLogger("bmw_workbench")
        for handler in list(logger.handlers):
            logger.removeHandler(handler)
            handler.close()
        reset_config()
        self.env.stop()
        shutil.rmtree(self.temp_dir, ignore_errors=True)

    def load(self, name):
        with open(self.out / name, "r", encoding="utf-8") as f:
            return json.load(f)

    def test_verify_classical(self):
        self.assertEqual(main(["verify", "--r", "4", "--workers", "2", "--csv"]), EXIT_OK)
        report = self.load("verify_r4_classical.json")
        self.assertEqual(report["rank"], 91)
        self.assertEqual(report["expected_rank"], 91)
        self.assertEqual(report["kernel_dim"], 14)
        self.assertEqual(report["ideal_dim"], 14)
        self.assertTrue(report["equal"])
        self.assertEqual(report["witnesses"], [])
        self.assertTrue((self.out / "verify_r4_classical.csv").exists())

    def test_cells(self):
        self.assertEqual(main(["cells", "--r", "4"]), EXIT_OK)
        report = self.load("cells_r4.json")
        self.assertEqual([row["dim_w"] for row in report["rows"]], [1, 3, 2, 3, 1, 6, 6, 3])
        self.assertTrue(all(row["dim_rad"] == 0 for row in report["rows"]))
        self.assertEqual(report["radical_dim"], 0)
        self.assertEqual(report["ideal_dim"], 14)
        self.assertEqual(report["thmrad_zero"], [True, True])
        self.assertEqual(report["lambda0_dims"], report["bratteli_dims"])
        self.assertTrue(report["passed"])

    def test_repeated_runs_are_identical(self):
        first = self.temp_dir / "first"
        second = self.temp_dir / "second"
        self.assertEqual(main(["crux", "--r", "16", "--out", str(first)]), EXIT_OK)
        self.assertEqual(main(["crux", "--r", "16", "--out", str(second)]), EXIT_OK)
        self.assertEqual(
            (first / "crux_r16.json").read_bytes(),
            (second / "crux_r16.json").read_bytes(),
        )


if __name__ == "__main__":
    unittest.main()
