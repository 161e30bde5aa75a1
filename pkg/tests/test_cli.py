"""
Tests for the command line surface: argument parsing, run settings, resource
guards and the reports written by each pipeline.
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
from pydantic import ValidationError

from bmw_workbench.cli import (
    COMMANDS,
    EXIT_FAILED,
    EXIT_OK,
    EXIT_USAGE,
    RunConfig,
    build_parser,
    main,
    make_run_config,
)
from bmw_workbench.bmwq import CODE_VERSION
from bmw_workbench.exceptions import ResourceGuardError
from bmw_workbench.tensorrep import verify_main_theorem
from config import WorkbenchConfig, reset_config


class CliTestCase(unittest.TestCase):
    """Runs every command against a private output, cache and log location."""

    def setUp(self):
        self.temp_dir = Path(tempfile.mkdtemp())
        self.out = self.temp_dir / "reports"
        self.env = patch.dict(os.environ, {
            "BMW_LOG_FILE": str(self.temp_dir / "workbench.log"),
            "BMW_LOG_CONSOLE": "false",
            "BMW_CACHE_DIR": str(self.temp_dir / "cache"),
            "BMW_OUTPUT_DIR": str(self.out),
            "BMW_WORKERS": "1",
        })
        self.env.start()
        reset_config()

    def tearDown(self):
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


@pytest.mark.unit
class TestArguments(CliTestCase):
    """Test cases for the parser and the validated run settings."""

    def test_commands(self):
        self.assertEqual(set(COMMANDS), {"verify", "cells", "crux", "bratteli", "support", "bmw-table"})

    def test_defaults_come_from_configuration(self):
        args = build_parser().parse_args(["verify"])
        config = WorkbenchConfig()
        run = make_run_config(args, config)
        self.assertEqual(run.r, 4)
        self.assertEqual(run.mode, "classical")
        self.assertTrue(run.exact)
        self.assertEqual(run.seed, config.sampling.seed)
        self.assertEqual(run.out, self.out)
        self.assertEqual(run.workers, 1)

    def test_sampled_flag(self):
        args = build_parser().parse_args(["verify", "--r", "5", "--mode", "both", "--sampled", "--seed", "3"])
        run = make_run_config(args, WorkbenchConfig())
        self.assertFalse(run.exact)
        self.assertEqual(run.seed, 3)
        self.assertEqual(run.modes(), ["classical", "quantum"])

    def test_unknown_command(self):
        with patch("sys.stderr"):
            with self.assertRaises(SystemExit) as ctx:
                build_parser().parse_args(["draw"])
        self.assertEqual(ctx.exception.code, 2)

    def test_run_config_validation(self):
        with self.assertRaises(ValidationError):
            RunConfig(command="verify", r=0)
        with self.assertRaises(ValidationError):
            RunConfig(command="verify", points=0)
        with self.assertRaises(ValidationError):
            RunConfig(command="plot")


@pytest.mark.unit
class TestGuards(CliTestCase):
    """Test cases for the per-command rank caps."""

    def test_classical_cap(self):
        config = WorkbenchConfig()
        RunConfig(command="verify", r=5).check_guards(config)
        with self.assertRaises(ResourceGuardError):
            RunConfig(command="verify", r=6).check_guards(config)

    def test_quantum_needs_stretch_at_rank_five(self):
        config = WorkbenchConfig()
        with self.assertRaises(ResourceGuardError):
            RunConfig(command="verify", r=5, mode="quantum").check_guards(config)
        RunConfig(command="verify", r=5, mode="quantum", stretch=True).check_guards(config)

    def test_combinatorics_cap(self):
        config = WorkbenchConfig()
        RunConfig(command="crux", r=64).check_guards(config)
        with self.assertRaises(ResourceGuardError):
            RunConfig(command="bratteli", r=65).check_guards(config)

    def test_cells_cap(self):
        with self.assertRaises(ResourceGuardError):
            RunConfig(command="cells", r=6).check_guards(WorkbenchConfig())


@pytest.mark.unit
class TestMain(CliTestCase):
    """Test cases for running pipelines end to end."""

    def test_crux(self):
        self.assertEqual(main(["crux", "--r", "12", "--csv"]), EXIT_OK)
        report = self.load("crux_r12.json")
        self.assertEqual(report["r"], 12)
        self.assertEqual(report["violations"], 0)
        self.assertTrue(report["passed"])
        self.assertTrue(report["pairs"])
        self.assertTrue((self.out / "crux_r12.csv").exists())

    def test_bratteli(self):
        self.assertEqual(main(["bratteli", "--r", "10"]), EXIT_OK)
        report = self.load("bratteli_r10.json")
        self.assertEqual(report["components"], 11)
        self.assertEqual(report["lambda0_size"], 11)
        self.assertTrue(report["passed"])

    def test_bratteli_rank_one(self):
        self.assertEqual(main(["bratteli", "--r", "1"]), EXIT_OK)
        self.assertEqual(self.load("bratteli_r1.json")["multiplicities"], {"2": 1})

    def test_explicit_output_directory(self):
        other = self.temp_dir / "elsewhere"
        self.assertEqual(main(["bratteli", "--r", "4", "--out", str(other)]), EXIT_OK)
        self.assertTrue((other / "bratteli_r4.json").exists())
        self.assertFalse((self.out / "bratteli_r4.json").exists())

    def test_verify_both_modes(self):
        self.assertEqual(main(["verify", "--r", "3", "--mode", "both"]), EXIT_OK)
        classical = self.load("verify_r3_classical.json")
        quantum = self.load("verify_r3_quantum.json")
        self.assertEqual(classical["rank"], 15)
        self.assertEqual(quantum["method"], "exact")
        self.assertTrue(classical["passed"] and quantum["passed"])

    def test_support(self):
        cache = self.temp_dir / "tables"
        self.assertEqual(main(["support", "--r", "2", "--cache", str(cache)]), EXIT_OK)
        report = self.load("support_r2.json")
        names = [entry["name"] for entry in report["entries"]]
        self.assertEqual(names[:4], ["a", "b", "c", "d"])
        self.assertTrue(report["table_in_localization"])
        self.assertTrue(any(cache.iterdir()))

    def test_bmw_table(self):
        self.assertEqual(main(["bmw-table", "--r", "2"]), EXIT_OK)
        dump = self.load("bmw_table_r2.json")
        self.assertEqual(len(dump["basis"]), 3)
        self.assertEqual(len(dump["entries"]), 9)
        self.assertEqual(dump["code_version"], f"{CODE_VERSION}:1")

    def test_cache_key_follows_the_rewriter_tag(self):
        cache = self.temp_dir / "tables"
        self.assertEqual(main(["bmw-table", "--r", "2", "--cache", str(cache)]), EXIT_OK)
        first = set(cache.iterdir())
        self.assertEqual(len(first), 1)
        with patch("bmw_workbench.cli.CODE_VERSION", "rewritten"):
            self.assertEqual(main(["bmw-table", "--r", "2", "--cache", str(cache)]), EXIT_OK)
        self.assertEqual(len(set(cache.iterdir()) - first), 1)
        self.assertEqual(self.load("bmw_table_r2.json")["code_version"], "rewritten:1")

    def test_support_reports_phi_q_only_from_rank_four(self):
        self.assertEqual(main(["support", "--r", "3"]), EXIT_OK)
        self.assertEqual(self.load("support_r3.json")["elements_in_localization"], {})

    def test_verify_passes_sampling_settings(self):
        path = self.temp_dir / "workbench.json"
        sampling = {"max_height": 40, "reconstruction_start": 8, "reconstruction_max": 64, "oracle_samples": 30}
        path.write_text(json.dumps({"sampling": sampling}), encoding="utf-8")
        with patch("bmw_workbench.cli.verify_main_theorem", wraps=verify_main_theorem) as spy:
            code = main(["verify", "--r", "3", "--mode", "quantum", "--config", str(path)])
        self.assertEqual(code, EXIT_OK)
        kwargs = spy.call_args.kwargs
        self.assertEqual(kwargs["height"], 40)
        self.assertEqual(kwargs["start_points"], 8)
        self.assertEqual(kwargs["max_points"], 64)
        self.assertEqual(kwargs["oracle_samples"], 30)
        settings = [rep["setting"] for rep in self.load("verify_r3_quantum.json")["relations"]]
        self.assertIn("bmw-oracles", settings)

    def test_cells_checks_the_functors_up_to_the_cap(self):
        self.assertEqual(main(["cells", "--r", "3"]), EXIT_OK)
        rows = self.load("cells_r3.json")["rows"]
        self.assertTrue(rows)
        self.assertTrue(all(row["functor_ok"] is True for row in rows))

    def test_functor_cap_comes_from_configuration(self):
        path = self.temp_dir / "workbench.json"
        path.write_text(json.dumps({"performance": {"max_rank_functor_g": 2}}), encoding="utf-8")
        self.assertEqual(main(["cells", "--r", "3", "--config", str(path)]), EXIT_OK)
        self.assertTrue(all(row["functor_ok"] is None for row in self.load("cells_r3.json")["rows"]))

    def test_guard_failure_writes_error_report(self):
        self.assertEqual(main(["verify", "--r", "6"]), EXIT_FAILED)
        failure = self.load("verify_r6_error.json")
        self.assertEqual(failure["kind"], "ResourceGuardError")
        self.assertFalse(failure["passed"])
        self.assertFalse((self.out / "verify_r6_classical.json").exists())

    def test_invalid_settings(self):
        with patch("sys.stderr"):
            self.assertEqual(main(["verify", "--points", "0"]), EXIT_USAGE)
            self.assertEqual(main(["crux", "--r", "0"]), EXIT_USAGE)

    def test_missing_config_file(self):
        with patch("sys.stderr"):
            self.assertEqual(main(["crux", "--config", str(self.temp_dir / "absent.json")]), EXIT_USAGE)

    def test_config_file(self):
        path = self.temp_dir / "workbench.json"
        path.write_text(json.dumps({"performance": {"max_rank_combinatorics": 8}}), encoding="utf-8")
        self.assertEqual(main(["crux", "--r", "9", "--config", str(path)]), EXIT_FAILED)
        self.assertEqual(self.load("crux_r9_error.json")["kind"], "ResourceGuardError")

    def test_log_file_is_written(self):
        main(["bratteli", "--r", "2", "--log-level", "DEBUG"])
        for handler in logging.getLogger("bmw_workbench").handlers:
            handler.flush()
        self.assertIn("Running bratteli", (self.temp_dir / "workbench.log").read_text(encoding="utf-8"))


if __name__ == "__main__":
    unittest.main()
