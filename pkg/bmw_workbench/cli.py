"""
Command line entry point: verification pipelines and report emission.

Every command writes a JSON report named after the command and rank into the
output directory and exits 0 only when every check in the pipeline passed.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, Literal, Optional, Sequence, Tuple

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, ValidationError
from sympy import QQ

from config import WorkbenchConfig, configure_logging, get_config, load_config_from_file

from . import __version__
from .bmwq import (
    CODE_VERSION,
    BMWAlgebra,
    cache_path,
    coefficient_support,
    element_support,
    structure_table,
    table_support,
)
from .brauer import BrauerAlgebra, ideal_closure
from .cellular import (
    algebra_radical,
    cell_module,
    check_char_rad,
    composition_factors,
    functor_F,
    functor_G,
    gram_radical,
    is_isomorphic,
    simple_dimension,
    thmrad_check,
)
from .exceptions import ResourceGuardError, WorkbenchError
from .linalg import Subspace
from .partitions import content_sum_outside, lambda0, lambda_r, verify_crux
from .reports import (
    BratteliReport,
    CellRow,
    CellsReport,
    CruxPair,
    CruxReport,
    FailureReport,
    StructureTableDump,
    SupportEntry,
    SupportReport,
    write_csv,
    write_report,
)
from .tensorrep import bratteli, bratteli_dimension, verify_main_theorem

logger = logging.getLogger(__name__)

Command = Literal["verify", "cells", "crux", "bratteli", "support", "bmw-table"]
Outcome = List[Tuple[str, BaseModel, List[Dict[str, Any]]]]

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_INTERRUPTED = 130


class RunConfig(BaseModel):
    """Validated settings of one CLI invocation."""

    model_config = ConfigDict(extra="forbid")

    command: Command
    r: int = Field(default=4, ge=1)
    mode: Literal["classical", "quantum", "both"] = "classical"
    exact: bool = True
    seed: int = 20240611
    points: int = Field(default=5, ge=1)
    out: Path = Path("reports")
    cache: Optional[Path] = None
    workers: int = Field(default=1, ge=1)
    csv: bool = False
    stretch: bool = False

    def modes(self) -> List[str]:
        return ["classical", "quantum"] if self.mode == "both" else [self.mode]

    def check_guards(self, config: WorkbenchConfig):
        """Raise ResourceGuardError when ``r`` exceeds the cap of the command."""
        perf = config.performance
        quantum_cap = perf.max_rank_quantum if self.stretch else perf.max_rank_quantum_exact
        if self.command == "verify":
            if "classical" in self.modes() and self.r > perf.max_rank_classical:
                raise ResourceGuardError("verify --mode classical", self.r, perf.max_rank_classical)
            if "quantum" in self.modes() and self.r > quantum_cap:
                raise ResourceGuardError("verify --mode quantum", self.r, quantum_cap)
        elif self.command == "cells":
            if self.r > perf.max_rank_cells:
                raise ResourceGuardError("cells", self.r, perf.max_rank_cells)
        elif self.command in ("crux", "bratteli"):
            if self.r > perf.max_rank_combinatorics:
                raise ResourceGuardError(self.command, self.r, perf.max_rank_combinatorics)
        elif self.r > quantum_cap:
            raise ResourceGuardError(self.command, self.r, quantum_cap)


# -- commands ---------------------------------------------------------------


def cmd_verify(run: RunConfig, config: WorkbenchConfig) -> Outcome:
    sampling = config.sampling
    out: Outcome = []
    for mode in run.modes():
        exact = run.exact and not (mode == "quantum" and run.r > config.performance.max_rank_quantum_exact)
        report = verify_main_theorem(
            run.r,
            mode,
            exact=exact,
            seed=run.seed,
            points=run.points,
            workers=run.workers,
            height=sampling.max_height,
            start_points=sampling.reconstruction_start,
            max_points=sampling.reconstruction_max,
            oracle_samples=sampling.oracle_samples,
        )
        row = {
            "r": report.r,
            "mode": report.mode,
            "method": report.method,
            "rank": report.rank,
            "expected_rank": report.expected_rank,
            "kernel_dim": report.kernel_dim,
            "ideal_dim": report.ideal_dim,
            "passed": report.passed,
        }
        out.append((f"verify_r{run.r}_{mode}", report, [row]))
    return out


def _ideal(r: int, workers: int) -> Subspace:
    algebra = BrauerAlgebra(r)
    if r < 4:
        return Subspace.zero(algebra.dim, QQ)
    return ideal_closure(algebra, [algebra.phi()], workers=workers)


def cmd_cells(run: RunConfig, config: WorkbenchConfig) -> Outcome:
    r = run.r
    labels = lambda_r(r)
    zero_labels = set(lambda0(r))
    functor_cap = config.performance.max_rank_functor_g
    rows: List[CellRow] = []
    witnesses: List[str] = []
    for lam in labels:
        module = cell_module(r, lam)
        rank, radical = gram_radical(module)
        factors = composition_factors(module, limit=config.performance.max_rank_cells)
        ordered = sorted(factors.items(), key=lambda kv: labels.index(kv[0]))
        for mu, _ in ordered:
            if mu == lam:
                continue
            if mu.size <= lam.size:
                witnesses.append(f"factor L({mu}) of W({lam}) does not have a larger label")
            included, value = content_sum_outside(lam, mu)
            if not included or value != 0:
                witnesses.append(f"factor L({mu}) of W({lam}) fails the content test")
        char_rad = check_char_rad(r, lam)
        if not char_rad:
            witnesses.append(f"radical of W({lam}) differs from the annihilator of B^t")
        functor_ok = None
        if r <= functor_cap:
            lifted = functor_G(module, limit=functor_cap)
            functor_ok = lifted.dim == cell_module(r + 2, lam).dim and is_isomorphic(functor_F(lifted), module)
            if not functor_ok:
                witnesses.append(f"G(W({lam})) is not W_{r + 2}({lam}) or F G(W({lam})) differs from W({lam})")
        rows.append(
            CellRow(
                label=str(lam),
                dim_w=module.dim,
                dim_rad=radical.dim,
                dim_l=rank,
                factors=[(str(mu), m) for mu, m in ordered],
                char_rad=char_rad,
                in_lambda0=lam in zero_labels,
                functor_ok=functor_ok,
            )
        )

    radical = algebra_radical(r, limit=config.performance.max_rank_radical, workers=run.workers)
    ideal = _ideal(r, run.workers)
    zero = Subspace.zero(ideal.ambient, QQ)
    thmrad_ideal = thmrad_check(r, ideal, limit=config.performance.max_rank_cells)
    thmrad_zero = thmrad_check(r, zero, limit=config.performance.max_rank_cells)
    for name, (lhs, rhs) in (("<Phi>", thmrad_ideal), ("0", thmrad_zero)):
        if lhs != rhs:
            witnesses.append(f"radical criterion sides disagree for J = {name}: {lhs} vs {rhs}")

    lambda0_dims = sorted(simple_dimension(r, lam) for lam in lambda0(r))
    bratteli_dims = sorted(bratteli(r).values())
    if lambda0_dims != bratteli_dims:
        witnesses.append(f"simple dimensions {lambda0_dims} differ from multiplicities {bratteli_dims}")

    report = CellsReport(
        r=r,
        rows=rows,
        radical_dim=radical.dim,
        ideal_dim=ideal.dim,
        thmrad_ideal=thmrad_ideal,
        thmrad_zero=thmrad_zero,
        lambda0_dims=lambda0_dims,
        bratteli_dims=bratteli_dims,
        witnesses=witnesses,
        passed=not witnesses,
    )
    return [(f"cells_r{r}", report, [row.model_dump() for row in rows])]


def cmd_crux(run: RunConfig, config: WorkbenchConfig) -> Outcome:
    scan = verify_crux(run.r)
    pairs = [
        CruxPair(lam=str(c.lam), mu=str(c.mu), family=c.family, value=c.value, ok=c.ok) for c in scan.checks
    ]
    report = CruxReport(r=run.r, pairs=pairs, violations=len(scan.violations), passed=not scan.violations)
    return [(f"crux_r{run.r}", report, [p.model_dump() for p in pairs])]


def cmd_bratteli(run: RunConfig, config: WorkbenchConfig) -> Outcome:
    r = run.r
    mult = bratteli(r)
    expected = r + 1 if r >= 2 else 1
    size = len(lambda0(r))
    report = BratteliReport(
        r=r,
        multiplicities=mult,
        components=len(mult),
        dimension=bratteli_dimension(r),
        lambda0_size=size,
        passed=len(mult) == expected and size == expected,
    )
    rows = [{"d": d, "multiplicity": m} for d, m in sorted(mult.items())]
    return [(f"bratteli_r{r}", report, rows)]


def _code_version(config: WorkbenchConfig) -> str:
    """Cache key: the rewriter tag together with the configured suffix."""
    return f"{CODE_VERSION}:{config.cache.code_version}"


def _cache_dir(run: RunConfig, config: WorkbenchConfig) -> Optional[Path]:
    if run.cache is not None:
        return run.cache
    return Path(config.cache.directory) if config.cache.enabled else None


def cmd_support(run: RunConfig, config: WorkbenchConfig) -> Outcome:
    entries = [
        SupportEntry(
            name=row.name,
            value=str(row.value),
            denominator_support=row.support,
            in_localization=row.in_localization,
            laurent=row.laurent,
        )
        for row in coefficient_support()
    ]
    algebra = BMWAlgebra(run.r, config.performance.max_rewrite_steps, limit=run.r)
    table = structure_table(algebra, _cache_dir(run, config), _code_version(config), workers=run.workers)
    table_ok, count = table_support(table)
    elements: Dict[str, bool] = {}
    if run.r >= 4:
        elements = {"Phi_q": element_support(algebra.phi()), "tilde_Phi_q": element_support(algebra.tilde_phi())}
    # the rescaled coefficients are reported, only a, b, c, d must lie in the localization
    asserted = all(e.in_localization for e in entries if not e.name.startswith("tilde_"))
    report = SupportReport(
        entries=entries,
        table_r=run.r,
        table_constants=count,
        table_in_localization=table_ok,
        elements_in_localization=elements,
        passed=asserted and table_ok and all(elements.values()),
    )
    return [(f"support_r{run.r}", report, [e.model_dump() for e in entries])]


def cmd_bmw_table(run: RunConfig, config: WorkbenchConfig) -> Outcome:
    algebra = BMWAlgebra(run.r, config.performance.max_rewrite_steps, limit=run.r)
    cache_dir = _cache_dir(run, config)
    table = structure_table(algebra, cache_dir, _code_version(config), workers=run.workers)
    payload = table.to_payload()
    dump = StructureTableDump(
        r=table.r,
        code_version=table.code_version,
        basis=payload["basis"],
        entries=[(i, j, [(k, text) for k, text in row]) for i, j, row in payload["entries"]],
    )
    if cache_dir is not None:
        logger.info(f"Structure table cache: {cache_path(cache_dir, run.r, _code_version(config))}")
    return [(f"bmw_table_r{run.r}", dump, [])]


COMMANDS: Dict[str, Callable[[RunConfig, WorkbenchConfig], Outcome]] = {
    "verify": cmd_verify,
    "cells": cmd_cells,
    "crux": cmd_crux,
    "bratteli": cmd_bratteli,
    "support": cmd_support,
    "bmw-table": cmd_bmw_table,
}


# -- argument handling ------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bmw-workbench",
        description="Exact verification of tensor-space kernels for Brauer and BMW algebras.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("command", choices=sorted(COMMANDS), help="pipeline to run")
    parser.add_argument("--r", type=int, default=4, help="rank (number of strands)")
    parser.add_argument("--mode", choices=["classical", "quantum", "both"], default="classical")
    exactness = parser.add_mutually_exclusive_group()
    exactness.add_argument("--exact", dest="exact", action="store_true", default=True)
    exactness.add_argument("--sampled", dest="exact", action="store_false")
    parser.add_argument("--seed", type=int, default=None, help="seed for sample points")
    parser.add_argument("--points", type=int, default=None, help="number of sample points")
    parser.add_argument("--out", type=Path, default=None, help="report directory")
    parser.add_argument("--cache", type=Path, default=None, help="structure table cache directory")
    parser.add_argument("--workers", type=int, default=None, help="worker threads")
    parser.add_argument("--config", type=str, default=None, help="JSON or YAML configuration file")
    parser.add_argument("--log-level", choices=["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"], default=None)
    parser.add_argument("--csv", action="store_true", help="write CSV tables next to the JSON reports")
    parser.add_argument("--stretch", action="store_true", help="allow the stretch ranks")
    return parser


def make_run_config(args: argparse.Namespace, config: WorkbenchConfig) -> RunConfig:
    return RunConfig(
        command=args.command,
        r=args.r,
        mode=args.mode,
        exact=args.exact,
        seed=config.sampling.seed if args.seed is None else args.seed,
        points=config.sampling.points if args.points is None else args.points,
        out=Path(config.output_dir) if args.out is None else args.out,
        cache=args.cache,
        workers=config.performance.workers if args.workers is None else args.workers,
        csv=args.csv,
        stretch=args.stretch,
    )


def _write(run: RunConfig, outcome: Outcome) -> bool:
    passed = True
    for name, report, rows in outcome:
        write_report(report, run.out / f"{name}.json")
        if run.csv:
            write_csv(rows, run.out / f"{name}.csv")
        ok = getattr(report, "passed", True)
        if not ok:
            logger.error(f"{name}: checks failed")
        passed = passed and ok
    return passed


def run(run_config: RunConfig, config: WorkbenchConfig) -> int:
    """Execute one command and write its reports; returns the exit code."""
    try:
        run_config.check_guards(config)
        outcome = COMMANDS[run_config.command](run_config, config)
    except WorkbenchError as e:
        logger.error(f"Failed to run {run_config.command} at r={run_config.r}: {e}")
        witness = getattr(e, "witness", None)
        failure = FailureReport(
            command=run_config.command,
            r=run_config.r,
            error=str(e),
            kind=type(e).__name__,
            witness=None if witness is None else str(witness),
        )
        write_report(failure, run_config.out / f"{run_config.command}_r{run_config.r}_error.json")
        return EXIT_FAILED
    return EXIT_OK if _write(run_config, outcome) else EXIT_FAILED


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main entry point."""
    load_dotenv()
    args = build_parser().parse_args(argv)
    try:
        config = load_config_from_file(args.config) if args.config else get_config()
        if args.log_level:
            config.logging.level = args.log_level
        configure_logging(config.logging)
        run_config = make_run_config(args, config)
    except (ValidationError, ValueError, FileNotFoundError, ImportError) as e:
        logger.error(f"Invalid configuration: {e}")
        print(f"bmw-workbench: {e}", file=sys.stderr)
        return EXIT_USAGE

    logger.info(f"Running {run_config.command} at r={run_config.r} ({run_config.mode})")
    try:
        return run(run_config, config)
    except KeyboardInterrupt:
        logger.info("Interrupted by user")
        return EXIT_INTERRUPTED


if __name__ == "__main__":
    sys.exit(main())
