"""
Report models emitted by the command line pipelines.

Every report is a pydantic model; fields are declared in the order they are
written so identical runs produce byte-identical JSON.
"""

import csv
import logging
from pathlib import Path
from typing import Any, Dict, List, Literal, Mapping, Optional, Sequence, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field

logger = logging.getLogger(__name__)

Mode = Literal["classical", "quantum"]
Method = Literal["exact", "sampled"]


class _Report(BaseModel):
    model_config = ConfigDict(extra="forbid")


class RelationCheck(_Report):
    name: str
    passed: bool


class RelationReport(_Report):
    r: int
    setting: str
    checks: List[RelationCheck] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    @property
    def failures(self) -> List[str]:
        return [check.name for check in self.checks if not check.passed]


class VerifyReport(_Report):
    """Outcome of comparing the kernel of a tensor representation with the ideal of Phi."""

    r: int
    mode: Mode
    method: Method
    rank: int
    expected_rank: int
    kernel_dim: int
    ideal_dim: int
    equal: bool
    annihilated: List[str] = Field(default_factory=list)
    lambda0: List[str] = Field(default_factory=list)
    sample_points: List[str] = Field(default_factory=list)
    relations: List[RelationReport] = Field(default_factory=list)
    witnesses: List[str] = Field(default_factory=list)
    passed: bool = False


class CellRow(_Report):
    label: str
    dim_w: int
    dim_rad: int
    dim_l: int
    factors: List[Tuple[str, int]] = Field(default_factory=list)
    char_rad: bool = True
    in_lambda0: bool = False
    functor_ok: Optional[bool] = None


class CellsReport(_Report):
    r: int
    rows: List[CellRow] = Field(default_factory=list)
    radical_dim: int = 0
    ideal_dim: int = 0
    thmrad_ideal: Tuple[bool, bool] = (False, False)
    thmrad_zero: Tuple[bool, bool] = (False, False)
    lambda0_dims: List[int] = Field(default_factory=list)
    bratteli_dims: List[int] = Field(default_factory=list)
    witnesses: List[str] = Field(default_factory=list)
    passed: bool = False


class CruxPair(_Report):
    lam: str
    mu: str
    family: str
    value: int
    ok: bool


class CruxReport(_Report):
    r: int
    pairs: List[CruxPair] = Field(default_factory=list)
    violations: int = 0
    passed: bool = False


class BratteliReport(_Report):
    r: int
    multiplicities: Dict[int, int] = Field(default_factory=dict)
    components: int = 0
    dimension: int = 0
    lambda0_size: int = 0
    passed: bool = False


class SupportEntry(_Report):
    name: str
    value: str
    denominator_support: List[str] = Field(default_factory=list)
    in_localization: bool
    laurent: bool


class SupportReport(_Report):
    entries: List[SupportEntry] = Field(default_factory=list)
    table_r: Optional[int] = None
    table_constants: int = 0
    table_in_localization: bool = True
    elements_in_localization: Dict[str, bool] = Field(default_factory=dict)
    passed: bool = False


class StructureTableDump(_Report):
    r: int
    code_version: str
    basis: List[str]
    entries: List[Tuple[int, int, List[Tuple[int, str]]]]


class FailureReport(_Report):
    """Written in place of the regular report when a pipeline raises."""

    command: str
    r: int
    error: str
    kind: str
    witness: Optional[str] = None
    passed: bool = False


AnyReport = Union[
    VerifyReport,
    RelationReport,
    CellsReport,
    CruxReport,
    BratteliReport,
    SupportReport,
    StructureTableDump,
    FailureReport,
]


def write_report(report: BaseModel, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(report.model_dump_json(indent=2) + "\n", encoding="utf-8")
    logger.info(f"Report written to {path}")
    return path


def write_csv(rows: Sequence[Mapping[str, Any]], path: Union[str, Path]) -> Optional[Path]:
    """Write ``rows`` as CSV with the keys of the first row as header; nothing for no rows."""
    if not rows:
        return None
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.DictWriter(handle, fieldnames=list(rows[0].keys()), lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: _cell(v) for k, v in row.items()})
    logger.info(f"CSV table written to {path}")
    return path


def _cell(value: Any) -> Any:
    if isinstance(value, (list, tuple)):
        return " ".join(":".join(map(str, v)) if isinstance(v, (list, tuple)) else str(v) for v in value)
    return value
