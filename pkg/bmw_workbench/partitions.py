"""
Partitions, Young diagrams, the poset of cell labels and the content criterion.

Young diagrams are sets of 1-based ``(row, column)`` boxes and the content of a
box is ``column - row``.
"""

import logging
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import accumulate
from math import factorial
from typing import FrozenSet, Iterator, List, Literal, Optional, Tuple

logger = logging.getLogger(__name__)

Box = Tuple[int, int]
Dominance = Literal["greater", "less", "equal", "incomparable"]
CruxFamily = Literal["one-row", "hook", "single-column"]


@dataclass(frozen=True, order=False)
class Partition:
    """A weakly decreasing tuple of positive parts; ``Partition(())`` is the empty partition."""

    parts: Tuple[int, ...] = ()

    def __post_init__(self):
        parts = tuple(int(p) for p in self.parts)
        if any(p <= 0 for p in parts):
            raise ValueError(f"Partition parts must be positive: {parts}")
        if any(parts[i] < parts[i + 1] for i in range(len(parts) - 1)):
            raise ValueError(f"Partition {parts} is not in decreasing order.")
        object.__setattr__(self, "parts", parts)

    @classmethod
    def of(cls, *parts: int) -> "Partition":
        return cls(tuple(parts))

    @property
    def size(self) -> int:
        return sum(self.parts)

    def __len__(self) -> int:
        return len(self.parts)

    def boxes(self) -> FrozenSet[Box]:
        return frozenset((i, j) for i, row in enumerate(self.parts, start=1) for j in range(1, row + 1))

    def conjugate(self) -> "Partition":
        if not self.parts:
            return self
        return Partition(tuple(sum(1 for p in self.parts if p > j) for j in range(self.parts[0])))

    def is_hook(self) -> bool:
        return len(self.parts) <= 1 or all(p == 1 for p in self.parts[1:])

    def __str__(self) -> str:
        return ",".join(str(p) for p in self.parts) if self.parts else "∅"

    def __repr__(self) -> str:
        return f"Partition({self})"

    @classmethod
    def parse(cls, text: str) -> "Partition":
        text = text.strip().strip("()")
        if text in ("", "∅"):
            return cls()
        return cls(tuple(int(p) for p in text.split(",") if p.strip()))


EMPTY = Partition()


def content(box: Box) -> int:
    row, col = box
    return col - row


def partitions_of(n: int) -> List[Partition]:
    """All partitions of ``n`` in reverse lexicographic order, ``(n)`` first."""
    return [Partition(p) for p in _partitions(n, n)]


@lru_cache(maxsize=None)
def _partitions(n: int, largest: int) -> Tuple[Tuple[int, ...], ...]:
    if n == 0:
        return ((),)
    out: List[Tuple[int, ...]] = []
    for first in range(min(n, largest), 0, -1):
        for rest in _partitions(n - first, first):
            out.append((first,) + rest)
    return tuple(out)


def dominance(lam: Partition, mu: Partition) -> Dominance:
    """Compare two partitions in the dominance order."""
    if lam == mu:
        return "equal"
    if lam.size != mu.size:
        return "incomparable"
    width = max(len(lam), len(mu))
    a = list(accumulate(lam.parts + (0,) * (width - len(lam))))
    b = list(accumulate(mu.parts + (0,) * (width - len(mu))))
    if all(x >= y for x, y in zip(a, b)):
        return "greater"
    if all(x <= y for x, y in zip(a, b)):
        return "less"
    return "incomparable"


@dataclass(frozen=True)
class LambdaR:
    """Labels of the cell modules of the rank-``r`` Brauer algebra."""

    r: int
    members: Tuple[Partition, ...] = field(default=())

    def __contains__(self, lam: object) -> bool:
        return lam in self.members

    def __iter__(self) -> Iterator[Partition]:
        return iter(self.members)

    def __len__(self) -> int:
        return len(self.members)

    @staticmethod
    def greater(mu: Partition, lam: Partition) -> bool:
        """Strict order: bigger partitions first, ties broken by dominance."""
        if mu.size != lam.size:
            return mu.size > lam.size
        return dominance(mu, lam) == "greater"

    def index(self, lam: Partition) -> int:
        return self.members.index(lam)


def lambda_r(r: int) -> LambdaR:
    if r < 0:
        raise ValueError(f"rank must be non-negative, got {r}")
    members: List[Partition] = []
    for t in range(r, -1, -2):
        members.extend(partitions_of(t))
    return LambdaR(r, tuple(members))


def lambda0(r: int) -> List[Partition]:
    """One-row and two-row hooks of admissible size, with 1^3 for odd r >= 3."""
    if r < 1:
        raise ValueError(f"lambda0 expects r >= 1, got {r}")
    out: List[Partition] = []
    for t in range(r, -1, -2):
        out.append(Partition((t,)) if t else EMPTY)
        if t >= 2:
            out.append(Partition((t - 1, 1)))
        if t == 3:
            out.append(Partition((1, 1, 1)))
    return out


def lambda1(r: int) -> List[Partition]:
    zero = set(lambda0(r))
    return [lam for lam in lambda_r(r) if lam not in zero]


def content_sum_outside(lam: Partition, mu: Partition) -> Tuple[bool, Optional[int]]:
    """Return ``(Y(lam) <= Y(mu), |mu| - |lam| + sum of contents of Y(mu) \\ Y(lam))``."""
    inner, outer = lam.boxes(), mu.boxes()
    if not inner <= outer:
        return False, None
    return True, mu.size - lam.size + sum(content(b) for b in outer - inner)


def classify_crux_pair(lam: Partition, mu: Partition) -> CruxFamily:
    if len(mu) <= 1:
        return "one-row"
    if mu == Partition((1, 1, 1)):
        return "single-column"
    return "hook"


@dataclass(frozen=True)
class CruxCheck:
    lam: Partition
    mu: Partition
    family: CruxFamily
    value: int

    @property
    def ok(self) -> bool:
        return self.value != 0


@dataclass(frozen=True)
class CruxScan:
    r: int
    checks: Tuple[CruxCheck, ...]

    @property
    def violations(self) -> List[CruxCheck]:
        return [c for c in self.checks if not c.ok]

    def value(self, lam: Partition, mu: Partition) -> int:
        for c in self.checks:
            if c.lam == lam and c.mu == mu:
                return c.value
        raise KeyError(f"pair ({lam}) -> ({mu}) was not scanned at r = {self.r}")


def verify_crux(r: int) -> CruxScan:
    """Scan all nested pairs in lambda0(r) for a vanishing content sum."""
    labels = lambda0(r)
    checks: List[CruxCheck] = []
    for lam in labels:
        for mu in labels:
            if mu == lam:
                continue
            included, value = content_sum_outside(lam, mu)
            if not included:
                continue
            checks.append(CruxCheck(lam, mu, classify_crux_pair(lam, mu), value))
    scan = CruxScan(r, tuple(checks))
    if scan.violations:
        logger.error(f"Content criterion violated at r={r}: {scan.violations}")
    else:
        logger.debug(f"Crux scan r={r}: {len(checks)} pairs, no violations")
    return scan


def dhw_compatible(lam: Partition, mu: Partition) -> bool:
    """Necessary condition for L(mu) to be a composition factor of W(lam)."""
    included, value = content_sum_outside(lam, mu)
    return included and value == 0


def standard_tableaux_count(lam: Partition) -> int:
    """Hook length formula."""
    conj = lam.conjugate().parts
    hooks = 1
    for i, row in enumerate(lam.parts):
        for j in range(row):
            hooks *= (row - j - 1) + (conj[j] - i - 1) + 1
    return factorial(lam.size) // hooks

