"""
Exact linear algebra helpers on top of sympy's ``DomainMatrix``.

Vectors are sparse ``{column: element}`` dicts over a sympy domain, ``QQ`` for
the classical side and ``QF`` (the field QQ(q)) for the quantum side. Subspaces
are kept in reduced row echelon form, which is canonical, so equality of
subspaces is equality of their echelon bases.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple, TypeVar

from sympy import QQ
from sympy.polys.matrices import DomainMatrix

from .scalars import FIELD, LaurentPoly, ScalarQ

logger = logging.getLogger(__name__)

QF = FIELD.to_domain()

Vector = Dict[int, Any]
T = TypeVar("T")
R = TypeVar("R")


def to_domain_element(value: Any, domain) -> Any:
    """Convert an int, QQ element, LaurentPoly or ScalarQ into ``domain``."""
    if domain == QF:
        if isinstance(value, ScalarQ):
            return value.frac
        if isinstance(value, LaurentPoly):
            return value.to_frac()
        return FIELD.ground_new(QQ.convert(value))
    if isinstance(value, (ScalarQ, LaurentPoly)):
        raise TypeError(f"{value!r} is not a rational number")
    return domain.convert(value)


def matrix_from_rows(rows: Sequence[Vector], ncols: int, domain) -> DomainMatrix:
    dod = {i: dict(row) for i, row in enumerate(rows) if row}
    return DomainMatrix.from_dod(dod, (len(rows), ncols), domain)


def rows_of(matrix: DomainMatrix) -> List[Vector]:
    dod = matrix.to_dod()
    return [dict(dod.get(i, {})) for i in range(matrix.shape[0])]


def nonzero_dod(matrix: DomainMatrix) -> Dict[int, Dict[int, Any]]:
    """``to_dod`` without stored zeros or empty rows."""
    out: Dict[int, Dict[int, Any]] = {}
    for i, row in matrix.to_dod().items():
        kept = {j: v for j, v in row.items() if v}
        if kept:
            out[i] = kept
    return out


def mat_vec(matrix: DomainMatrix, vec: Vector) -> Vector:
    """``matrix * vec`` for a sparse column vector."""
    zero = matrix.domain.zero
    out: Vector = {}
    for i, row in matrix.to_dod().items():
        total = zero
        for j, value in row.items():
            x = vec.get(j)
            if x is not None:
                total += value * x
        if total:
            out[i] = total
    return out


def transpose_rows(rows: Sequence[Vector], ncols: int) -> List[Vector]:
    out: List[Vector] = [dict() for _ in range(ncols)]
    for i, row in enumerate(rows):
        for j, value in row.items():
            out[j][i] = value
    return out


def rref_rows(rows: Sequence[Vector], ncols: int, domain) -> Tuple[List[Vector], Tuple[int, ...]]:
    """Reduced row echelon basis (zero rows dropped) and pivot columns."""
    rows = [row for row in rows if row]
    if not rows:
        return [], ()
    reduced, pivots = matrix_from_rows(rows, ncols, domain).rref()
    out = rows_of(reduced)[: len(pivots)]
    return out, tuple(pivots)


def rank(rows: Sequence[Vector], ncols: int, domain) -> int:
    return len(rref_rows(rows, ncols, domain)[1])


def nullspace_from_rref(reduced: Sequence[Vector], pivots: Sequence[int], ncols: int, domain) -> List[Vector]:
    """Basis of ``{x : A x = 0}`` from the echelon form of ``A``; one vector per free column."""
    pivot_set = set(pivots)
    free = [j for j in range(ncols) if j not in pivot_set]
    by_free: Dict[int, Vector] = {f: {f: domain.one} for f in free}
    for row, p in zip(reduced, pivots):
        for j, value in row.items():
            if j != p and j in by_free:
                by_free[j][p] = -value
    return [by_free[f] for f in free]


def nullspace(rows: Sequence[Vector], ncols: int, domain) -> List[Vector]:
    """Right kernel of the matrix with the given rows."""
    reduced, pivots = rref_rows(rows, ncols, domain)
    return nullspace_from_rref(reduced, pivots, ncols, domain)


def left_kernel(rows: Sequence[Vector], ncols: int, domain) -> List[Vector]:
    """Coefficient vectors ``c`` with ``sum_i c_i rows[i] = 0``."""
    return nullspace(transpose_rows(rows, ncols), len(rows), domain)


def combine(coeffs: Vector, rows: Sequence[Vector], domain) -> Vector:
    out: Vector = {}
    for i, c in coeffs.items():
        if not c:
            continue
        for j, value in rows[i].items():
            s = out.get(j, domain.zero) + c * value
            if s:
                out[j] = s
            else:
                out.pop(j, None)
    return out


def parallel_map(fn: Callable[[T], R], items: Iterable[T], workers: int = 1) -> List[R]:
    """Order-preserving map, threaded when ``workers > 1``."""
    items = list(items)
    if workers <= 1 or len(items) < 2:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


@dataclass(frozen=True)
class Subspace:
    """A subspace of ``domain^ambient`` held as its reduced echelon basis."""

    rows: Tuple[Tuple[Tuple[int, Any], ...], ...]
    pivots: Tuple[int, ...]
    ambient: int
    domain: Any

    @classmethod
    def span(cls, vectors: Iterable[Vector], ambient: int, domain) -> "Subspace":
        reduced, pivots = rref_rows(list(vectors), ambient, domain)
        return cls._from_echelon(reduced, pivots, ambient, domain)

    @classmethod
    def _from_echelon(cls, reduced: Sequence[Vector], pivots: Sequence[int], ambient: int, domain) -> "Subspace":
        frozen = tuple(tuple(sorted(row.items())) for row in reduced)
        return cls(frozen, tuple(pivots), ambient, domain)

    @classmethod
    def zero(cls, ambient: int, domain) -> "Subspace":
        return cls((), (), ambient, domain)

    @classmethod
    def full(cls, ambient: int, domain) -> "Subspace":
        return cls(tuple(((i, domain.one),) for i in range(ambient)), tuple(range(ambient)), ambient, domain)

    @property
    def dim(self) -> int:
        return len(self.pivots)

    def vectors(self) -> List[Vector]:
        return [dict(row) for row in self.rows]

    def coordinates(self, v: Vector) -> List[Any]:
        """Coordinates of a member vector in the echelon basis."""
        return [v.get(p, self.domain.zero) for p in self.pivots]

    def reduce(self, v: Vector) -> Vector:
        """Remainder of ``v`` after eliminating the pivot columns."""
        out = dict(v)
        for row, p in zip(self.rows, self.pivots):
            c = out.get(p)
            if not c:
                continue
            for j, value in row:
                s = out.get(j, self.domain.zero) - c * value
                if s:
                    out[j] = s
                else:
                    out.pop(j, None)
        return out

    def contains_vector(self, v: Vector) -> bool:
        return not self.reduce(v)

    def contains(self, other: "Subspace") -> bool:
        return all(self.contains_vector(v) for v in other.vectors())

    def __le__(self, other: "Subspace") -> bool:
        return other.contains(self)

    def sum(self, other: "Subspace") -> "Subspace":
        return Subspace.span(self.vectors() + other.vectors(), self.ambient, self.domain)

    def intersection_dim(self, other: "Subspace") -> int:
        return self.dim + other.dim - self.sum(other).dim

    def first_missing(self, other: "Subspace") -> Optional[Vector]:
        """A basis vector of ``other`` outside ``self``, or None."""
        for v in other.vectors():
            if not self.contains_vector(v):
                return v
        return None

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Subspace):
            return NotImplemented
        return self.ambient == other.ambient and self.pivots == other.pivots and self.rows == other.rows

    def __hash__(self) -> int:
        return hash((self.ambient, self.pivots, self.rows))
