"""
Symmetric group combinatorics and Specht modules in Young's seminormal form.

Permutations are one-line tuples ``p`` with ``p[i - 1] = pi(i)``. Products follow
the diagram convention: in ``a * b`` the permutation ``a`` is applied first, so
``(a * b)(i) = b(a(i))``. Representation matrices act on column vectors and a
word ``s_{i1} s_{i2} ...`` maps to the matrix product in word order.
"""

import logging
from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, Iterable, List, Sequence, Tuple

from sympy import QQ
from sympy.polys.matrices import DomainMatrix

from .exceptions import IndexRangeError
from .partitions import Partition

logger = logging.getLogger(__name__)

Permutation = Tuple[int, ...]


def identity_permutation(n: int) -> Permutation:
    return tuple(range(1, n + 1))


def compose(a: Permutation, b: Permutation) -> Permutation:
    """Product ``a * b``: apply ``a`` then ``b``."""
    return tuple(b[x - 1] for x in a)


def inverse(p: Permutation) -> Permutation:
    out = [0] * len(p)
    for i, x in enumerate(p, start=1):
        out[x - 1] = i
    return tuple(out)


def reduced_word(p: Sequence[int]) -> List[int]:
    """Lexicographically minimal reduced word ``[i1, i2, ...]`` with ``p = s_i1 * s_i2 * ...``."""
    current = list(p)
    word: List[int] = []
    while True:
        for i in range(len(current) - 1):
            if current[i] > current[i + 1]:
                current[i], current[i + 1] = current[i + 1], current[i]
                word.append(i + 1)
                break
        else:
            return word


def word_to_permutation(word: Iterable[int], n: int) -> Permutation:
    p = list(range(1, n + 1))
    for i in reversed(list(word)):
        if not 1 <= i < n:
            raise IndexRangeError(f"s_{i} is out of range for Sym_{n}")
        p[i - 1], p[i] = p[i], p[i - 1]
    return tuple(p)


def sign(p: Permutation) -> int:
    return -1 if len(reduced_word(p)) % 2 else 1


@dataclass(frozen=True)
class StandardTableau:
    """A standard filling of a Young diagram, stored row by row."""

    rows: Tuple[Tuple[int, ...], ...]

    @property
    def shape(self) -> Partition:
        return Partition(tuple(len(row) for row in self.rows))

    @property
    def n(self) -> int:
        return sum(len(row) for row in self.rows)

    def position(self, k: int) -> Tuple[int, int]:
        for i, row in enumerate(self.rows, start=1):
            if k in row:
                return i, row.index(k) + 1
        raise ValueError(f"{k} could not be found in tableau.")

    def content_of(self, k: int) -> int:
        row, col = self.position(k)
        return col - row

    def axial_distance(self, k: int) -> int:
        """c(k + 1) - c(k)."""
        return self.content_of(k + 1) - self.content_of(k)

    def reading_word(self) -> Tuple[int, ...]:
        return tuple(x for row in reversed(self.rows) for x in row)

    def swap(self, k: int) -> "StandardTableau":
        table = {k: k + 1, k + 1: k}
        return StandardTableau(tuple(tuple(table.get(x, x) for x in row) for row in self.rows))

    def is_standard(self) -> bool:
        for i, row in enumerate(self.rows):
            if any(row[j] >= row[j + 1] for j in range(len(row) - 1)):
                return False
            if i and any(self.rows[i - 1][j] >= row[j] for j in range(len(row))):
                return False
        return True

    def __str__(self) -> str:
        return "/".join(",".join(str(x) for x in row) for row in self.rows)


def _fill(shape: Tuple[int, ...], rows: List[List[int]], k: int, n: int, out: List[StandardTableau]):
    if k > n:
        out.append(StandardTableau(tuple(tuple(r) for r in rows)))
        return
    for i, target in enumerate(shape):
        length = len(rows[i])
        if length == target:
            continue
        if i and len(rows[i - 1]) <= length:
            continue
        rows[i].append(k)
        _fill(shape, rows, k + 1, n, out)
        rows[i].pop()


@lru_cache(maxsize=None)
def standard_tableaux(shape: Partition) -> Tuple[StandardTableau, ...]:
    """Standard tableaux of ``shape`` in decreasing reading-word order."""
    out: List[StandardTableau] = []
    _fill(shape.parts, [[] for _ in shape.parts], 1, shape.size, out)
    out.sort(key=lambda t: t.reading_word(), reverse=True)
    return tuple(out)


@dataclass
class SpechtModule:
    """S(shape) with exact seminormal generator matrices over QQ."""

    shape: Partition
    basis: Tuple[StandardTableau, ...]
    generators: Dict[int, DomainMatrix]
    form: Tuple = ()
    _perm_cache: Dict[Permutation, DomainMatrix] = field(default_factory=dict, repr=False)

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def n(self) -> int:
        return self.shape.size

    def generator(self, k: int) -> DomainMatrix:
        if k not in self.generators:
            raise IndexRangeError(f"s_{k} is out of range for Sym_{self.n}")
        return self.generators[k]

    def identity(self) -> DomainMatrix:
        return DomainMatrix.eye(self.dim, QQ)

    def permutation_matrix(self, p: Permutation) -> DomainMatrix:
        cached = self._perm_cache.get(p)
        if cached is None:
            cached = perm_action(self, reduced_word(p))
            self._perm_cache[p] = cached
        return cached

    def form_matrix(self) -> DomainMatrix:
        """Diagonal invariant form: ``rho(w)^T G = G rho(w^-1)``."""
        return DomainMatrix.diag(list(self.form), QQ)


def specht(shape: Partition) -> SpechtModule:
    """Build S(shape) in Young's seminormal form."""
    if shape.size < 1:
        raise ValueError("specht expects a non-empty partition")
    basis = standard_tableaux(shape)
    index = {t: i for i, t in enumerate(basis)}
    dim = len(basis)
    generators: Dict[int, DomainMatrix] = {}
    for k in range(1, shape.size):
        dod: Dict[int, Dict[int, object]] = {}
        for j, t in enumerate(basis):
            a = t.axial_distance(k)
            if a == 1:
                dod.setdefault(j, {})[j] = QQ.one
            elif a == -1:
                dod.setdefault(j, {})[j] = -QQ.one
            else:
                inv_a = QQ(1, a)
                dod.setdefault(j, {})[j] = inv_a
                other = index[t.swap(k)]
                dod.setdefault(other, {})[j] = QQ.one if a < 0 else QQ.one - inv_a * inv_a
        generators[k] = DomainMatrix.from_dod(dod, (dim, dim), QQ)
    form = _invariant_form(basis, index)
    logger.debug(f"Specht module {shape}: dimension {dim}")
    return SpechtModule(shape, basis, generators, form)


def _invariant_form(basis: Tuple[StandardTableau, ...], index: Dict[StandardTableau, int]) -> Tuple:
    gamma = [None] * len(basis)
    if not basis:
        return ()
    gamma[0] = QQ.one
    queue = deque([basis[0]])
    n = basis[0].n
    while queue:
        t = queue.popleft()
        g = gamma[index[t]]
        for k in range(1, n):
            a = t.axial_distance(k)
            if abs(a) == 1:
                continue
            u = t.swap(k)
            j = index[u]
            if gamma[j] is not None:
                continue
            ratio = QQ.one - QQ(1, a * a)
            gamma[j] = g * ratio if a < 0 else g / ratio
            queue.append(u)
    return tuple(gamma)


_SPECHT_CACHE: Dict[Partition, SpechtModule] = {}


def specht_cached(shape: Partition) -> SpechtModule:
    module = _SPECHT_CACHE.get(shape)
    if module is None:
        module = specht(shape)
        _SPECHT_CACHE[shape] = module
    return module


def perm_action(module: SpechtModule, word: Iterable[int]) -> DomainMatrix:
    """Matrix of ``s_{i1} s_{i2} ...`` acting on ``module``."""
    result = module.identity()
    for k in word:
        result = result * module.generator(k)
    return result


def character(module: SpechtModule, p: Permutation):
    return sum(module.permutation_matrix(p).diagonal(), QQ.zero)
