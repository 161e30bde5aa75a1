"""
The Brauer algebra B_r(delta).

Diagrams are perfect matchings on ``2r`` points. Internally a diagram is the
tuple ``partner`` with top points ``0..r-1`` and bottom points ``r..2r-1``;
``partner[p]`` is the point matched with ``p``. In a product ``a * b`` the
diagram ``a`` sits on top, its bottom row glued to the top row of ``b``.
"""

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple

from sympy import QQ

from .exceptions import IndexRangeError, RankMismatchError, RankTooSmallError
from .linalg import Subspace, Vector, parallel_map, rref_rows, to_domain_element
from .symgrp import reduced_word

logger = logging.getLogger(__name__)

Letter = Tuple[str, int]
Word = Tuple[Letter, ...]

_LETTER_NAMES = {"s": "s", "g": "g", "G": "G", "e": "e"}


def format_word(word: Sequence[Letter]) -> str:
    return " ".join(f"{kind}{i}" for kind, i in word) if word else "1"


def parse_word(text: str) -> Word:
    text = text.strip()
    if text in ("", "1"):
        return ()
    out: List[Letter] = []
    for token in text.split():
        kind, index = token[0], token[1:]
        if kind not in _LETTER_NAMES or not index.isdigit():
            raise ValueError(f"Malformed letter {token!r}")
        out.append((kind, int(index)))
    return tuple(out)


def compose_matchings(
    upper: Sequence[int], n_top: int, n_mid: int, lower: Sequence[int], n_bot: int
) -> Tuple[Tuple[int, ...], int]:
    """Stack two partial matchings and return the outer matching and the loop count.

    ``upper`` matches ``n_top`` top points (``0..n_top-1``) and ``n_mid`` bottom
    points (``n_top..``); ``lower`` matches ``n_mid`` top points and ``n_bot``
    bottom points. The result matches ``n_top + n_bot`` points, top first.
    """
    seen = [False] * n_mid
    out = [-1] * (n_top + n_bot)

    def exit_from(m: int, going_down: bool) -> int:
        while True:
            seen[m] = True
            if going_down:
                q = lower[m]
                if q >= n_mid:
                    return n_top + q - n_mid
                m, going_down = q, False
            else:
                u = upper[n_top + m]
                if u < n_top:
                    return u
                m, going_down = u - n_top, True

    for p in range(n_top):
        if out[p] >= 0:
            continue
        u = upper[p]
        end = u if u < n_top else exit_from(u - n_top, True)
        out[p], out[end] = end, p
    for b in range(n_bot):
        idx = n_top + b
        if out[idx] >= 0:
            continue
        q = lower[n_mid + b]
        end = n_top + q - n_mid if q >= n_mid else exit_from(q, False)
        out[idx], out[end] = end, idx

    loops = 0
    for m in range(n_mid):
        if seen[m]:
            continue
        loops += 1
        cur = m
        while True:
            seen[cur] = True
            q = lower[cur]
            seen[q] = True
            nxt = upper[n_top + q] - n_top
            if nxt == m:
                break
            cur = nxt
    return tuple(out), loops


@dataclass(frozen=True)
class BrauerDiagram:
    """A perfect matching on ``r`` top and ``r`` bottom points."""

    r: int
    partner: Tuple[int, ...]

    @classmethod
    def identity(cls, r: int) -> "BrauerDiagram":
        return cls(r, tuple(list(range(r, 2 * r)) + list(range(r))))

    @classmethod
    def from_permutation(cls, perm: Sequence[int]) -> "BrauerDiagram":
        """Permutation diagram joining top ``i`` to bottom ``perm[i-1]``."""
        r = len(perm)
        partner = [0] * (2 * r)
        for i, target in enumerate(perm):
            partner[i] = r + target - 1
            partner[r + target - 1] = i
        return cls(r, tuple(partner))

    @classmethod
    def from_pairs(cls, r: int, pairs: Iterable[Tuple[int, int]]) -> "BrauerDiagram":
        partner = [-1] * (2 * r)
        for a, b in pairs:
            partner[a], partner[b] = b, a
        if any(p < 0 for p in partner):
            raise ValueError("pairs do not form a perfect matching")
        return cls(r, tuple(partner))

    @classmethod
    def s(cls, i: int, r: int) -> "BrauerDiagram":
        _check_index(i, r)
        perm = list(range(1, r + 1))
        perm[i - 1], perm[i] = perm[i], perm[i - 1]
        return cls.from_permutation(perm)

    @classmethod
    def e(cls, i: int, r: int) -> "BrauerDiagram":
        _check_index(i, r)
        partner = list(cls.identity(r).partner)
        a, b = i - 1, i
        partner[a], partner[b] = b, a
        partner[r + a], partner[r + b] = r + b, r + a
        return cls(r, tuple(partner))

    def pairs(self) -> List[Tuple[int, int]]:
        return [(p, q) for p, q in enumerate(self.partner) if p < q]

    def is_top(self, p: int) -> bool:
        return p < self.r

    @property
    def through(self) -> int:
        return sum(1 for p in range(self.r) if self.partner[p] >= self.r)

    def is_permutation(self) -> bool:
        return self.through == self.r

    def permutation(self) -> Tuple[int, ...]:
        if not self.is_permutation():
            raise ValueError("diagram has arcs")
        return tuple(self.partner[i] - self.r + 1 for i in range(self.r))

    def star(self) -> "BrauerDiagram":
        r = self.r

        def flip(p: int) -> int:
            return p + r if p < r else p - r

        partner = [0] * (2 * r)
        for p, q in enumerate(self.partner):
            partner[flip(p)] = flip(q)
        return BrauerDiagram(r, tuple(partner))

    def compose(self, other: "BrauerDiagram") -> Tuple["BrauerDiagram", int]:
        if other.r != self.r:
            raise RankMismatchError(f"cannot multiply diagrams of rank {self.r} and {other.r}")
        out, loops = compose_matchings(self.partner, self.r, self.r, other.partner, self.r)
        return BrauerDiagram(self.r, out), loops

    def embed(self, r: int) -> "BrauerDiagram":
        """The same diagram in B_r, with vertical strands added on the right."""
        if r < self.r:
            raise RankMismatchError(f"cannot embed rank {self.r} into rank {r}")
        old = self.r

        def move(p: int) -> int:
            return p if p < old else p - old + r

        pairs = [(move(p), move(q)) for p, q in self.pairs()]
        pairs += [(k, r + k) for k in range(old, r)]
        return BrauerDiagram.from_pairs(r, pairs)

    def __str__(self) -> str:
        def label(p: int) -> str:
            return f"T{p + 1}" if p < self.r else f"B{p - self.r + 1}"

        return "[" + ",".join(f"({label(p)},{label(q)})" for p, q in self.pairs()) + "]"

    @classmethod
    def parse(cls, text: str, r: int) -> "BrauerDiagram":
        def point(label: str) -> int:
            side, idx = label[0], int(label[1:]) - 1
            return idx if side == "T" else r + idx

        body = text.strip().strip("[]")
        pairs = []
        for chunk in body.split("),("):
            a, b = chunk.strip("()").split(",")
            pairs.append((point(a), point(b)))
        return cls.from_pairs(r, pairs)


def _check_index(i: int, r: int):
    if not 1 <= i <= r - 1:
        raise IndexRangeError(f"generator index {i} outside 1..{r - 1}")


def diagram_product(a: BrauerDiagram, b: BrauerDiagram) -> Tuple[BrauerDiagram, int]:
    return a.compose(b)


def star(d: BrauerDiagram) -> BrauerDiagram:
    return d.star()


def double_factorial(n: int) -> int:
    out = 1
    while n > 1:
        out *= n
        n -= 2
    return out


def perfect_matchings(points: Tuple[int, ...]) -> Iterator[List[Tuple[int, int]]]:
    if not points:
        yield []
        return
    first, rest = points[0], points[1:]
    for k, other in enumerate(rest):
        remaining = rest[:k] + rest[k + 1:]
        for tail in perfect_matchings(remaining):
            yield [(first, other)] + tail


@lru_cache(maxsize=None)
def enumerate_diagrams(r: int) -> Tuple[BrauerDiagram, ...]:
    """All (2r-1)!! diagrams in a fixed deterministic order."""
    return tuple(BrauerDiagram.from_pairs(r, pairs) for pairs in perfect_matchings(tuple(range(2 * r))))


def _factor_data(d: BrauerDiagram) -> Tuple[List[int], int, List[int]]:
    r, t = d.r, d.through
    sigma = [0] * r
    tau = [0] * r
    strands = [(p, d.partner[p] - r) for p in range(r) if d.partner[p] >= r]
    for m, (top, bottom) in enumerate(strands, start=1):
        sigma[top] = m
        tau[m - 1] = bottom + 1
    caps = sorted((p, d.partner[p]) for p in range(r) if d.partner[p] < r and p < d.partner[p])
    for k, (a, b) in enumerate(caps, start=1):
        sigma[a], sigma[b] = t + 2 * k - 1, t + 2 * k
    cups = sorted(
        (p - r, d.partner[p] - r) for p in range(r, 2 * r) if d.partner[p] >= r and p < d.partner[p]
    )
    for k, (a, b) in enumerate(cups, start=1):
        tau[t + 2 * k - 2], tau[t + 2 * k - 1] = a + 1, b + 1
    return sigma, t, tau


def diagram_to_word(d: BrauerDiagram) -> Word:
    """Canonical word ``sigma * e_{t+1} e_{t+3} ... * tau`` over s_i, e_i."""
    sigma, t, tau = _factor_data(d)
    middle = [("e", t + 2 * k - 1) for k in range(1, (d.r - t) // 2 + 1)]
    return tuple(
        [("s", i) for i in reduced_word(sigma)] + middle + [("s", i) for i in reduced_word(tau)]
    )


def word_trie(words: Mapping[Any, Word]) -> Dict:
    """Prefix tree of ``words``; the key ``None`` at a node lists the owners ending there."""
    root: Dict = {}
    for owner, word in words.items():
        node = root
        for letter in word:
            node = node.setdefault(letter, {})
        node.setdefault(None, []).append(owner)
    return root


class AlgebraElement:
    """Sparse linear combination of diagrams in a diagram algebra."""

    __slots__ = ("algebra", "terms")

    def __init__(self, algebra: "BrauerAlgebra", terms: Optional[Mapping[BrauerDiagram, Any]] = None):
        self.algebra = algebra
        self.terms: Dict[BrauerDiagram, Any] = {d: c for d, c in (terms or {}).items() if c}

    @property
    def r(self) -> int:
        return self.algebra.r

    def _same(self, other: "AlgebraElement"):
        if other.algebra.r != self.algebra.r:
            raise RankMismatchError(f"rank {self.r} vs rank {other.r}")

    def coefficient(self, d: BrauerDiagram) -> Any:
        return self.terms.get(d, self.algebra.zero_scalar)

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms.items())

    def _accumulate(self, target: Dict[BrauerDiagram, Any], items, scale: Any = 1):
        for d, c in items:
            value = target.get(d)
            value = c * scale if value is None else value + c * scale
            if value:
                target[d] = value
            else:
                target.pop(d, None)

    def __add__(self, other: Any) -> "AlgebraElement":
        other = self.algebra.coerce(other)
        self._same(other)
        acc = dict(self.terms)
        self._accumulate(acc, other.terms.items())
        return type(self)(self.algebra, acc)

    __radd__ = __add__

    def __neg__(self) -> "AlgebraElement":
        return type(self)(self.algebra, {d: -c for d, c in self.terms.items()})

    def __sub__(self, other: Any) -> "AlgebraElement":
        return self + (-self.algebra.coerce(other))

    def __rsub__(self, other: Any) -> "AlgebraElement":
        return self.algebra.coerce(other) - self

    def scale(self, c: Any) -> "AlgebraElement":
        if not c:
            return type(self)(self.algebra)
        return type(self)(self.algebra, {d: v * c for d, v in self.terms.items()})

    def __mul__(self, other: Any) -> "AlgebraElement":
        if isinstance(other, AlgebraElement):
            self._same(other)
            return self.algebra.multiply(self, other)
        return self.scale(other)

    def __rmul__(self, other: Any) -> "AlgebraElement":
        return self.scale(other)

    def __pow__(self, n: int) -> "AlgebraElement":
        result = self.algebra.one()
        for _ in range(n):
            result = result * self
        return result

    def __eq__(self, other: object) -> bool:
        if isinstance(other, AlgebraElement):
            return self.r == other.r and (self - other).is_zero()
        if other == 0:
            return self.is_zero()
        return NotImplemented

    __hash__ = None  # type: ignore[assignment]

    def star(self) -> "AlgebraElement":
        return self.algebra.star(self)

    def __repr__(self) -> str:
        if not self.terms:
            return f"{type(self).__name__}(r={self.r}, 0)"
        body = " + ".join(f"({c})*{d}" for d, c in sorted(self.terms.items(), key=lambda kv: self.algebra.index(kv[0])))
        return f"{type(self).__name__}(r={self.r}, {body})"


class BrauerAlgebra:
    """B_r(delta) over QQ with its diagram basis."""

    element_class = AlgebraElement

    def __init__(self, r: int, delta: Any = 3):
        if r < 1:
            raise ValueError(f"rank must be positive, got {r}")
        self.r = r
        self.delta = QQ.convert(delta)
        self.domain = QQ
        self.zero_scalar = QQ.zero
        self._basis: Optional[Tuple[BrauerDiagram, ...]] = None
        self._index: Optional[Dict[BrauerDiagram, int]] = None

    # -- basis --------------------------------------------------------

    def basis(self) -> Tuple[BrauerDiagram, ...]:
        if self._basis is None:
            self._basis = enumerate_diagrams(self.r)
            self._index = {d: i for i, d in enumerate(self._basis)}
        return self._basis

    @property
    def dim(self) -> int:
        return len(self.basis())

    def index(self, d: BrauerDiagram) -> int:
        self.basis()
        assert self._index is not None
        return self._index[d]

    # -- elements -----------------------------------------------------

    def element(self, terms: Optional[Mapping[BrauerDiagram, Any]] = None) -> AlgebraElement:
        return self.element_class(self, terms)

    def zero(self) -> AlgebraElement:
        return self.element()

    def one(self) -> AlgebraElement:
        return self.element({BrauerDiagram.identity(self.r): 1})

    def diagram(self, d: BrauerDiagram) -> AlgebraElement:
        return self.element({d: 1})

    def coerce(self, value: Any) -> AlgebraElement:
        if isinstance(value, AlgebraElement):
            return value
        return self.one().scale(value)

    def s(self, i: int) -> AlgebraElement:
        return self.diagram(BrauerDiagram.s(i, self.r))

    def e(self, i: int) -> AlgebraElement:
        return self.diagram(BrauerDiagram.e(i, self.r))

    def generators(self) -> List[AlgebraElement]:
        return [self.s(i) for i in range(1, self.r)] + [self.e(i) for i in range(1, self.r)]

    def letter(self, letter: Letter) -> AlgebraElement:
        kind, i = letter
        if kind in ("s", "g", "G"):
            return self.s(i)
        if kind == "e":
            return self.e(i)
        raise ValueError(f"unknown letter {letter!r}")

    def from_word(self, word: Iterable[Letter]) -> AlgebraElement:
        result = self.one()
        for letter in word:
            result = result * self.letter(letter)
        return result

    # -- products -----------------------------------------------------

    def basis_product(self, a: BrauerDiagram, b: BrauerDiagram) -> Dict[BrauerDiagram, Any]:
        d, loops = a.compose(b)
        return {d: self.delta ** loops}

    def multiply(self, x: AlgebraElement, y: AlgebraElement) -> AlgebraElement:
        acc: Dict[BrauerDiagram, Any] = {}
        for a, ca in x.terms.items():
            for b, cb in y.terms.items():
                coeff = ca * cb
                for d, c in self.basis_product(a, b).items():
                    value = acc.get(d)
                    value = coeff * c if value is None else value + coeff * c
                    if value:
                        acc[d] = value
                    else:
                        acc.pop(d, None)
        return self.element(acc)

    def star(self, x: AlgebraElement) -> AlgebraElement:
        return self.element({d.star(): c for d, c in x.terms.items()})

    def generator_letters(self) -> List[Letter]:
        return [("s", i) for i in range(1, self.r)] + [("e", i) for i in range(1, self.r)]

    def act_vector(self, v: Vector, letter: Letter, side: str) -> Vector:
        """Multiply a coordinate vector by a generator on the ``left`` or ``right``."""
        kind, i = letter
        g = BrauerDiagram.e(i, self.r) if kind == "e" else BrauerDiagram.s(i, self.r)
        basis, zero = self.basis(), self.domain.zero
        out: Vector = {}
        for j, c in v.items():
            d, loops = g.compose(basis[j]) if side == "left" else basis[j].compose(g)
            k = self.index(d)
            value = out.get(k, zero) + c * self.delta ** loops
            if value:
                out[k] = value
            else:
                out.pop(k, None)
        return out

    # -- coordinates --------------------------------------------------

    def to_vector(self, x: AlgebraElement) -> Vector:
        return {self.index(d): to_domain_element(c, self.domain) for d, c in x.terms.items()}

    def from_vector(self, v: Vector) -> AlgebraElement:
        basis = self.basis()
        return self.element({basis[j]: c for j, c in v.items()})

    # -- named elements -----------------------------------------------

    def _need(self, minimum: int, what: str):
        if self.r < minimum:
            raise RankTooSmallError(f"{what} requires r >= {minimum}, got r = {self.r}")

    def F(self) -> AlgebraElement:
        """(1 - s1)(1 - s3)."""
        self._need(4, "F")
        return (self.one() - self.s(1)) * (self.one() - self.s(3))

    def e14(self) -> AlgebraElement:
        self._need(4, "e_{1,4}")
        return self.from_word([("s", 1), ("s", 3), ("e", 2), ("s", 3), ("s", 1)])

    def phi(self) -> AlgebraElement:
        """Fe2F - F - 1/4 Fe2 e14 F."""
        self._need(4, "Phi")
        F, e2 = self.F(), self.e(2)
        return F * e2 * F - F - (F * e2 * self.e14() * F).scale(QQ(1, 4))

    def named_elements(self) -> Dict[str, AlgebraElement]:
        self._need(4, "named elements")
        out: Dict[str, AlgebraElement] = {}
        for i in range(1, self.r):
            out[f"s{i}"] = self.s(i)
            out[f"e{i}"] = self.e(i)
        out["F"] = self.F()
        out["e14"] = self.e14()
        out["Phi"] = self.phi()
        return out

    # -- ideals -------------------------------------------------------

    def through_filtration(self, m: int) -> List[BrauerDiagram]:
        """Diagrams with at most ``m`` through strands."""
        return [d for d in self.basis() if d.through <= m]

    def ideal_closure(self, gens: Iterable[AlgebraElement], workers: int = 1) -> Subspace:
        return ideal_closure(self, list(gens), workers=workers)


def ideal_closure(algebra: BrauerAlgebra, gens: List[AlgebraElement], workers: int = 1) -> Subspace:
    """Two-sided ideal generated by ``gens``, as an echelon subspace of diagram coordinates.

    Each round multiplies only the echelon rows with new pivots by the
    generators on both sides, so products are never recomputed.
    """
    n, domain = algebra.dim, algebra.domain
    letters = algebra.generator_letters()
    basis, pivots = rref_rows([algebra.to_vector(g) for g in gens], n, domain)
    frontier = list(basis)
    rounds = 0
    while frontier:
        rounds += 1

        def products(v: Vector) -> List[Vector]:
            return [algebra.act_vector(v, letter, side) for letter in letters for side in ("left", "right")]

        new_rows = [w for batch in parallel_map(products, frontier, workers) for w in batch]
        old = set(pivots)
        basis, pivots = rref_rows(list(basis) + new_rows, n, domain)
        frontier = [row for row, p in zip(basis, pivots) if p not in old]
        logger.debug(f"ideal closure r={algebra.r} round {rounds}: dim {len(pivots)}, {len(frontier)} new")
    logger.info(f"Ideal closure at r={algebra.r}: dimension {len(pivots)} after {rounds} rounds")
    return Subspace._from_echelon(basis, pivots, n, domain)


def is_star_stable(algebra: BrauerAlgebra, space: Subspace) -> bool:
    starred = [algebra.to_vector(algebra.from_vector(v).star()) for v in space.vectors()]
    return Subspace.span(starred, space.ambient, space.domain) == space


def presentation_relations(algebra: BrauerAlgebra) -> List[Tuple[str, AlgebraElement, AlgebraElement]]:
    """Defining relations of B_r(delta) as (name, lhs, rhs) instances."""
    r, delta = algebra.r, algebra.delta
    s, e, one = algebra.s, algebra.e, algebra.one()
    out: List[Tuple[str, AlgebraElement, AlgebraElement]] = []
    for i in range(1, r):
        out.append((f"s{i}^2 = 1", s(i) * s(i), one))
        out.append((f"e{i}^2 = delta e{i}", e(i) * e(i), e(i).scale(delta)))
        out.append((f"s{i} e{i} = e{i}", s(i) * e(i), e(i)))
        out.append((f"e{i} s{i} = e{i}", e(i) * s(i), e(i)))
        for j in range(i + 2, r):
            out.append((f"s{i} s{j} = s{j} s{i}", s(i) * s(j), s(j) * s(i)))
            out.append((f"s{i} e{j} = e{j} s{i}", s(i) * e(j), e(j) * s(i)))
            out.append((f"e{i} s{j} = s{j} e{i}", e(i) * s(j), s(j) * e(i)))
            out.append((f"e{i} e{j} = e{j} e{i}", e(i) * e(j), e(j) * e(i)))
        if i + 1 < r:
            out.append((f"braid s{i}", s(i) * s(i + 1) * s(i), s(i + 1) * s(i) * s(i + 1)))
            out.append((f"e{i} e{i + 1} e{i} = e{i}", e(i) * e(i + 1) * e(i), e(i)))
            out.append((f"e{i + 1} e{i} e{i + 1} = e{i + 1}", e(i + 1) * e(i) * e(i + 1), e(i + 1)))
            out.append((f"s{i} e{i + 1} e{i} = s{i + 1} e{i}", s(i) * e(i + 1) * e(i), s(i + 1) * e(i)))
            out.append((f"e{i + 1} e{i} s{i + 1} = e{i + 1} s{i}", e(i + 1) * e(i) * s(i + 1), e(i + 1) * s(i)))
    return out


def named_elements(r: int, delta: Any = 3) -> Dict[str, AlgebraElement]:
    return BrauerAlgebra(r, delta).named_elements()


def through_filtration(r: int, m: int) -> List[BrauerDiagram]:
    return [d for d in enumerate_diagrams(r) if d.through <= m]
