"""
The BMW algebra BMW_r(q) over QQ(q).

Elements are expanded in the basis of descending tangles ``T_D``, one for
each Brauer diagram ``D``. A word is a tuple of letters ``(kind, i)`` read top
to bottom, where kind ``g`` is the crossing g_i, ``G`` its inverse and ``e`` the
cup-cap e_i. Words are reduced by switching crossings with the Kauffman skein
relation until every crossing is descending, at which point the word equals
``delta^loops * q^(4w) * T_D`` with ``w`` the self-writhe.

Specializations used throughout: y = q^-4, z = q^2 - q^-2, delta = q^2 + 1 + q^-2.
"""

import hashlib
import json
import logging
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Mapping, NamedTuple, Optional, Sequence, Set, Tuple, Union

from sympy import QQ

from .brauer import (
    AlgebraElement,
    BrauerAlgebra,
    BrauerDiagram,
    Letter,
    Word,
    diagram_to_word,
    format_word,
    ideal_closure,
    word_trie,
)
from .exceptions import CacheError, IndexRangeError, ResourceGuardError, RewriteLimitError
from .linalg import QF, Subspace, Vector, parallel_map
from .scalars import (
    DELTA,
    ONE,
    Y,
    Y_INV,
    Z,
    LaurentPoly,
    ScalarQ,
    quantum_integer,
    specialize_q1,
    support_in_S,
)

logger = logging.getLogger(__name__)

MAX_RANK = 5
DEFAULT_MAX_STEPS = 200_000
CODE_VERSION = "descending-skein-1"

Coeffs = Dict[BrauerDiagram, LaurentPoly]

_OVER = {"g": "A", "G": "B"}

# Adjacent letters with equal index.
_PAIR_RULES: Dict[Tuple[str, str], Tuple[LaurentPoly, Tuple[str, ...]]] = {
    ("g", "G"): (ONE, ()),
    ("G", "g"): (ONE, ()),
    ("e", "e"): (DELTA, ("e",)),
    ("g", "e"): (Y, ("e",)),
    ("e", "g"): (Y, ("e",)),
    ("G", "e"): (Y_INV, ("e",)),
    ("e", "G"): (Y_INV, ("e",)),
}


class Passage(NamedTuple):
    time: int
    strand: str
    down: bool
    component: int


@dataclass(frozen=True)
class Traversal:
    """Connectivity of a word together with the order in which its crossings are met."""

    diagram: BrauerDiagram
    loops: int
    passages: Mapping[int, Tuple[Passage, Passage]]


def _check_word(word: Sequence[Letter], r: int):
    for kind, i in word:
        if kind not in ("g", "G", "e", "s"):
            raise ValueError(f"unknown letter {kind}{i}")
        if not 1 <= i <= r - 1:
            raise IndexRangeError(f"letter {kind}{i} outside 1..{r - 1}")


def trace(word: Sequence[Letter], r: int) -> Traversal:
    """Walk every strand and loop of ``word``.

    Strands are started from the top points left to right, then from the
    remaining bottom points; loops from the first unvisited interior point,
    heading down. At level ``l`` a crossing on positions ``a = i-1, b = i``
    carries strand ``A`` from top ``a`` to bottom ``b`` and strand ``B`` from top
    ``b`` to bottom ``a``; ``g`` has ``A`` over, ``G`` has ``B`` over.
    """
    _check_word(word, r)
    height = len(word)
    partner = [-1] * (2 * r)
    visited: Set[Tuple[int, int]] = set()
    crossings: Dict[int, List[Passage]] = {}
    clock = 0
    component = 0

    def walk(k: int, p: int, down: bool, stop: Optional[Tuple[int, int, bool]]) -> int:
        nonlocal clock
        while True:
            if down:
                if k == height:
                    return r + p
                level = k
            else:
                if k == 0:
                    return p
                level = k - 1
            kind, i = word[level]
            a, b = i - 1, i
            if p != a and p != b:
                k = level + 1 if down else level
            elif kind == "e":
                p = b if p == a else a
                down = not down
            else:
                if down:
                    strand = "A" if p == a else "B"
                    k = level + 1
                else:
                    strand = "A" if p == b else "B"
                    k = level
                p = b if p == a else a
                crossings.setdefault(level, []).append(Passage(clock, strand, down, component))
                clock += 1
            if 0 < k < height:
                if stop is not None and (k, p, down) == stop:
                    return -1
                visited.add((k, p))

    for p in range(r):
        if partner[p] < 0:
            end = walk(0, p, True, None)
            partner[p], partner[end] = end, p
            component += 1
    for p in range(r):
        if partner[r + p] < 0:
            end = walk(height, p, False, None)
            partner[r + p], partner[end] = end, r + p
            component += 1

    loops = 0
    for k in range(1, height):
        for p in range(r):
            if (k, p) in visited:
                continue
            visited.add((k, p))
            walk(k, p, True, (k, p, True))
            loops += 1
            component += 1

    passages = {level: (pair[0], pair[1]) for level, pair in crossings.items()}
    return Traversal(BrauerDiagram(r, tuple(partner)), loops, passages)


def simplify(word: Sequence[Letter]) -> Tuple[LaurentPoly, Word]:
    """Apply the monomial relations between neighbouring letters until none fires."""
    coeff = ONE
    w = list(word)
    changed = True
    while changed:
        changed = False
        for j in range(len(w) - 1):
            (k1, i1), (k2, i2) = w[j], w[j + 1]
            if i1 == i2 and (k1, k2) in _PAIR_RULES:
                factor, keep = _PAIR_RULES[(k1, k2)]
                w[j : j + 2] = [(kind, i1) for kind in keep]
                coeff = coeff * factor
                changed = True
                break
            if (
                j + 2 < len(w)
                and k1 == k2 == w[j + 2][0] == "e"
                and abs(i1 - i2) == 1
                and w[j + 2][1] == i1
            ):
                del w[j + 1 : j + 3]
                changed = True
                break
    return coeff, tuple(w)


def _add_into(target: Dict[Any, Any], source: Mapping[Any, Any], scale: Any = None):
    for key, value in source.items():
        if scale is not None:
            value = value * scale
        total = target.get(key)
        total = value if total is None else total + value
        if total:
            target[key] = total
        else:
            target.pop(key, None)


class SkeinEngine:
    """Reduces words to the descending basis, memoizing every intermediate word."""

    def __init__(self, r: int, max_steps: int = DEFAULT_MAX_STEPS):
        self.r = r
        self.max_steps = max_steps
        self._memo: Dict[Word, Coeffs] = {}
        self._lifts: Dict[BrauerDiagram, Word] = {}

    def __len__(self) -> int:
        return len(self._memo)

    def evaluate(self, word: Sequence[Letter]) -> Coeffs:
        word = tuple(word)
        _check_word(word, self.r)
        return self._evaluate(word, [0], word)

    def _evaluate(self, word: Word, budget: List[int], origin: Word) -> Coeffs:
        scale, word = simplify(word)
        cached = self._memo.get(word)
        if cached is None:
            cached = self._expand(word, budget, origin)
            self._memo[word] = cached
        if scale == ONE:
            return cached
        return {d: c * scale for d, c in cached.items()}

    def _expand(self, word: Word, budget: List[int], origin: Word) -> Coeffs:
        budget[0] += 1
        if budget[0] > self.max_steps:
            raise RewriteLimitError(format_word(origin), budget[0])
        t = trace(word, self.r)
        bad = [
            (pair[0].time, level)
            for level, pair in t.passages.items()
            if pair[0].strand != _OVER[word[level][0]]
        ]
        if not bad:
            writhe = 0
            for level, (first, second) in t.passages.items():
                if first.component != second.component:
                    continue
                eps = 1 if word[level][0] == "g" else -1
                writhe += eps if first.down == second.down else -eps
            return {t.diagram: DELTA ** t.loops * LaurentPoly.monomial(4 * writhe)}

        _, level = min(bad)
        kind, i = word[level]
        head, tail = word[:level], word[level + 1 :]
        sign = 1 if kind == "g" else -1
        out: Coeffs = dict(self._evaluate(head + (("G" if kind == "g" else "g", i),) + tail, budget, origin))
        _add_into(out, self._evaluate(head + tail, budget, origin), Z * sign)
        _add_into(out, self._evaluate(head + (("e", i),) + tail, budget, origin), Z * (-sign))
        return out

    def lift(self, d: BrauerDiagram) -> Word:
        """Brauer factorization of ``d`` with every crossing chosen descending."""
        cached = self._lifts.get(d)
        if cached is None:
            brauer_word = diagram_to_word(d)
            t = trace(brauer_word, d.r)
            cached = tuple(
                (kind, i) if kind == "e" else ("g" if t.passages[level][0].strand == "A" else "G", i)
                for level, (kind, i) in enumerate(brauer_word)
            )
            self._lifts[d] = cached
        return cached


class BMWElement(AlgebraElement):
    """Element of BMW_r(q) in the descending-tangle basis."""

    __slots__ = ()

    def specialize(self) -> AlgebraElement:
        return specialize_to_brauer(self)


class BMWAlgebra(BrauerAlgebra):
    """BMW_r(q); structure constants are Laurent polynomials in q."""

    element_class = BMWElement

    def __init__(self, r: int, max_steps: int = DEFAULT_MAX_STEPS, limit: int = MAX_RANK):
        if r > limit:
            raise ResourceGuardError("bmw_product", r, limit)
        super().__init__(r)
        self.delta = DELTA
        self.domain = QF
        self.zero_scalar = LaurentPoly()
        self.engine = SkeinEngine(r, max_steps)
        self._products: Dict[Tuple[BrauerDiagram, BrauerDiagram], Coeffs] = {}
        self._right: Dict[Tuple[BrauerDiagram, Letter], Coeffs] = {}
        self._left: Dict[Tuple[BrauerDiagram, Letter], Coeffs] = {}
        self._stars: Dict[BrauerDiagram, Coeffs] = {}
        self._vector_tables: Dict[Tuple[BrauerDiagram, Letter, str], Vector] = {}

    # -- generators ---------------------------------------------------

    def one(self) -> BMWElement:
        return self.element({BrauerDiagram.identity(self.r): ONE})

    def diagram(self, d: BrauerDiagram) -> BMWElement:
        return self.element({d: ONE})

    def lift(self, d: BrauerDiagram) -> Word:
        return self.engine.lift(d)

    def word_element(self, word: Sequence[Letter]) -> BMWElement:
        return self.element(self.engine.evaluate(word))

    def from_word(self, word) -> BMWElement:
        return self.word_element(tuple(("g", i) if kind == "s" else (kind, i) for kind, i in word))

    def letter(self, letter: Letter) -> BMWElement:
        return self.from_word((letter,))

    def g(self, i: int) -> BMWElement:
        return self.word_element((("g", i),))

    def g_inv(self, i: int) -> BMWElement:
        return self.word_element((("G", i),))

    def s(self, i: int) -> BMWElement:
        return self.g(i)

    def e(self, i: int) -> BMWElement:
        return self.word_element((("e", i),))

    def generators(self) -> List[AlgebraElement]:
        return [self.g(i) for i in range(1, self.r)] + [self.e(i) for i in range(1, self.r)]

    def generator_letters(self) -> List[Letter]:
        return [("g", i) for i in range(1, self.r)] + [("e", i) for i in range(1, self.r)]

    # -- products -----------------------------------------------------

    def right_letter(self, d: BrauerDiagram, letter: Letter) -> Coeffs:
        key = (d, letter)
        cached = self._right.get(key)
        if cached is None:
            cached = self.engine.evaluate(self.lift(d) + (letter,))
            self._right[key] = cached
        return cached

    def left_letter(self, d: BrauerDiagram, letter: Letter) -> Coeffs:
        key = (d, letter)
        cached = self._left.get(key)
        if cached is None:
            cached = self.engine.evaluate((letter,) + self.lift(d))
            self._left[key] = cached
        return cached

    def _times_letter(self, coeffs: Mapping[BrauerDiagram, Any], letter: Letter) -> Dict[BrauerDiagram, Any]:
        out: Dict[BrauerDiagram, Any] = {}
        for d, c in coeffs.items():
            _add_into(out, self.right_letter(d, letter), c)
        return out

    def basis_product(self, a: BrauerDiagram, b: BrauerDiagram) -> Coeffs:
        key = (a, b)
        cached = self._products.get(key)
        if cached is None:
            cached = {a: ONE}
            for letter in self.lift(b):
                cached = self._times_letter(cached, letter)
            self._products[key] = cached
        return cached

    def product_row(self, a: BrauerDiagram) -> Dict[BrauerDiagram, Coeffs]:
        """All products ``T_a * T_b``, sharing common prefixes of the lifts."""
        out: Dict[BrauerDiagram, Coeffs] = {}

        def visit(node: Dict, coeffs: Coeffs):
            for b in node.get(None, ()):
                out[b] = coeffs
            for letter, child in node.items():
                if letter is not None:
                    visit(child, self._times_letter(coeffs, letter))

        visit(word_trie({b: self.lift(b) for b in self.basis()}), {a: ONE})
        for b, coeffs in out.items():
            self._products[(a, b)] = coeffs
        return out

    def star_basis(self, d: BrauerDiagram) -> Coeffs:
        cached = self._stars.get(d)
        if cached is None:
            cached = self.engine.evaluate(tuple(reversed(self.lift(d))))
            self._stars[d] = cached
        return cached

    def star(self, x: AlgebraElement) -> BMWElement:
        out: Dict[BrauerDiagram, Any] = {}
        for d, c in x.terms.items():
            _add_into(out, self.star_basis(d), c)
        return self.element(out)

    # -- coordinates --------------------------------------------------

    def from_vector(self, v: Vector) -> BMWElement:
        basis = self.basis()
        return self.element({basis[j]: ScalarQ(c) for j, c in v.items()})

    def _letter_vector(self, d: BrauerDiagram, letter: Letter, side: str) -> Vector:
        key = (d, letter, side)
        cached = self._vector_tables.get(key)
        if cached is None:
            coeffs = self.left_letter(d, letter) if side == "left" else self.right_letter(d, letter)
            cached = {self.index(k): c.to_frac() for k, c in coeffs.items()}
            self._vector_tables[key] = cached
        return cached

    def act_vector(self, v: Vector, letter: Letter, side: str) -> Vector:
        basis = self.basis()
        out: Vector = {}
        for j, c in v.items():
            _add_into(out, self._letter_vector(basis[j], letter, side), c)
        return out

    # -- named elements -----------------------------------------------

    def f(self, i: int) -> BMWElement:
        """f_i = -g_i - (1 - q^-2) e_i + q^2."""
        return -self.g(i) - self.e(i).scale(ONE - LaurentPoly.monomial(-2)) + self.one().scale(LaurentPoly.monomial(2))

    def F(self) -> BMWElement:
        self._need(4, "F_q")
        return self.f(1) * self.f(3)

    def e14(self) -> BMWElement:
        self._need(4, "e_{14}")
        return self.word_element((("G", 3), ("g", 1), ("e", 2), ("G", 1), ("g", 3)))

    def e1234(self) -> BMWElement:
        self._need(4, "e_{1234}")
        return self.word_element((("e", 2), ("g", 1), ("G", 3), ("g", 2), ("G", 1), ("g", 3)))

    def phi(self) -> BMWElement:
        self._need(4, "Phi_q")
        return _phi_from(self, phi_coefficients())

    def tilde_phi(self) -> BMWElement:
        self._need(4, "Phi_q")
        return _phi_from(self, tilde_phi_coefficients())

    def named_elements(self) -> Dict[str, AlgebraElement]:
        self._need(4, "named elements")
        out: Dict[str, AlgebraElement] = {}
        for i in range(1, self.r):
            out[f"f{i}"] = self.f(i)
        out["F_q"] = self.F()
        out["e14"] = self.e14()
        out["e1234"] = self.e1234()
        out["Phi_q"] = self.phi()
        return out


def _phi_from(algebra: BMWAlgebra, coeffs: Mapping[str, ScalarQ]) -> BMWElement:
    F, e2 = algebra.F(), algebra.e(2)
    Fe2 = F * e2
    return (
        (Fe2 * F).scale(coeffs["a"])
        - F.scale(coeffs["b"])
        - (Fe2 * algebra.e14() * F).scale(coeffs["c"])
        + (F * algebra.e1234() * F).scale(coeffs["d"])
    )


def phi_coefficients() -> Dict[str, ScalarQ]:
    q2 = ScalarQ(LaurentPoly.monomial(2))
    qm2 = ScalarQ(LaurentPoly.monomial(-2))
    three = quantum_integer(3)
    return {
        "a": 1 + (1 - qm2) ** 2,
        "b": 1 + (1 - q2) ** 2 + (1 - qm2) ** 2,
        "c": (1 + (2 + qm2) * (1 - qm2) ** 2 + (1 + q2) * (1 - qm2) ** 4) / (three - 1) ** 2,
        "d": ScalarQ(LaurentPoly.from_coeffs({2: 1, 0: -2, -2: 1})),
    }


def tilde_phi_coefficients() -> Dict[str, ScalarQ]:
    """Coefficients of (q^2 + q^-2) Phi_q."""
    factor = ScalarQ(LaurentPoly.from_coeffs({2: 1, -2: 1}))
    return {name: value * factor for name, value in phi_coefficients().items()}


def named_q_elements(r: int, max_steps: int = DEFAULT_MAX_STEPS) -> Dict[str, AlgebraElement]:
    return BMWAlgebra(r, max_steps).named_elements()


def bmw_product(a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    return a * b


def specialize_to_brauer(x: AlgebraElement, algebra: Optional[BrauerAlgebra] = None) -> AlgebraElement:
    """Termwise q -> 1; the basis element T_D specializes to the diagram D."""
    algebra = algebra or BrauerAlgebra(x.r, 3)
    return algebra.element({d: specialize_q1(c) for d, c in x.terms.items()})


def q_ideal_closure(
    algebra: BMWAlgebra, gens: Sequence[AlgebraElement], workers: int = 1, limit: int = MAX_RANK
) -> Subspace:
    if algebra.r > limit:
        raise ResourceGuardError("q_ideal_closure", algebra.r, limit)
    return ideal_closure(algebra, list(gens), workers=workers)


# -- relations ------------------------------------------------------------


@dataclass(frozen=True)
class RelationConstants:
    """Scalars entering the relation suite: q^2, q^-2, y, y^-1, z, delta."""

    q2: Any
    q_2: Any
    y: Any
    y_inv: Any
    z: Any
    delta: Any

    @classmethod
    def quantum(cls) -> "RelationConstants":
        return cls(LaurentPoly.monomial(2), LaurentPoly.monomial(-2), Y, Y_INV, Z, DELTA)

    @classmethod
    def classical(cls) -> "RelationConstants":
        return cls(QQ(1), QQ(1), QQ(1), QQ(1), QQ(0), QQ(3))


@dataclass(frozen=True)
class RelationResult:
    name: str
    passed: bool


def relation_instances(
    r: int,
    g: Callable[[int], Any],
    g_inv: Callable[[int], Any],
    e: Callable[[int], Any],
    one: Any,
    consts: RelationConstants,
) -> List[Tuple[str, Any, Any]]:
    """Every instance of the defining relations and their standard consequences at rank ``r``.

    Operands need ``+``, ``-``, ``*`` and left multiplication by a scalar.
    The mixed relation is checked as ``g_{i+1}^-1 e_i = g_i e_{i+1} e_i``.
    """
    c = consts
    out: List[Tuple[str, Any, Any]] = []
    zero = one - one
    for i in range(1, r):
        gi, Gi, ei = g(i), g_inv(i), e(i)
        out.append((f"g{i} g{i}^-1 = 1", gi * Gi, one))
        out.append((f"kauffman {i}", gi - Gi, c.z * (one - ei)))
        out.append((f"g{i} e{i} = y e{i}", gi * ei, c.y * ei))
        out.append((f"e{i} g{i} = y e{i}", ei * gi, c.y * ei))
        out.append((f"e{i}^2 = delta e{i}", ei * ei, c.delta * ei))
        out.append((f"quadratic {i}", (gi - c.q2 * one) * (gi + c.q_2 * one), (-c.y * c.z) * ei))
        out.append((f"cubic {i}", (gi - c.y * one) * (gi - c.q2 * one) * (gi + c.q_2 * one), zero))
        out.append((f"z e{i}^2", c.z * (ei * ei), (c.z + c.y_inv - c.y) * ei))
        out.append((f"-yz e{i} = g{i}^2 - z g{i} - 1", (-c.y * c.z) * ei, gi * gi - c.z * gi - one))
        for j in range(i + 2, r):
            gj, ej = g(j), e(j)
            out.append((f"g{i} g{j} = g{j} g{i}", gi * gj, gj * gi))
            out.append((f"g{i} e{j} = e{j} g{i}", gi * ej, ej * gi))
            out.append((f"e{i} g{j} = g{j} e{i}", ei * gj, gj * ei))
            out.append((f"e{i} e{j} = e{j} e{i}", ei * ej, ej * ei))
        if i + 1 < r:
            k = i + 1
            gk, Gk, ek = g(k), g_inv(k), e(k)
            out.append((f"braid {i}", gi * gk * gi, gk * gi * gk))
            out.append((f"e{i} g{k} e{i}", ei * gk * ei, c.y_inv * ei))
            out.append((f"e{i} g{k}^-1 e{i}", ei * Gk * ei, c.y * ei))
            out.append((f"e{k} g{i} e{k}", ek * gi * ek, c.y_inv * ek))
            out.append((f"e{k} g{i}^-1 e{k}", ek * Gi * ek, c.y * ek))
            out.append((f"e{i} e{k} e{i} = e{i}", ei * ek * ei, ei))
            out.append((f"e{k} e{i} e{k} = e{k}", ek * ei * ek, ek))
            out.append((f"g{k}^-1 e{i} = g{i} e{k} e{i}", Gk * ei, gi * ek * ei))
            out.append((f"z g{k}^-1 e{i} = z g{i} e{k} e{i}", c.z * (Gk * ei), c.z * (gi * ek * ei)))
    return out


def check_relations(instances: Sequence[Tuple[str, Any, Any]]) -> List[RelationResult]:
    results = [RelationResult(name, bool(lhs == rhs)) for name, lhs, rhs in instances]
    failed = [res.name for res in results if not res.passed]
    if failed:
        logger.error(f"Relation check failed for: {', '.join(failed)}")
    return results


def validate_relations(algebra: BMWAlgebra) -> List[RelationResult]:
    instances = relation_instances(
        algebra.r, algebra.g, algebra.g_inv, algebra.e, algebra.one(), RelationConstants.quantum()
    )
    results = check_relations(instances)
    logger.info(f"BMW relations at r={algebra.r}: {sum(r.passed for r in results)}/{len(results)} hold")
    return results


def phi_q_identities(algebra: BMWAlgebra) -> List[RelationResult]:
    """Exact identities of F_q and Phi_q; b is the coefficient of F_q in Phi_q."""
    algebra._need(4, "Phi_q identities")
    t = ScalarQ(LaurentPoly.from_coeffs({2: 1, -2: 1}))
    b = phi_coefficients()["b"]
    F, phi, zero = algebra.F(), algebra.phi(), algebra.zero()
    instances: List[Tuple[str, Any, Any]] = [("F_q^2 = (q^2+q^-2)^2 F_q", F * F, F.scale(t * t))]
    for i in (1, 2, 3):
        ei = algebra.e(i)
        instances.append((f"e{i} Phi_q = 0", ei * phi, zero))
        instances.append((f"Phi_q e{i} = 0", phi * ei, zero))
    instances.append(("Phi_q^2 = -(q^2+q^-2)^2 b Phi_q", phi * phi, phi.scale(-(t * t * b))))
    instances.append(("tilde Phi_q = (q^2+q^-2) Phi_q", algebra.tilde_phi(), phi.scale(t)))
    results = check_relations(instances)
    logger.info(f"Phi_q identities at r={algebra.r}: {sum(r.passed for r in results)}/{len(results)} hold")
    return results


# -- engine oracles -------------------------------------------------------


def _report_failures(name: str, failures: Sequence[str], checked: int) -> RelationResult:
    if failures:
        logger.error(f"{name}: {len(failures)} of {checked} failed, first at {failures[0]}")
    else:
        logger.info(f"{name}: {checked} checked")
    return RelationResult(f"{name} ({checked} checked)", not failures)


def specialization_oracle(algebra: BMWAlgebra, workers: int = 1) -> RelationResult:
    """At q = 1 every product T_a T_b becomes the Brauer product a b."""
    brauer = BrauerAlgebra(algebra.r, 3)
    basis = algebra.basis()
    for d in basis:
        algebra.lift(d)
    rows = parallel_map(algebra.product_row, basis, workers)
    failures: List[str] = []
    for a, row in zip(basis, rows):
        for b, coeffs in row.items():
            got = brauer.element({d: specialize_q1(c) for d, c in coeffs.items()})
            if got != brauer.element(brauer.basis_product(a, b)):
                failures.append(f"{a} * {b}")
    return _report_failures("specialization at q = 1", failures, len(basis) ** 2)


def associativity_oracle(algebra: BMWAlgebra, samples: int = 200, seed: int = 0) -> RelationResult:
    """(T_a T_b) T_c = T_a (T_b T_c) on random triples of basis tangles."""
    rng = random.Random(seed)
    basis = algebra.basis()
    failures: List[str] = []
    for _ in range(samples):
        a, b, c = (rng.choice(basis) for _ in range(3))
        x, y, z = algebra.diagram(a), algebra.diagram(b), algebra.diagram(c)
        if (x * y) * z != x * (y * z):
            failures.append(f"({a}, {b}, {c})")
    return _report_failures("associativity", failures, samples)


# -- denominator support --------------------------------------------------


@dataclass(frozen=True)
class SupportRow:
    name: str
    value: ScalarQ
    in_localization: bool
    support: List[str] = field(default_factory=list)
    laurent: bool = False


def coefficient_support() -> List[SupportRow]:
    """Denominator support of a, b, c, d and of their multiples by q^2 + q^-2."""
    rows: List[SupportRow] = []
    for prefix, coeffs in (("", phi_coefficients()), ("tilde_", tilde_phi_coefficients())):
        for name, value in coeffs.items():
            ok, support = support_in_S(value)
            rows.append(SupportRow(prefix + name, value, ok, support.as_strings(), value.is_laurent()))
    return rows


def element_support(x: AlgebraElement) -> bool:
    """Every coefficient of ``x`` in the tangle basis lies in the localization."""
    return all(support_in_S(c)[0] for c in x.terms.values())


def table_support(table: "StructureTable") -> Tuple[bool, int]:
    """Every structure constant lies in QQ[q, q^-1], hence in the localization."""
    count = 0
    for row in table.entries.values():
        for value in row.values():
            ok, _ = support_in_S(value)
            if not ok:
                return False, count
            count += 1
    return True, count


# -- structure tables -----------------------------------------------------


@dataclass
class StructureTable:
    """All products ``T_a * T_b`` indexed by basis positions."""

    r: int
    basis: Tuple[BrauerDiagram, ...]
    entries: Dict[Tuple[int, int], Dict[int, LaurentPoly]]
    code_version: str = CODE_VERSION

    def product(self, i: int, j: int) -> Dict[int, LaurentPoly]:
        return self.entries[(i, j)]

    def __len__(self) -> int:
        return len(self.entries)

    def to_payload(self) -> Dict[str, Any]:
        return {
            "r": self.r,
            "code_version": self.code_version,
            "basis": [str(d) for d in self.basis],
            "entries": [
                [i, j, [[k, str(ScalarQ(c))] for k, c in sorted(row.items())]]
                for (i, j), row in sorted(self.entries.items())
            ],
        }

    @classmethod
    def from_payload(cls, payload: Mapping[str, Any]) -> "StructureTable":
        try:
            r = int(payload["r"])
            basis = tuple(BrauerDiagram.parse(text, r) for text in payload["basis"])
            entries = {
                (int(i), int(j)): {int(k): ScalarQ.parse(text).to_laurent() for k, text in row}
                for i, j, row in payload["entries"]
            }
            return cls(r, basis, entries, str(payload.get("code_version", "")))
        except (KeyError, TypeError, ValueError) as e:
            raise CacheError(f"Malformed structure table: {e}") from e

    def install(self, algebra: BMWAlgebra):
        for (i, j), row in self.entries.items():
            algebra._products[(self.basis[i], self.basis[j])] = {self.basis[k]: c for k, c in row.items()}


def build_structure_table(algebra: BMWAlgebra, workers: int = 1) -> StructureTable:
    basis = algebra.basis()
    for d in basis:
        algebra.lift(d)
    logger.info(f"Building BMW structure table at r={algebra.r} ({len(basis)}^2 products)")
    rows = parallel_map(algebra.product_row, basis, workers)
    entries: Dict[Tuple[int, int], Dict[int, LaurentPoly]] = {}
    for i, row in enumerate(rows):
        for b, coeffs in row.items():
            entries[(i, algebra.index(b))] = {algebra.index(k): c for k, c in coeffs.items()}
    logger.info(f"Structure table at r={algebra.r}: {len(entries)} entries, {len(algebra.engine)} reduced words")
    return StructureTable(algebra.r, basis, entries)


def cache_path(directory: Union[str, Path], r: int, code_version: str = CODE_VERSION) -> Path:
    digest = hashlib.sha256(f"{code_version}:{r}".encode()).hexdigest()[:16]
    return Path(directory) / f"bmw_table_r{r}_{digest}.json"


def save_structure_table(table: StructureTable, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(table.to_payload(), separators=(",", ":")) + "\n", encoding="utf-8")
    logger.info(f"Structure table saved to {path}")
    return path


def load_structure_table(path: Union[str, Path], algebra: BMWAlgebra, samples: int = 20) -> StructureTable:
    """Read a cached table, recompute a sample of entries and rerun the relation suite."""
    path = Path(path)
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise CacheError(f"Cannot read structure table {path}: {e}") from e
    table = StructureTable.from_payload(payload)
    if table.r != algebra.r or table.basis != algebra.basis():
        raise CacheError(f"Structure table {path} does not match the basis at r={algebra.r}")

    rng = random.Random(algebra.r)
    keys = sorted(table.entries)
    fresh = BMWAlgebra(algebra.r, algebra.engine.max_steps, limit=algebra.r)
    for i, j in rng.sample(keys, min(samples, len(keys))):
        expected = {fresh.index(k): c for k, c in fresh.basis_product(table.basis[i], table.basis[j]).items()}
        if expected != table.entries[(i, j)]:
            raise CacheError(f"Structure table {path} disagrees at ({i}, {j})")

    table.install(algebra)
    failed = [res.name for res in validate_relations(algebra) if not res.passed]
    if failed:
        raise CacheError(f"Structure table {path} breaks relations: {', '.join(failed)}")
    logger.info(f"Structure table loaded from {path}")
    return table


def structure_table(
    algebra: BMWAlgebra,
    cache_dir: Optional[Union[str, Path]] = None,
    code_version: str = CODE_VERSION,
    workers: int = 1,
) -> StructureTable:
    """Full table for ``algebra``, read from or written to ``cache_dir`` when given."""
    path = cache_path(cache_dir, algebra.r, code_version) if cache_dir is not None else None
    if path is not None and path.exists():
        try:
            return load_structure_table(path, algebra)
        except CacheError as e:
            logger.warning(f"Discarding cached structure table: {e}")
    table = build_structure_table(algebra, workers)
    table.code_version = code_version
    if path is not None:
        save_structure_table(table, path)
    return table
