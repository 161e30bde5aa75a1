"""
Cellular structure of the Brauer algebra B_r(delta).

The cell module W_r(lambda), |lambda| = t, is realised as dangles tensored with
the Specht module S(lambda): a dangle is the top half of a diagram with ``t``
free points, and a diagram acts on it by stacking. Gram forms, radicals, simple
modules, Hom spaces, composition factors and the F/G functors are all computed
with exact rational linear algebra on the resulting action matrices.
"""

import logging
import random
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

from sympy import QQ
from sympy.polys.matrices import DomainMatrix

from .bmwq import RelationConstants, RelationResult, check_relations, relation_instances
from .brauer import (
    AlgebraElement,
    BrauerAlgebra,
    BrauerDiagram,
    Letter,
    Word,
    compose_matchings,
    diagram_to_word,
    double_factorial,
    enumerate_diagrams,
    is_star_stable,
    perfect_matchings,
)
from .exceptions import (
    IndexRangeError,
    NotStarStableError,
    RankMismatchError,
    RankTooSmallError,
    ResourceGuardError,
    VerificationError,
)
from .linalg import (
    Subspace,
    Vector,
    left_kernel,
    mat_vec,
    nonzero_dod,
    nullspace,
    parallel_map,
    rows_of,
    rref_rows,
    to_domain_element,
    transpose_rows,
)
from .partitions import EMPTY, LambdaR, Partition, lambda_r
from .symgrp import SpechtModule, specht_cached, standard_tableaux

logger = logging.getLogger(__name__)

MAX_RANK_RADICAL = 6
MAX_RANK_FACTORS = 5
MAX_RANK_FUNCTOR_G = 3
MAX_RANK_TRANSFER = 7


def generator_letters(r: int) -> List[Letter]:
    return [("s", i) for i in range(1, r)] + [("e", i) for i in range(1, r)]


def _letter_diagram(letter: Letter, r: int) -> BrauerDiagram:
    kind, i = letter
    return BrauerDiagram.e(i, r) if kind == "e" else BrauerDiagram.s(i, r)


@lru_cache(maxsize=None)
def _word(d: BrauerDiagram) -> Word:
    return diagram_to_word(d)


def _columns(matrix: DomainMatrix) -> Dict[int, Vector]:
    cols: Dict[int, Vector] = {}
    for i, row in nonzero_dod(matrix).items():
        for j, value in row.items():
            cols.setdefault(j, {})[i] = value
    return cols


def _dense(dod: Dict[int, Dict[int, Any]], n: int, m: Optional[int] = None) -> DomainMatrix:
    return DomainMatrix.from_dod(dod, (n, n if m is None else m), QQ).to_dense()


# -- dangles --------------------------------------------------------------


@dataclass(frozen=True)
class Dangle:
    """Top half of a diagram: ``r`` positions, ``(r - t) / 2`` arcs and ``t`` free points.

    ``partner`` has length ``r + t``; positions are ``0..r-1`` and the end of
    the ``k``-th free point (in increasing order) is ``r + k``.
    """

    r: int
    t: int
    partner: Tuple[int, ...]

    def __post_init__(self):
        if (self.r - self.t) % 2:
            raise ValueError(f"t = {self.t} and r = {self.r} have different parity")

    @property
    def free(self) -> Tuple[int, ...]:
        return tuple(self.partner[self.r + k] for k in range(self.t))

    @property
    def arcs(self) -> List[Tuple[int, int]]:
        return [(p, q) for p, q in enumerate(self.partner[: self.r]) if p < q < self.r]

    @classmethod
    def build(cls, r: int, free: Sequence[int], arcs: Sequence[Tuple[int, int]]) -> "Dangle":
        partner = [-1] * (r + len(free))
        for a, b in arcs:
            partner[a], partner[b] = b, a
        for k, p in enumerate(sorted(free)):
            partner[p], partner[r + k] = r + k, p
        return cls(r, len(free), tuple(partner))

    def __str__(self) -> str:
        arcs = ",".join(f"({a + 1},{b + 1})" for a, b in self.arcs)
        free = ",".join(str(p + 1) for p in self.free)
        return f"<{arcs}|{free}>"


@lru_cache(maxsize=None)
def enumerate_dangles(r: int, t: int) -> Tuple[Dangle, ...]:
    """All C(r, t) * (r - t - 1)!! dangles in a fixed order."""
    if t < 0 or t > r or (r - t) % 2:
        return ()
    out: List[Dangle] = []
    for free in combinations(range(r), t):
        rest = tuple(p for p in range(r) if p not in free)
        for arcs in perfect_matchings(rest):
            out.append(Dangle.build(r, free, arcs))
    return tuple(out)


def act_on_dangle(partner: Sequence[int], u: Dangle) -> Optional[Tuple[Dangle, Tuple[int, ...], int]]:
    """Stack a diagram over ``u``: the new dangle, the residual permutation and the loop count.

    Returns None when two free points get joined, which kills the element.
    """
    r, t = u.r, u.t
    out, loops = compose_matchings(partner, r, r, u.partner, t)
    ends = out[r:]
    if any(p >= r for p in ends):
        return None
    free = sorted(ends)
    slot = {p: j for j, p in enumerate(free)}
    perm = [0] * t
    for k, p in enumerate(ends):
        perm[slot[p]] = k + 1
    arcs = [(p, out[p]) for p in range(r) if out[p] < r and p < out[p]]
    return Dangle.build(r, free, arcs), tuple(perm), loops


def pair_dangles(u: Dangle, v: Dangle) -> Optional[Tuple[Tuple[int, ...], int]]:
    """Stack ``u*`` over ``v``: the permutation of the ``t`` strands and the loop count, or None."""
    r, t = u.r, u.t
    upper = [0] * (t + r)
    for k in range(t):
        upper[k] = t + u.partner[r + k]
    for p in range(r):
        q = u.partner[p]
        upper[t + p] = t + q if q < r else q - r
    out, loops = compose_matchings(upper, t, r, v.partner, t)
    if any(out[j] < t for j in range(t)):
        return None
    return tuple(out[j] - t + 1 for j in range(t)), loops


# -- modules --------------------------------------------------------------


class ModuleRep:
    """A finite-dimensional B_r(delta)-module given by its generator matrices."""

    def __init__(self, r: int, dim: int, action: Dict[Letter, DomainMatrix], label: str = "", delta: Any = 3):
        self.r = r
        self.dim = dim
        self.action = action
        self.label = label
        self.delta = QQ.convert(delta)

    def letters(self) -> List[Letter]:
        return generator_letters(self.r)

    def matrix(self, letter: Letter) -> DomainMatrix:
        kind, i = letter
        key = ("s" if kind in ("g", "G") else kind, i)
        if key not in self.action:
            raise IndexRangeError(f"{kind}{i} does not act on a rank {self.r} module")
        return self.action[key]

    def identity(self) -> DomainMatrix:
        return DomainMatrix.eye(self.dim, QQ).to_dense()

    def word_matrix(self, word: Sequence[Letter]) -> DomainMatrix:
        result = self.identity()
        for letter in word:
            result = result * self.matrix(letter)
        return result

    def diagram_matrix(self, d: BrauerDiagram) -> DomainMatrix:
        if d.r != self.r:
            raise RankMismatchError(f"diagram of rank {d.r} on a rank {self.r} module")
        return self.word_matrix(_word(d))

    def element_matrix(self, x: AlgebraElement) -> DomainMatrix:
        acc = DomainMatrix.zeros((self.dim, self.dim), QQ).to_dense()
        for d, c in x.terms.items():
            acc = acc + self.diagram_matrix(d) * to_domain_element(c, QQ)
        return acc

    def check_relations(self) -> List[RelationResult]:
        def s(i: int) -> DomainMatrix:
            return self.matrix(("s", i))

        def e(i: int) -> DomainMatrix:
            return self.matrix(("e", i))

        consts = RelationConstants.classical()
        consts = RelationConstants(consts.q2, consts.q_2, consts.y, consts.y_inv, consts.z, self.delta)
        return check_relations(relation_instances(self.r, s, s, e, self.identity(), consts))

    def _restrict(self, space: Subspace, letters: Sequence[Letter]) -> Dict[Letter, DomainMatrix]:
        basis = space.vectors()
        action: Dict[Letter, DomainMatrix] = {}
        for letter in letters:
            a = self.matrix(letter)
            dod: Dict[int, Dict[int, Any]] = {}
            for j, v in enumerate(basis):
                image = mat_vec(a, v)
                if space.reduce(image):
                    raise VerificationError(f"subspace of {self.label} is not stable under {letter}", witness=j)
                for i, c in enumerate(space.coordinates(image)):
                    if c:
                        dod.setdefault(i, {})[j] = c
            action[letter] = _dense(dod, space.dim)
        return action

    def submodule(self, space: Subspace) -> "ModuleRep":
        action = self._restrict(space, self.letters())
        return ModuleRep(self.r, space.dim, action, f"sub({self.label})", self.delta)

    def quotient(self, space: Subspace) -> "ModuleRep":
        pivots = set(space.pivots)
        keep = [j for j in range(self.dim) if j not in pivots]
        slot = {j: k for k, j in enumerate(keep)}
        action: Dict[Letter, DomainMatrix] = {}
        for letter in self.letters():
            cols = _columns(self.matrix(letter))
            dod: Dict[int, Dict[int, Any]] = {}
            for k, j in enumerate(keep):
                for i, c in space.reduce(cols.get(j, {})).items():
                    dod.setdefault(slot[i], {})[k] = c
            action[letter] = _dense(dod, len(keep))
        return ModuleRep(self.r, len(keep), action, f"{self.label}/sub", self.delta)

    def __repr__(self) -> str:
        return f"{type(self).__name__}(r={self.r}, dim={self.dim}, label={self.label!r})"


class CellModule(ModuleRep):
    """W_r(lambda) with basis dangle (x) standard tableau and its Gram matrix."""

    def __init__(self, r: int, lam: Partition, delta: Any = 3):
        self.lam = lam
        self.t = lam.size
        self.specht = _specht(lam)
        self.dangles = enumerate_dangles(r, self.t)
        self.dangle_index = {u: i for i, u in enumerate(self.dangles)}
        self._direct: Dict[BrauerDiagram, DomainMatrix] = {}
        self._gram: Optional[DomainMatrix] = None
        super().__init__(r, len(self.dangles) * self.specht.dim, {}, f"W{r}({lam})", delta)
        self.action = {letter: self.diagram_matrix(_letter_diagram(letter, r)) for letter in self.letters()}
        logger.debug(f"Cell module {self.label}: {len(self.dangles)} dangles x dim S = {self.specht.dim}")

    def basis_labels(self) -> List[str]:
        return [f"{u}{tab}" for u in self.dangles for tab in self.specht.basis]

    def diagram_matrix(self, d: BrauerDiagram) -> DomainMatrix:
        if d.r != self.r:
            raise RankMismatchError(f"diagram of rank {d.r} on a rank {self.r} module")
        cached = self._direct.get(d)
        if cached is None:
            cached = self._diagram_action(d)
            self._direct[d] = cached
        return cached

    def _diagram_action(self, d: BrauerDiagram) -> DomainMatrix:
        n = self.specht.dim
        dod: Dict[int, Dict[int, Any]] = {}
        for a, u in enumerate(self.dangles):
            image = act_on_dangle(d.partner, u)
            if image is None:
                continue
            v, perm, loops = image
            b = self.dangle_index[v]
            scale = self.delta ** loops
            for k2, row in nonzero_dod(self.specht.permutation_matrix(perm)).items():
                for k, value in row.items():
                    dod.setdefault(b * n + k2, {})[a * n + k] = scale * value
        return _dense(dod, self.dim)

    @property
    def gram(self) -> DomainMatrix:
        """phi(u (x) x, v (x) y) = delta^loops * x^T G rho(u* v) y."""
        if self._gram is None:
            n, gamma = self.specht.dim, self.specht.form
            dod: Dict[int, Dict[int, Any]] = {}
            for a, u in enumerate(self.dangles):
                for b, v in enumerate(self.dangles):
                    paired = pair_dangles(u, v)
                    if paired is None:
                        continue
                    perm, loops = paired
                    scale = self.delta ** loops
                    for k, row in nonzero_dod(self.specht.permutation_matrix(perm)).items():
                        for k2, value in row.items():
                            dod.setdefault(a * n + k, {})[b * n + k2] = scale * gamma[k] * value
            self._gram = _dense(dod, self.dim)
        return self._gram

    def gram_symmetric(self) -> bool:
        return self.gram == self.gram.transpose()

    def gram_invariant(self) -> bool:
        """rho(a)^T G = G rho(a*) on the generators, all of which are self-adjoint."""
        g = self.gram
        return all(self.matrix(letter).transpose() * g == g * self.matrix(letter) for letter in self.letters())


def _specht(lam: Partition) -> SpechtModule:
    if lam == EMPTY:
        return SpechtModule(EMPTY, standard_tableaux(EMPTY), {}, (QQ.one,))
    return specht_cached(lam)


@lru_cache(maxsize=None)
def cell_module(r: int, lam: Partition, delta: Any = 3) -> CellModule:
    if lam not in lambda_r(r):
        raise ValueError(f"{lam} is not a cell label at rank {r}")
    return CellModule(r, lam, delta)


@lru_cache(maxsize=None)
def _gram_echelon(module: CellModule) -> Tuple[List[Vector], Tuple[int, ...]]:
    return rref_rows(rows_of(module.gram), module.dim, QQ)


def gram_radical(module: CellModule) -> Tuple[int, Subspace]:
    """Rank of the Gram form and its radical Rad(lambda)."""
    reduced, pivots = _gram_echelon(module)
    radical = Subspace.span(nullspace(reduced, module.dim, QQ), module.dim, QQ)
    return len(pivots), radical


def simple_dimension(r: int, lam: Partition) -> int:
    return gram_radical(cell_module(r, lam))[0]


@lru_cache(maxsize=None)
def simple_module(r: int, lam: Partition) -> ModuleRep:
    """L_r(lambda) = W_r(lambda) / Rad(lambda)."""
    module = cell_module(r, lam)
    simple = module.quotient(gram_radical(module)[1])
    simple.label = f"L{r}({lam})"
    return simple


@dataclass
class CellDatum:
    """Cell labels and cell modules of B_r(3)."""

    r: int
    lambdas: LambdaR
    modules: Dict[Partition, CellModule] = field(default_factory=dict)

    def dimension_check(self) -> bool:
        return sum(m.dim ** 2 for m in self.modules.values()) == double_factorial(2 * self.r - 1)


def cell_datum(r: int) -> CellDatum:
    lambdas = lambda_r(r)
    return CellDatum(r, lambdas, {lam: cell_module(r, lam) for lam in lambdas})


# -- homomorphisms and composition factors --------------------------------


def hom_space(source: ModuleRep, target: ModuleRep) -> List[DomainMatrix]:
    """Basis of {X : X rho_source(g) = rho_target(g) X for every generator g}."""
    if source.r != target.r:
        raise RankMismatchError(f"modules of rank {source.r} and {target.r}")
    m, n = source.dim, target.dim
    if not m or not n:
        return []
    equations: List[Vector] = []
    for letter in source.letters():
        cols = _columns(source.matrix(letter))
        rows = nonzero_dod(target.matrix(letter))
        for i in range(n):
            row_n = rows.get(i, {})
            for col in range(m):
                eq: Vector = {}
                for j, value in cols.get(col, {}).items():
                    eq[i * m + j] = value
                for k, value in row_n.items():
                    idx = k * m + col
                    s = eq.get(idx, QQ.zero) - value
                    if s:
                        eq[idx] = s
                    else:
                        eq.pop(idx, None)
                if eq:
                    equations.append(eq)
    out = []
    for vec in nullspace(equations, n * m, QQ):
        dod: Dict[int, Dict[int, Any]] = {}
        for idx, value in vec.items():
            dod.setdefault(idx // m, {})[idx % m] = value
        out.append(_dense(dod, n, m))
    logger.debug(f"Hom({source.label}, {target.label}) has dimension {len(out)}")
    return out


def is_isomorphic(a: ModuleRep, b: ModuleRep, seed: int = 0, attempts: int = 4) -> bool:
    """Look for an invertible intertwiner among random combinations of the Hom basis."""
    if a.r != b.r or a.dim != b.dim:
        return False
    if a.dim == 0:
        return True
    homs = hom_space(a, b)
    if not homs:
        return False
    rng = random.Random(seed)
    for _ in range(attempts):
        x = DomainMatrix.zeros((b.dim, a.dim), QQ).to_dense()
        for h in homs:
            x = x + h * QQ(rng.randint(-9, 9))
        if x.det():
            return True
    return False


def composition_factors(module: ModuleRep, limit: int = MAX_RANK_FACTORS) -> Dict[Partition, int]:
    """Multiplicities of the simples L(mu) along the radical series of ``module``.

    Each layer is the head of the current submodule; its radical is the joint
    kernel of all maps onto simple modules.
    """
    r = module.r
    if r > limit:
        raise ResourceGuardError("composition_factors", r, limit)
    simples = [(lam, simple_module(r, lam)) for lam in lambda_r(r)]
    simples = [(lam, s) for lam, s in simples if s.dim]
    factors: Counter = Counter()
    current = module
    while current.dim:
        kernel_rows: List[Vector] = []
        for lam, simple in simples:
            homs = hom_space(current, simple)
            if homs:
                factors[lam] += len(homs)
                for h in homs:
                    kernel_rows.extend(row for row in rows_of(h) if row)
        radical = Subspace.span(nullspace(kernel_rows, current.dim, QQ), current.dim, QQ)
        if radical.dim == current.dim:
            raise VerificationError(f"{module.label} has a layer with no simple head")
        current = current.submodule(radical)
    total = sum(mult * simple_dimension(r, lam) for lam, mult in factors.items())
    if total != module.dim:
        raise VerificationError(f"factor dimensions of {module.label} add up to {total}, not {module.dim}")
    logger.info(f"Composition factors of {module.label}: " + ", ".join(f"{lam}:{m}" for lam, m in factors.items()))
    return dict(factors)


def cyclicity_check(module: ModuleRep, w: Vector) -> bool:
    """Whether the submodule generated by ``w`` is the whole module."""
    span = Subspace.span([w], module.dim, QQ)
    frontier = span.vectors()
    while frontier:
        images = [mat_vec(module.matrix(letter), v) for v in frontier for letter in module.letters()]
        grown = span.sum(Subspace.span(images, module.dim, QQ))
        old = set(span.pivots)
        frontier = [v for v, p in zip(grown.vectors(), grown.pivots) if p not in old]
        span = grown
    return span.dim == module.dim


# -- annihilators and the algebra radical ---------------------------------


@lru_cache(maxsize=None)
def _annihilator_rows(r: int, lam: Partition) -> Tuple[Tuple[Vector, ...], int]:
    """For each diagram D, the flattened matrix R_G rho(D) with R_G the echelon rows of the Gram matrix."""
    module = cell_module(r, lam)
    reduced, pivots = _gram_echelon(module)
    width = len(pivots) * module.dim
    if not width:
        return tuple({} for _ in enumerate_diagrams(r)), 0
    rg = DomainMatrix.from_dod(dict(enumerate(reduced)), (len(pivots), module.dim), QQ).to_dense()
    rows = []
    for d in enumerate_diagrams(r):
        product = rg * module.diagram_matrix(d)
        rows.append({i * module.dim + j: v for i, row in nonzero_dod(product).items() for j, v in row.items()})
    return tuple(rows), width


@lru_cache(maxsize=None)
def annihilator(r: int, lam: Partition) -> Subspace:
    """Ann_{B_r}(L(lambda)) in diagram coordinates."""
    rows, width = _annihilator_rows(r, lam)
    n = len(rows)
    if not width:
        return Subspace.full(n, QQ)
    return Subspace.span(left_kernel(list(rows), width, QQ), n, QQ)


def _kills(module: CellModule, x: AlgebraElement) -> bool:
    reduced, pivots = _gram_echelon(module)
    if not pivots:
        return True
    rg = DomainMatrix.from_dod(dict(enumerate(reduced)), (len(pivots), module.dim), QQ).to_dense()
    return not nonzero_dod(rg * module.element_matrix(x))


def annihilated_simples(r: int, ideal: Union[Subspace, Sequence[AlgebraElement]]) -> List[Partition]:
    """The labels lambda with J L(lambda) = 0.

    ``ideal`` is either the subspace J itself or a list of generators of J.
    """
    out = []
    for lam in lambda_r(r):
        if isinstance(ideal, Subspace):
            killed = annihilator(r, lam).contains(ideal)
        else:
            module = cell_module(r, lam)
            killed = all(_kills(module, x) for x in ideal)
        if killed:
            out.append(lam)
    return out


def algebra_radical(r: int, limit: int = MAX_RANK_RADICAL, workers: int = 1) -> Subspace:
    """The Jacobson radical: elements acting as zero on every simple module."""
    if r > limit:
        raise ResourceGuardError("algebra_radical", r, limit)
    lambdas = list(lambda_r(r))
    blocks = parallel_map(lambda lam: _annihilator_rows(r, lam), lambdas, workers)
    n = len(enumerate_diagrams(r))
    rows: List[Vector] = [dict() for _ in range(n)]
    offset = 0
    for block, width in blocks:
        for i, row in enumerate(block):
            for j, value in row.items():
                rows[i][offset + j] = value
        offset += width
    radical = Subspace.span(left_kernel(rows, offset, QQ), n, QQ) if offset else Subspace.full(n, QQ)
    logger.info(f"Algebra radical of B_{r}(3): dimension {radical.dim}")
    return radical


def check_char_rad(r: int, lam: Partition, batch: int = 64) -> bool:
    """Rad(lambda) equals the joint kernel of the diagrams with at most |lambda| through strands."""
    module = cell_module(r, lam)
    diagrams = [d for d in enumerate_diagrams(r) if d.through <= lam.size]
    reduced: List[Vector] = []
    pivots: Tuple[int, ...] = ()
    for start in range(0, len(diagrams), batch):
        rows = list(reduced)
        for d in diagrams[start:start + batch]:
            rows.extend(row for row in rows_of(module.diagram_matrix(d)) if row)
        reduced, pivots = rref_rows(rows, module.dim, QQ)
        if len(pivots) == module.dim:
            break
    kernel = Subspace.span(nullspace(reduced, module.dim, QQ), module.dim, QQ)
    radical = gram_radical(module)[1]
    if kernel != radical:
        logger.warning(f"{module.label}: annihilator of B^t has dim {kernel.dim}, radical has dim {radical.dim}")
    return kernel == radical


# -- functors F and G -----------------------------------------------------


def functor_F(module: ModuleRep) -> ModuleRep:
    """e_{r-1} M as a B_{r-2}-module."""
    r = module.r
    if r < 3:
        raise RankTooSmallError(f"F needs a module of rank at least 3, got {r}")
    e = module.matrix(("e", r - 1))
    image = Subspace.span(transpose_rows(rows_of(e), module.dim), module.dim, QQ)
    action = module._restrict(image, generator_letters(r - 2))
    return ModuleRep(r - 2, image.dim, action, f"F({module.label})", module.delta)


def functor_G(module: ModuleRep, limit: int = MAX_RANK_FUNCTOR_G) -> ModuleRep:
    """B_{r+2} e_{r+1} (x)_{B_r} M, presented as a quotient of diagrams (x) M."""
    r = module.r
    if r > limit:
        raise ResourceGuardError("functor_G", r, limit)
    big = r + 2
    diagrams = [d for d in enumerate_diagrams(big) if d.partner[big + r] == big + r + 1]
    index = {d: i for i, d in enumerate(diagrams)}
    m, delta = module.dim, module.delta
    ambient = len(diagrams) * m

    action: Dict[Letter, DomainMatrix] = {}
    for letter in generator_letters(big):
        g = _letter_diagram(letter, big)
        dod: Dict[int, Dict[int, Any]] = {}
        for x, d in enumerate(diagrams):
            y, loops = g.compose(d)
            for j in range(m):
                dod.setdefault(index[y] * m + j, {})[x * m + j] = delta ** loops
        action[letter] = DomainMatrix.from_dod(dod, (ambient, ambient), QQ)
    free = ModuleRep(big, ambient, action, f"B{big}e{big - 1}(x){module.label}", delta)

    relations: List[Vector] = []
    for letter in module.letters():
        g = _letter_diagram(letter, big)
        cols = _columns(module.matrix(letter))
        for x, d in enumerate(diagrams):
            y, loops = d.compose(g)
            for j in range(m):
                rel: Vector = {index[y] * m + j: delta ** loops}
                for k, value in cols.get(j, {}).items():
                    idx = x * m + k
                    s = rel.get(idx, QQ.zero) - value
                    if s:
                        rel[idx] = s
                    else:
                        rel.pop(idx, None)
                if rel:
                    relations.append(rel)
    out = free.quotient(Subspace.span(relations, ambient, QQ))
    out.label = f"G({module.label})"
    logger.debug(f"{out.label}: {ambient} free generators, quotient dimension {out.dim}")
    return out


# -- criteria -------------------------------------------------------------


def thmrad_check(r: int, ideal: Subspace, limit: int = MAX_RANK_FACTORS) -> Tuple[bool, bool]:
    """Both sides of: J contains the radical iff every W(lambda), lambda in Lambda0(J),
    has all its other composition factors labelled outside Lambda0(J)."""
    if r > limit:
        raise ResourceGuardError("thmrad_check", r, limit)
    if not is_star_stable(BrauerAlgebra(r), ideal):
        raise NotStarStableError(f"ideal of dimension {ideal.dim} at r={r} is not *-stable")
    lhs = ideal.contains(algebra_radical(r))
    zero = set(annihilated_simples(r, ideal))
    rhs = True
    for lam in zero:
        factors = composition_factors(cell_module(r, lam), limit=limit)
        if any(mu in zero for mu, mult in factors.items() if mu != lam and mult):
            rhs = False
            break
    logger.info(f"Radical criterion at r={r}, dim J = {ideal.dim}: lhs={lhs}, rhs={rhs}")
    return lhs, rhs


def radical_sum_check(r: int, ideal: Subspace, kernel: Subspace) -> bool:
    """dim(J + radical) equals the dimension of ``kernel``."""
    return ideal.sum(algebra_radical(r)).dim == kernel.dim


def is_factor(r: int, lam: Partition, mu: Partition) -> bool:
    if lam not in lambda_r(r) or mu not in lambda_r(r):
        return False
    return composition_factors(cell_module(r, lam)).get(mu, 0) > 0


def shift_check(lam: Partition, mu: Partition, r: int) -> Tuple[bool, bool]:
    """Whether L(mu) is a factor of W(lambda) at rank ``r`` and at rank |mu|."""
    s = mu.size
    at_s = is_factor(s, lam, mu) if s >= 1 else False
    return is_factor(r, lam, mu), at_s


def hom_transfer(lam: Partition, mu: Partition, r: int, limit: int = MAX_RANK_TRANSFER) -> Tuple[int, int]:
    """dim Hom(W(mu), W(lambda)) at rank ``r`` and at rank ``r + 2``."""
    if r + 2 > limit:
        raise ResourceGuardError("hom_transfer", r + 2, limit)
    return (
        len(hom_space(cell_module(r, mu), cell_module(r, lam))),
        len(hom_space(cell_module(r + 2, mu), cell_module(r + 2, lam))),
    )
