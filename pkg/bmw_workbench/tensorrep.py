"""
Tensor representations of B_r(3) and BMW_r(q) on V^{(x)r}, with dim V = 3.

The quantum representation sends g_i to the R-matrix of U_q(sl2) on the
3-dimensional module, placed on factors i and i+1, and e_i to delta times the
projection onto the trivial summand of V (x) V. At q = 1 it becomes the
classical one: s_i flips two factors and e_i contracts against the invariant
form. Basis vectors of V^{(x)r} are numbered in base 3 with the first factor
as the most significant digit; v_0 is the highest weight vector of V.

Both representations are surjective onto the commutant of the quantum group,
so their images have dimension ``sum_d m_r(d)^2`` over the multiplicities of
the Bratteli diagram.
"""

import logging
import random
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Dict, Iterator, List, Literal, Mapping, Optional, Sequence, Tuple

from sympy import QQ
from sympy.polys.matrices import DomainMatrix

from .bmwq import (
    BMWAlgebra,
    RelationConstants,
    RelationResult,
    associativity_oracle,
    check_relations,
    phi_q_identities,
    q_ideal_closure,
    relation_instances,
    specialization_oracle,
    validate_relations,
)
from .brauer import (
    AlgebraElement,
    BrauerAlgebra,
    Letter,
    Word,
    diagram_to_word,
    ideal_closure,
    word_trie,
)
from .cellular import annihilated_simples
from .exceptions import IndexRangeError, ResourceGuardError, VerificationError
from .linalg import (
    QF,
    Subspace,
    Vector,
    combine,
    left_kernel,
    mat_vec,
    nonzero_dod,
    nullspace,
    nullspace_from_rref,
    rank,
    rref_rows,
    to_domain_element,
    transpose_rows,
)
from .partitions import lambda0
from .reports import RelationCheck, RelationReport, VerifyReport
from .scalars import DELTA, FIELD, RING, LaurentPoly, ScalarQ, quantum_integer

logger = logging.getLogger(__name__)

Mode = Literal["classical", "quantum"]

MAX_RANK_CLASSICAL = 5
MAX_RANK_QUANTUM_EXACT = 4
MAX_RANK_QUANTUM = 5

# Eigenvalue of the R-matrix on the summand of V (x) V with the given highest weight.
_R_EIGENVALUES = (
    (4, LaurentPoly.monomial(2)),
    (2, -LaurentPoly.monomial(-2)),
    (0, LaurentPoly.monomial(-4)),
)
_R_INV_EIGENVALUES = {4: LaurentPoly.monomial(-2), 2: -LaurentPoly.monomial(2), 0: LaurentPoly.monomial(4)}


def _scalar(value: LaurentPoly, point: Any = None) -> Any:
    """``value`` in QQ(q), or its rational value at ``q = point``."""
    return value.to_frac() if point is None else value.evaluate(point)


def _domain(point: Any = None):
    return QF if point is None else QQ


def _sparse(matrix: DomainMatrix) -> DomainMatrix:
    return DomainMatrix.from_dod(nonzero_dod(matrix), matrix.shape, matrix.domain)


# -- weights ----------------------------------------------------------------


def digits(index: int, r: int) -> Tuple[int, ...]:
    out = []
    for _ in range(r):
        index, d = divmod(index, 3)
        out.append(d)
    return tuple(reversed(out))


def weight(index: int, r: int) -> int:
    """K-weight of a basis vector; v_d has weight 2 - 2d."""
    return sum(2 - 2 * d for d in digits(index, r))


@lru_cache(maxsize=None)
def weight_spaces(r: int) -> Dict[int, Tuple[int, ...]]:
    out: Dict[int, List[int]] = {}
    for c in range(3 ** r):
        out.setdefault(weight(c, r), []).append(c)
    return {w: tuple(idx) for w, idx in sorted(out.items(), reverse=True)}


@lru_cache(maxsize=None)
def bratteli(r: int) -> Dict[int, int]:
    """Multiplicities ``m_r(d)`` of the simple summands V(d) of V^{(x)r}, with V = V(2)."""
    if r < 0:
        raise ValueError(f"rank must be non-negative, got {r}")
    if r == 0:
        return {0: 1}
    prev = bratteli(r - 1)
    out: Dict[int, int] = {}
    for d in range(0, 2 * r + 1, 2):
        if d == 0:
            m = prev.get(2, 0)
        else:
            m = prev.get(d - 2, 0) + prev.get(d, 0) + prev.get(d + 2, 0)
        if m:
            out[d] = m
    return out


def bratteli_dimension(r: int) -> int:
    """Dimension of the commutant, ``sum_d m_r(d)^2``."""
    return sum(m * m for m in bratteli(r).values())


# -- the quantum group ------------------------------------------------------

COPRODUCT = "E(x)1+K(x)E, F(x)K^-1+1(x)F, K(x)K"


@dataclass(frozen=True)
class QuantumSl2Data:
    """E, F, K on the 3-dimensional module, basis v_0, v_1, v_2 of weights 2, 0, -2."""

    E: DomainMatrix
    F: DomainMatrix
    K: DomainMatrix
    K_inv: DomainMatrix
    coproduct: str = COPRODUCT

    def check(self) -> bool:
        """KEK^-1 = q^2 E, KFK^-1 = q^-2 F, EF - FE = (K - K^-1)/(q - q^-1), E v_0 = 0."""
        E, F, K, K_inv = self.E, self.F, self.K, self.K_inv
        q2 = LaurentPoly.monomial(2).to_frac()
        q_2 = LaurentPoly.monomial(-2).to_frac()
        q_minus = LaurentPoly.from_coeffs({1: 1, -1: -1}).to_frac()
        checks = (
            K * E * K_inv == E.scalarmul(q2),
            K * F * K_inv == F.scalarmul(q_2),
            E * F - F * E == (K - K_inv).scalarmul(QF.one / q_minus),
            not any(E.to_dense().to_list()[i][0] for i in range(3)),
        )
        return all(checks)


@lru_cache(maxsize=None)
def quantum_sl2() -> QuantumSl2Data:
    two = quantum_integer(2).frac

    def dense(rows):
        return DomainMatrix(rows, (3, 3), QF).to_dense()

    z, one = QF.zero, QF.one
    k = [LaurentPoly.monomial(2 - 2 * d).to_frac() for d in range(3)]
    k_inv = [LaurentPoly.monomial(2 * d - 2).to_frac() for d in range(3)]
    return QuantumSl2Data(
        E=dense([[z, two, z], [z, z, two], [z, z, z]]),
        F=dense([[z, z, z], [one, z, z], [z, one, z]]),
        K=dense([[k[0], z, z], [z, k[1], z], [z, z, k[2]]]),
        K_inv=dense([[k_inv[0], z, z], [z, k_inv[1], z], [z, z, k_inv[2]]]),
    )


def coproduct_action(r: int, point: Any = None) -> Dict[str, DomainMatrix]:
    """Matrices of E, F, K on V^{(x)r} for the coproduct
    ``E -> E (x) 1 + K (x) E``, ``F -> F (x) K^-1 + 1 (x) F``, ``K -> K (x) K``.
    """
    domain = _domain(point)
    two = _scalar(quantum_integer(2).to_laurent(), point)
    k = [_scalar(LaurentPoly.monomial(2 - 2 * d), point) for d in range(3)]
    k_inv = [_scalar(LaurentPoly.monomial(2 * d - 2), point) for d in range(3)]
    n = 3 ** r
    e_dod: Dict[int, Dict[int, Any]] = {}
    f_dod: Dict[int, Dict[int, Any]] = {}
    k_dod: Dict[int, Dict[int, Any]] = {}
    for c in range(n):
        ds = digits(c, r)
        prefix = domain.one
        for pos, d in enumerate(ds):
            if d >= 1:
                e_dod.setdefault(c - 3 ** (r - 1 - pos), {})[c] = prefix * two
            prefix *= k[d]
        k_dod[c] = {c: prefix}
        suffix = domain.one
        for pos in range(r - 1, -1, -1):
            d = ds[pos]
            if d <= 1:
                f_dod.setdefault(c + 3 ** (r - 1 - pos), {})[c] = suffix
            suffix *= k_inv[d]
    shape = (n, n)
    return {
        "E": DomainMatrix.from_dod(e_dod, shape, domain),
        "F": DomainMatrix.from_dod(f_dod, shape, domain),
        "K": DomainMatrix.from_dod(k_dod, shape, domain),
    }


@dataclass(frozen=True)
class RMatrixPair:
    """Images of g, g^-1 and e on V (x) V, with the projectors onto V(4), V(2), V(0)."""

    R: DomainMatrix
    R_inv: DomainMatrix
    E: DomainMatrix
    projectors: Dict[int, DomainMatrix] = field(default_factory=dict)

    @property
    def domain(self):
        return self.R.domain

    def op(self, kind: str) -> DomainMatrix:
        if kind in ("g", "s"):
            return self.R
        if kind == "G":
            return self.R_inv
        if kind == "e":
            return self.E
        raise ValueError(f"Unknown generator kind {kind!r}")

    def specialize(self, point: Any) -> "RMatrixPair":
        """Entrywise evaluation at the rational point ``q = point``."""

        def at(matrix: DomainMatrix) -> DomainMatrix:
            dod = {}
            for i, row in nonzero_dod(matrix).items():
                values = {j: ScalarQ(v).evaluate(point) for j, v in row.items()}
                values = {j: v for j, v in values.items() if v}
                if values:
                    dod[i] = values
            return DomainMatrix.from_dod(dod, matrix.shape, QQ)

        return RMatrixPair(
            at(self.R), at(self.R_inv), at(self.E), {d: at(p) for d, p in self.projectors.items()}
        )


def highest_weight_vectors() -> Dict[int, Vector]:
    """Highest weight vector of each summand of V (x) V, normalized by the nullspace routine."""
    action = coproduct_action(2)
    e_rows = nonzero_dod(action["E"])
    spaces = weight_spaces(2)
    out: Dict[int, Vector] = {}
    for d, _ in _R_EIGENVALUES:
        idx = spaces[d]
        pos = {c: k for k, c in enumerate(idx)}
        rows = [{pos[c]: v for c, v in row.items() if c in pos} for row in e_rows.values()]
        kernel = nullspace(rows, len(idx), QF)
        if len(kernel) != 1:
            raise VerificationError(f"V (x) V has {len(kernel)} highest weight vectors of weight {d}")
        out[d] = {idx[k]: v for k, v in kernel[0].items()}
    return out


@lru_cache(maxsize=None)
def build_rmatrix() -> RMatrixPair:
    """The R-matrix on V (x) V from its eigenvalues on the summands V(4), V(2), V(0)."""
    f_matrix = coproduct_action(2)["F"]
    columns: List[Vector] = []
    labels: List[int] = []
    for d, vec in highest_weight_vectors().items():
        for _ in range(d + 1):
            columns.append(vec)
            labels.append(d)
            vec = mat_vec(f_matrix, vec)
    rows = {i: {j: col[i] for j, col in enumerate(columns) if i in col} for i in range(9)}
    basis = DomainMatrix.from_dod({i: row for i, row in rows.items() if row}, (9, 9), QF).to_dense()
    basis_inv = basis.inv()
    eigen = dict(_R_EIGENVALUES)

    def conjugate(values: Sequence[Any]) -> DomainMatrix:
        return _sparse(basis * DomainMatrix.diag(list(values), QF).to_dense() * basis_inv)

    R = conjugate([eigen[d].to_frac() for d in labels])
    R_inv = conjugate([_R_INV_EIGENVALUES[d].to_frac() for d in labels])
    projectors = {
        d: conjugate([QF.one if label == d else QF.zero for label in labels]) for d in (4, 2, 0)
    }
    E = _sparse(projectors[0].scalarmul(DELTA.to_frac()))
    logger.debug("Built the R-matrix of U_q(sl2) on V (x) V")
    return RMatrixPair(R, R_inv, E, projectors)


def classical_pair() -> RMatrixPair:
    """Flip and 3 times the projection onto the invariant line."""
    return build_rmatrix().specialize(1)


# -- operators on the tensor power -----------------------------------------


class EndoMatrix:
    """A linear operator on V^{(x)r}, stored as a sparse DomainMatrix."""

    __slots__ = ("r", "matrix")

    def __init__(self, r: int, matrix: DomainMatrix):
        self.r = r
        self.matrix = matrix.to_sparse()

    @classmethod
    def identity(cls, r: int, domain) -> "EndoMatrix":
        n = 3 ** r
        return cls(r, DomainMatrix.from_dod({i: {i: domain.one} for i in range(n)}, (n, n), domain))

    @property
    def domain(self):
        return self.matrix.domain

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def _same(self, other: "EndoMatrix"):
        if self.r != other.r:
            raise ValueError(f"Operators on V^{self.r} and V^{other.r} cannot be combined")

    def scale(self, c: Any) -> "EndoMatrix":
        c = to_domain_element(c, self.domain)
        if not c:
            return EndoMatrix(self.r, DomainMatrix.from_dod({}, self.matrix.shape, self.domain))
        return EndoMatrix(self.r, self.matrix.scalarmul(c))

    def __mul__(self, other: Any) -> "EndoMatrix":
        if isinstance(other, EndoMatrix):
            self._same(other)
            return EndoMatrix(self.r, self.matrix.matmul(other.matrix))
        return self.scale(other)

    def __rmul__(self, other: Any) -> "EndoMatrix":
        return self.scale(other)

    def __add__(self, other: "EndoMatrix") -> "EndoMatrix":
        if not isinstance(other, EndoMatrix):
            return NotImplemented
        self._same(other)
        return EndoMatrix(self.r, self.matrix.add(other.matrix))

    def __sub__(self, other: "EndoMatrix") -> "EndoMatrix":
        if not isinstance(other, EndoMatrix):
            return NotImplemented
        self._same(other)
        return EndoMatrix(self.r, self.matrix.sub(other.matrix))

    def __neg__(self) -> "EndoMatrix":
        return EndoMatrix(self.r, self.matrix.neg())

    def entries(self) -> Dict[int, Dict[int, Any]]:
        return nonzero_dod(self.matrix)

    def is_zero(self) -> bool:
        return not self.entries()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, EndoMatrix):
            return NotImplemented
        return self.r == other.r and self.domain == other.domain and self.entries() == other.entries()

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"EndoMatrix(r={self.r}, nnz={sum(len(row) for row in self.entries().values())})"


def place(op: DomainMatrix, i: int, r: int) -> EndoMatrix:
    """``1^(i-1) (x) op (x) 1^(r-i-1)`` for an operator ``op`` on V (x) V."""
    if not 1 <= i < r:
        raise IndexRangeError(f"Position {i} is out of range for V^{r}")
    columns: Dict[int, Dict[int, Any]] = {}
    for pr, row in nonzero_dod(op).items():
        for pc, value in row.items():
            columns.setdefault(pc, {})[pr] = value
    w_i, w_j = 3 ** (r - i), 3 ** (r - i - 1)
    n = 3 ** r
    dod: Dict[int, Dict[int, Any]] = {}
    for c in range(n):
        di, dj = (c // w_i) % 3, (c // w_j) % 3
        base = c - di * w_i - dj * w_j
        for pr, value in columns.get(3 * di + dj, {}).items():
            dod.setdefault(base + (pr // 3) * w_i + (pr % 3) * w_j, {})[c] = value
    return EndoMatrix(r, DomainMatrix.from_dod(dod, (n, n), op.domain))


def basis_words(algebra: BrauerAlgebra) -> List[Word]:
    """The word evaluated for each basis diagram: the descending lift for BMW, the canonical word otherwise."""
    if isinstance(algebra, BMWAlgebra):
        return [algebra.lift(d) for d in algebra.basis()]
    return [diagram_to_word(d) for d in algebra.basis()]


class TensorRepresentation:
    """Diagram words acting on V^{(x)r} through one choice of R-matrix data.

    ``mode="classical"`` uses the flip; ``mode="quantum"`` works over QQ(q), or
    over QQ at the rational point ``point`` when one is given.
    """

    def __init__(self, r: int, mode: Mode = "quantum", point: Any = None, limit: Optional[int] = None):
        if mode not in ("classical", "quantum"):
            raise ValueError(f"Unknown mode {mode!r}")
        if limit is None:
            limit = MAX_RANK_CLASSICAL if mode == "classical" else MAX_RANK_QUANTUM
        if r > limit:
            raise ResourceGuardError("tensor_rep", r, limit)
        if r < 1:
            raise ValueError(f"rank must be positive, got {r}")
        self.r = r
        self.mode = mode
        if mode == "classical":
            self.point = QQ(1)
            self.pair = classical_pair()
        else:
            self.point = None if point is None else QQ.convert(point)
            self.pair = build_rmatrix() if point is None else build_rmatrix().specialize(self.point)
        self.domain = self.pair.domain
        self._placed: Dict[Letter, EndoMatrix] = {}
        self._op_rows = {kind: nonzero_dod(self.pair.op(kind)) for kind in ("g", "G", "e")}
        self._op_rows["s"] = self._op_rows["g"]
        self._blocks: Dict[Tuple[str, int], List[Vector]] = {}
        self.rows0 = weight_spaces(r).get(0, ())
        self._pos0 = {c: k for k, c in enumerate(self.rows0)}

    # -- whole operators ----------------------------------------------

    def generator(self, letter: Letter) -> EndoMatrix:
        cached = self._placed.get(letter)
        if cached is None:
            kind, i = letter
            cached = place(self.pair.op(kind), i, self.r)
            self._placed[letter] = cached
        return cached

    def one(self) -> EndoMatrix:
        return EndoMatrix.identity(self.r, self.domain)

    def g(self, i: int) -> EndoMatrix:
        return self.generator(("g", i))

    def g_inv(self, i: int) -> EndoMatrix:
        return self.generator(("G", i))

    def e(self, i: int) -> EndoMatrix:
        return self.generator(("e", i))

    def word(self, word: Sequence[Letter]) -> EndoMatrix:
        """Product of the generator images in word order."""
        result = self.one()
        for letter in word:
            result = result * self.generator(letter)
        return result

    def image(self, x: AlgebraElement) -> EndoMatrix:
        words = basis_words(x.algebra)
        basis = x.algebra.basis()
        index = {d: k for k, d in enumerate(basis)}
        total = self.one().scale(0)
        for d, c in x.terms.items():
            total = total + self.word(words[index[d]]).scale(self._coefficient(c))
        return total

    def _coefficient(self, c: Any) -> Any:
        if self.domain == QF:
            return to_domain_element(c, QF)
        if isinstance(c, (LaurentPoly, ScalarQ)):
            return c.evaluate(self.point)
        return QQ.convert(c)

    def check_commutant(self) -> bool:
        """Every generator image commutes with the action of E, F and K."""
        action = {
            name: EndoMatrix(self.r, m) for name, m in coproduct_action(self.r, self.point).items()
        }
        letters = [(kind, i) for i in range(1, self.r) for kind in ("g", "e")]
        for letter in letters:
            x = self.generator(letter)
            for name, a in action.items():
                if x * a != a * x:
                    logger.error(f"{letter[0]}{letter[1]} does not commute with {name}")
                    return False
        return True

    def relation_results(self) -> List[RelationResult]:
        consts = RelationConstants.classical() if self.mode == "classical" else RelationConstants.quantum()
        if self.point is not None and self.mode == "quantum":
            c = RelationConstants.quantum()
            values = (c.q2, c.q_2, c.y, c.y_inv, c.z, c.delta)
            consts = RelationConstants(*(v.evaluate(self.point) for v in values))
        return check_relations(relation_instances(self.r, self.g, self.g_inv, self.e, self.one(), consts))

    def relation_report(self) -> RelationReport:
        setting = f"tensor-{self.mode}"
        checks = [RelationCheck(name=res.name, passed=res.passed) for res in self.relation_results()]
        return RelationReport(r=self.r, setting=setting, checks=checks)

    # -- weight-zero blocks -------------------------------------------

    @property
    def block_size(self) -> int:
        return len(self.rows0) ** 2

    def right_apply(self, row: Vector, letter: Letter) -> Vector:
        """Row vector ``row`` times the image of ``letter``."""
        kind, i = letter
        if not 1 <= i < self.r:
            raise IndexRangeError(f"Position {i} is out of range for V^{self.r}")
        op = self._op_rows[kind]
        w_i, w_j = 3 ** (self.r - i), 3 ** (self.r - i - 1)
        zero = self.domain.zero
        out: Vector = {}
        for c, x in row.items():
            di, dj = (c // w_i) % 3, (c // w_j) % 3
            base = c - di * w_i - dj * w_j
            for pc, value in op.get(3 * di + dj, {}).items():
                col = base + (pc // 3) * w_i + (pc % 3) * w_j
                s = out.get(col, zero) + x * value
                if s:
                    out[col] = s
                else:
                    out.pop(col, None)
        return out

    def block_images(self, words: Sequence[Word]) -> List[Vector]:
        """Flattened weight-zero blocks of the word images, sharing common prefixes.

        An intertwiner vanishes exactly when its weight-zero block does, since
        every summand V(d) of V^{(x)r} has a weight-zero vector.
        """
        n0 = len(self.rows0)
        out: List[Optional[Vector]] = [None] * len(words)
        start = [{c: self.domain.one} for c in self.rows0]

        def flatten(state: List[Vector]) -> Vector:
            return {k * n0 + self._pos0[c]: v for k, row in enumerate(state) for c, v in row.items()}

        def visit(node: Dict, state: List[Vector]):
            for owner in node.get(None, ()):
                out[owner] = flatten(state)
            for letter, child in node.items():
                if letter is not None:
                    visit(child, [self.right_apply(row, letter) for row in state])

        visit(word_trie(dict(enumerate(words))), start)
        return [v if v is not None else {} for v in out]

    def basis_blocks(self, algebra: BrauerAlgebra) -> List[Vector]:
        cached = self._blocks.get((type(algebra).__name__, algebra.r))
        if cached is None:
            cached = self.block_images(basis_words(algebra))
            self._blocks[(type(algebra).__name__, algebra.r)] = cached
        return cached

    def element_block(self, x: AlgebraElement) -> Vector:
        blocks = self.basis_blocks(x.algebra)
        coeffs = {x.algebra.index(d): self._coefficient(c) for d, c in x.terms.items()}
        return combine(coeffs, blocks, self.domain)


def eval_word(word: Sequence[Letter], r: int, mode: Mode = "quantum") -> EndoMatrix:
    """Image of a word over g_i, g_i^-1, e_i (and s_i) on V^{(x)r}."""
    return TensorRepresentation(r, mode).word(word)


def check_commutant(r: int, mode: Mode = "quantum") -> bool:
    return TensorRepresentation(r, mode).check_commutant()


def tensor_relations(r: int, mode: Mode = "quantum") -> RelationReport:
    """The defining relations and their consequences as identities of operators."""
    return TensorRepresentation(r, mode).relation_report()


# -- rank and kernel --------------------------------------------------------


@dataclass
class KernelResult:
    """Rank of a tensor representation and, when computed exactly, its kernel in diagram coordinates."""

    r: int
    mode: str
    method: str
    dimension: int
    rank: int
    kernel: Optional[Subspace] = None
    sample_points: List[str] = field(default_factory=list)
    annihilates: Optional[bool] = None

    @property
    def kernel_dim(self) -> int:
        return self.dimension - self.rank


def classical_kernel(r: int, algebra: Optional[BrauerAlgebra] = None) -> KernelResult:
    """Exact rank and kernel of B_r(3) -> End(V^{(x)r})."""
    algebra = algebra or BrauerAlgebra(r)
    rep = TensorRepresentation(r, "classical")
    rows = rep.basis_blocks(algebra)
    kernel = Subspace.span(left_kernel(rows, rep.block_size, QQ), algebra.dim, QQ)
    result = KernelResult(r, "classical", "exact", algebra.dim, algebra.dim - kernel.dim, kernel)
    logger.info(f"Classical tensor representation r={r}: rank {result.rank}, kernel {kernel.dim}")
    return result


def _random_point(rng: random.Random, height: int = 50):
    while True:
        x = QQ(rng.randint(-height, height), rng.randint(1, height))
        if x not in (QQ(0), QQ(1), QQ(-1)):
            return x


def sample_points(count: int, seed: int = 0, height: int = 50) -> List[Any]:
    """``count`` distinct rationals a/b with |a|, b <= ``height``, avoiding 0 and +-1."""
    # the integers +-2, ..., +-height alone give 2 (height - 1) candidates
    if height < 2 or count > 2 * (height - 1):
        raise ValueError(f"cannot draw {count} distinct points of height {height}")
    rng = random.Random(seed)
    points: List[Any] = []
    while len(points) < count:
        x = _random_point(rng, height)
        if x not in points:
            points.append(x)
    return points


def sampled_rank(
    r: int,
    points: int = 5,
    seed: int = 0,
    algebra: Optional[BMWAlgebra] = None,
    element: Optional[AlgebraElement] = None,
    limit: int = MAX_RANK_QUANTUM,
    height: int = 50,
) -> KernelResult:
    """Rank of the quantum representation at random rational points; the values must agree.

    Away from 0 and the roots of unity the specialization is semisimple, so a
    common value is the generic rank. When ``element`` is given the result
    also records whether it acts as zero at every point.
    """
    if r > limit:
        raise ResourceGuardError("sampled_rank", r, limit)
    algebra = algebra or BMWAlgebra(r)
    ranks: Dict[str, int] = {}
    annihilates: Optional[bool] = None if element is None else True
    for x in sample_points(points, seed, height):
        rep = TensorRepresentation(r, "quantum", point=x)
        blocks = rep.basis_blocks(algebra)
        ranks[str(x)] = rank(blocks, rep.block_size, QQ)
        if element is not None and rep.element_block(element):
            logger.warning(f"{element!r} acts non-trivially at q = {x}")
            annihilates = False
        logger.debug(f"Rank at q = {x}: {ranks[str(x)]}")
    values = set(ranks.values())
    if len(values) != 1:
        raise VerificationError(f"Sampled ranks disagree at r={r}: {ranks}", witness=ranks)
    value = values.pop()
    logger.info(f"Quantum tensor representation r={r}: rank {value} at {len(ranks)} sample points")
    return KernelResult(r, "quantum", "sampled", algebra.dim, value, None, list(ranks), annihilates)


def _evaluable(value: Any):
    s = ScalarQ(value)
    return s.to_laurent() if s.is_laurent() else s


def _evaluate_rows(rows: Sequence[Mapping[int, Any]], x: Any) -> List[Vector]:
    out: List[Vector] = []
    for row in rows:
        values = {j: v.evaluate(x) for j, v in row.items()}
        out.append({j: v for j, v in values.items() if v})
    return out


def _left_kernel_at(rows: Sequence[Vector], n: int, ncols: int) -> Tuple[Tuple[int, ...], List[Vector]]:
    reduced, pivots = rref_rows(transpose_rows(rows, ncols), n, QQ)
    return pivots, nullspace_from_rref(reduced, pivots, n, QQ)


def _integer_points(start: int = 2) -> Iterator[Any]:
    x = start
    while True:
        yield QQ(x)
        x += 1


def _reconstruct(samples: Sequence[Tuple[Any, Vector]], rng: random.Random) -> Optional[Vector]:
    """Rational functions through the sampled kernel vectors, over a common denominator.

    The denominator comes from a rational reconstruction of a random
    combination of the coordinates; numerators are then interpolated.
    """
    xs = [x for x, _ in samples]
    m = len(xs)
    support = sorted(set().union(*(v.keys() for _, v in samples)))
    weights = {j: QQ(rng.randint(1, 1000)) for j in support}
    combined = [sum((weights[j] * v.get(j, QQ.zero) for j in support), QQ.zero) for _, v in samples]
    degree = (m - 2) // 2
    system: List[Vector] = []
    for x, s in zip(xs, combined):
        row: Vector = {}
        for i in range(degree + 1):
            row[i] = x ** i
            if s:
                row[degree + 1 + i] = -s * x ** i
        system.append(row)
    solutions = nullspace(system, 2 * degree + 2, QQ)
    if not solutions:
        return None
    sol = solutions[0]
    num = RING.from_dict({(i,): sol[i] for i in range(degree + 1) if sol.get(i)})
    den = RING.from_dict({(i,): sol[degree + 1 + i] for i in range(degree + 1) if sol.get(degree + 1 + i)})
    if not den:
        return None
    den = den.exquo(num.gcd(den)).monic()
    vander = DomainMatrix([[x ** i for i in range(m)] for x in xs], (m, m), QQ)
    rhs = DomainMatrix(
        [[v.get(j, QQ.zero) * den(x) for j in support] for x, v in samples], (m, len(support)), QQ
    )
    coefficients = vander.lu_solve(rhs).to_list()
    out: Vector = {}
    for t, j in enumerate(support):
        numer = RING.from_dict({(i,): coefficients[i][t] for i in range(m) if coefficients[i][t]})
        if numer:
            out[j] = FIELD.new(numer, den)
    return out


def quantum_kernel_exact(
    r: int,
    algebra: Optional[BMWAlgebra] = None,
    seed: int = 0,
    start_points: int = 16,
    max_points: int = 256,
    limit: int = MAX_RANK_QUANTUM_EXACT,
) -> KernelResult:
    """Exact rank and kernel of BMW_r(q) -> End(V^{(x)r}) over QQ(q).

    Kernel vectors are computed at integer points, lifted to QQ(q) and checked
    exactly against the images. The lifted vectors give a lower bound for the
    kernel dimension, and the rank at any specialization bounds the generic
    rank from below, so a successful check settles both.
    """
    if r > limit:
        raise ResourceGuardError("quantum_kernel_exact", r, limit)
    algebra = algebra or BMWAlgebra(r)
    rep = TensorRepresentation(r, "quantum")
    exact_rows = rep.basis_blocks(algebra)
    ncols, n = rep.block_size, algebra.dim
    evaluable = [{j: _evaluable(v) for j, v in row.items()} for row in exact_rows]
    rng = random.Random(seed)
    points = _integer_points()
    base: Optional[Tuple[int, ...]] = None
    samples: List[Tuple[Any, List[Vector]]] = []
    wanted = start_points
    while True:
        while len(samples) < wanted:
            x = next(points)
            pivots, kernel = _left_kernel_at(_evaluate_rows(evaluable, x), n, ncols)
            if base is None or len(pivots) > len(base):
                base, samples = pivots, [(x, kernel)]
            elif pivots == base:
                samples.append((x, kernel))
            else:
                logger.debug(f"Skipping q = {x}: pivot pattern differs")
        if not samples[0][1]:
            vectors: List[Vector] = []
            break
        vectors = []
        for t in range(len(samples[0][1])):
            vec = _reconstruct([(x, kernel[t]) for x, kernel in samples], rng)
            if vec is None or combine(vec, exact_rows, QF):
                break
            vectors.append(vec)
        else:
            break
        wanted *= 2
        if wanted > max_points:
            raise VerificationError(f"Kernel reconstruction at r={r} did not converge within {max_points} points")
        logger.debug(f"Kernel reconstruction at r={r}: retrying with {wanted} points")
    kernel_space = Subspace.span(vectors, n, QF)
    result = KernelResult(
        r, "quantum", "exact", n, n - kernel_space.dim, kernel_space, [str(x) for x, _ in samples]
    )
    logger.info(f"Quantum tensor representation r={r}: rank {result.rank}, kernel {kernel_space.dim}")
    return result


def rep_rank_and_kernel(
    r: int,
    mode: Mode = "classical",
    exact: bool = True,
    seed: int = 0,
    points: int = 5,
    height: int = 50,
    start_points: int = 16,
    max_points: int = 256,
) -> KernelResult:
    if mode == "classical":
        if r > MAX_RANK_CLASSICAL:
            raise ResourceGuardError("tensor_rep", r, MAX_RANK_CLASSICAL)
        return classical_kernel(r)
    if exact and r <= MAX_RANK_QUANTUM_EXACT:
        return quantum_kernel_exact(r, seed=seed, start_points=start_points, max_points=max_points)
    return sampled_rank(r, points=points, seed=seed, height=height)


# -- engine checks ----------------------------------------------------------


def _block_product(a: Vector, b: Vector, n0: int, domain) -> Vector:
    """Product of two flattened ``n0 x n0`` blocks."""
    rows: Dict[int, Dict[int, Any]] = {}
    for key, value in b.items():
        m, j = divmod(key, n0)
        rows.setdefault(m, {})[j] = value
    out: Vector = {}
    for key, value in a.items():
        k, m = divmod(key, n0)
        for j, w in rows.get(m, {}).items():
            s = out.get(k * n0 + j, domain.zero) + value * w
            if s:
                out[k * n0 + j] = s
            else:
                out.pop(k * n0 + j, None)
    return out


def homomorphism_oracle(algebra: BMWAlgebra, samples: int = 200, seed: int = 0, height: int = 50) -> RelationResult:
    """The representation at a random rational q is multiplicative on random pairs of basis tangles."""
    rng = random.Random(seed)
    point = _random_point(rng, height)
    rep = TensorRepresentation(algebra.r, "quantum", point=point)
    n0 = len(rep.rows0)
    blocks = rep.basis_blocks(algebra)
    basis = algebra.basis()
    failures: List[str] = []
    for _ in range(samples):
        i, j = rng.randrange(len(basis)), rng.randrange(len(basis))
        product = algebra.diagram(basis[i]) * algebra.diagram(basis[j])
        if rep.element_block(product) != _block_product(blocks[i], blocks[j], n0, rep.domain):
            failures.append(f"{basis[i]} * {basis[j]}")
    name = f"representation is multiplicative at q = {point}"
    if failures:
        logger.error(f"{name}: {len(failures)} of {samples} failed, first at {failures[0]}")
    else:
        logger.info(f"{name}: {samples} pairs checked")
    return RelationResult(f"{name} ({samples} checked)", not failures)


def _as_report(r: int, setting: str, results: Sequence[RelationResult]) -> RelationReport:
    return RelationReport(r=r, setting=setting, checks=[RelationCheck(name=x.name, passed=x.passed) for x in results])


def phi_q_report(algebra: Optional[BMWAlgebra] = None) -> RelationReport:
    """Identities of Phi_q in BMW_4(q), together with eta_q(Phi_q) = 0 on V^{(x)4}."""
    algebra = algebra if algebra is not None and algebra.r == 4 else BMWAlgebra(4)
    results = phi_q_identities(algebra)
    annihilated = not TensorRepresentation(4, "quantum").element_block(algebra.phi())
    results.append(RelationResult("eta_q(Phi_q) = 0", annihilated))
    return _as_report(4, "phi-q", results)


def engine_reports(
    algebra: BMWAlgebra, samples: int = 200, seed: int = 0, height: int = 50, workers: int = 1
) -> List[RelationReport]:
    """Relation suite and oracles of the BMW engine at the rank of ``algebra``."""
    oracles = [
        specialization_oracle(algebra, workers),
        associativity_oracle(algebra, samples, seed),
        homomorphism_oracle(algebra, samples, seed, height),
    ]
    return [
        _as_report(algebra.r, "bmw-engine", validate_relations(algebra)),
        _as_report(algebra.r, "bmw-oracles", oracles),
    ]


# -- the main check ---------------------------------------------------------


def verify_main_theorem(
    r: int,
    mode: Mode = "classical",
    exact: bool = True,
    seed: int = 0,
    points: int = 5,
    workers: int = 1,
    height: int = 50,
    start_points: int = 16,
    max_points: int = 256,
    oracle_samples: int = 200,
) -> VerifyReport:
    """Compare the kernel of the tensor representation with the ideal generated by Phi.

    For r < 4 the element Phi does not exist and the representation is faithful.
    In quantum mode the BMW engine is checked first: its relations and oracles
    up to r = 4, and the identities of Phi_q in BMW_4(q) from r = 4 on.
    """
    if r < 1:
        raise ValueError(f"rank must be positive, got {r}")
    brauer = BrauerAlgebra(r)
    classical_ideal = (
        ideal_closure(brauer, [brauer.phi()], workers=workers) if r >= 4 else Subspace.zero(brauer.dim, QQ)
    )
    witnesses: List[str] = []
    relations: List[RelationReport] = []

    if mode == "classical":
        algebra: BrauerAlgebra = brauer
        result = rep_rank_and_kernel(r, "classical")
        ideal = classical_ideal
    else:
        algebra = BMWAlgebra(r)
        if r <= MAX_RANK_QUANTUM_EXACT:
            relations.extend(engine_reports(algebra, oracle_samples, seed, height, workers))
        if r >= 4:
            relations.append(phi_q_report(algebra))
        if exact and r <= MAX_RANK_QUANTUM_EXACT:
            result = quantum_kernel_exact(r, algebra, seed=seed, start_points=start_points, max_points=max_points)
        else:
            phi = algebra.phi() if r >= 4 else None
            result = sampled_rank(r, points=points, seed=seed, algebra=algebra, element=phi, height=height)
        ideal = (
            q_ideal_closure(algebra, [algebra.phi()], workers=workers) if r >= 4 else Subspace.zero(algebra.dim, QF)
        )

    if result.kernel is not None:
        equal = result.kernel == ideal
        if not equal:
            extra = ideal.first_missing(result.kernel)
            if extra is not None:
                witnesses.append(f"kernel element outside the ideal: {algebra.from_vector(extra)!r}")
            missing = result.kernel.first_missing(ideal)
            if missing is not None:
                witnesses.append(f"ideal element acting non-trivially: {algebra.from_vector(missing)!r}")
    else:
        # The ideal lies in the kernel once Phi_q acts as zero, so equal dimensions suffice.
        vanishes = result.annihilates is not False
        if not vanishes:
            witnesses.append("Phi_q acts non-trivially at a sample point")
        equal = vanishes and ideal.dim == result.kernel_dim

    expected = bratteli_dimension(r)
    if result.rank != expected:
        witnesses.append(f"rank {result.rank} differs from the commutant dimension {expected}")

    annihilated = annihilated_simples(r, [brauer.phi()] if r >= 4 else [])
    expected_labels = lambda0(r)
    annihilated_ok = set(annihilated) == set(expected_labels)
    if not annihilated_ok:
        witnesses.append("simple modules annihilated by the ideal differ from lambda0")

    if r <= MAX_RANK_QUANTUM_EXACT:
        relations.append(TensorRepresentation(r, mode).relation_report())
    for report in relations:
        if not report.passed:
            witnesses.append(f"{report.setting} relations failed: {', '.join(report.failures)}")

    passed = equal and result.rank == expected and annihilated_ok and all(rep.passed for rep in relations)
    if passed:
        logger.info(f"Kernel equals the ideal of Phi at r={r} ({mode}, {result.method})")
    else:
        logger.warning(f"Kernel check failed at r={r} ({mode}, {result.method})")
    return VerifyReport(
        r=r,
        mode=mode,
        method=result.method,  # type: ignore[arg-type]
        rank=result.rank,
        expected_rank=expected,
        kernel_dim=result.kernel_dim,
        ideal_dim=ideal.dim,
        equal=equal,
        annihilated=[str(lam) for lam in annihilated],
        lambda0=[str(lam) for lam in expected_labels],
        sample_points=result.sample_points if result.method == "sampled" else [],
        relations=relations,
        witnesses=witnesses,
        passed=passed,
    )
