"""
Exact coefficient arithmetic in one variable q.

Laurent polynomials are stored as ``q^shift * poly`` where ``poly`` is a sympy
``PolyElement`` over ``QQ`` with nonzero constant term. Rational functions wrap
elements of the sympy fraction field ``QQ(q)``, which cancel common factors on
construction, so equality of ``ScalarQ`` values is structural.

Everything lives in the subfield QQ(q); square roots of q are never needed.
"""

import logging
import re
from dataclasses import dataclass
from typing import Any, Dict, List, Mapping, Optional, Tuple, Union

from sympy import QQ
from sympy.polys.fields import field

from .exceptions import PoleAtOneError, ScalarError, ZeroDivisionScalarError

logger = logging.getLogger(__name__)

FIELD, _Q_FRAC = field("q", QQ)
RING = FIELD.ring
_X = RING.gens[0]

Number = Union[int, Any]  # int or an element of QQ

_TERM_RE = re.compile(r"^(?:(?P<coeff>\d+(?:/\d+)?)\*)?q\^(?P<exp>-?\d+)$|^(?P<const>\d+(?:/\d+)?)$")


def _is_rational(value: Any) -> bool:
    if isinstance(value, bool):
        return False
    if isinstance(value, int):
        return True
    return QQ.of_type(value)


def _shift_down(poly, k: int):
    if k == 0:
        return poly
    return RING.from_dict({(e - k,): c for (e,), c in poly.items()})


def _shift_up(poly, k: int):
    if k == 0:
        return poly
    return poly.mul_monom((k,))


def _format_rational(c) -> str:
    num, den = QQ.numer(c), QQ.denom(c)
    return f"{num}" if den == 1 else f"{num}/{den}"


def _parse_rational(text: str):
    if "/" in text:
        num, den = text.split("/")
        return QQ(int(num), int(den))
    return QQ(int(text))


class LaurentPoly:
    """Element of QQ[q, q^-1], normalized as ``q^shift * poly`` with ``poly(0) != 0``."""

    __slots__ = ("shift", "poly", "_hash")

    def __init__(self, shift: int = 0, poly=None):
        poly = RING.zero if poly is None else poly
        if not poly:
            self.shift = 0
            self.poly = RING.zero
        else:
            low = poly.tail_degree()
            self.shift = shift + low
            self.poly = _shift_down(poly, low)
        self._hash: Optional[int] = None

    # -- constructors -------------------------------------------------

    @classmethod
    def from_coeffs(cls, coeffs: Mapping[int, Number]) -> "LaurentPoly":
        items = {e: QQ.convert(c) for e, c in coeffs.items() if c}
        if not items:
            return cls()
        low = min(items)
        return cls(low, RING.from_dict({(e - low,): c for e, c in items.items()}))

    @classmethod
    def constant(cls, c: Number) -> "LaurentPoly":
        return cls(0, RING.ground_new(QQ.convert(c)))

    @classmethod
    def monomial(cls, exp: int, c: Number = 1) -> "LaurentPoly":
        return cls(exp, RING.ground_new(QQ.convert(c)))

    @classmethod
    def coerce(cls, value: Any) -> "LaurentPoly":
        if isinstance(value, LaurentPoly):
            return value
        if _is_rational(value):
            return cls.constant(value)
        raise TypeError(f"Cannot interpret {value!r} as a Laurent polynomial")

    # -- inspection ---------------------------------------------------

    @property
    def coeffs(self) -> Dict[int, Any]:
        return {e + self.shift: c for (e,), c in self.poly.items()}

    def is_zero(self) -> bool:
        return not self.poly

    def __bool__(self) -> bool:
        return bool(self.poly)

    def low_degree(self) -> int:
        if not self.poly:
            raise ScalarError("zero polynomial has no degree")
        return self.shift

    def high_degree(self) -> int:
        if not self.poly:
            raise ScalarError("zero polynomial has no degree")
        return self.shift + self.poly.degree()

    def is_constant(self) -> bool:
        return not self.poly or (self.shift == 0 and self.poly.degree() == 0)

    def constant_value(self):
        if not self.is_constant():
            raise ScalarError(f"{self} is not a constant")
        return self.poly.coeff(1) if self.poly else QQ.zero

    # -- arithmetic ---------------------------------------------------

    def _aligned(self, other: "LaurentPoly"):
        low = min(self.shift, other.shift)
        return low, _shift_up(self.poly, self.shift - low), _shift_up(other.poly, other.shift - low)

    def __add__(self, other: Any):
        if isinstance(other, LaurentPoly):
            pass
        elif _is_rational(other):
            other = LaurentPoly.constant(other)
        else:
            return NotImplemented
        if not self.poly:
            return other
        if not other.poly:
            return self
        low, a, b = self._aligned(other)
        return LaurentPoly(low, a + b)

    __radd__ = __add__

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly(self.shift, -self.poly)

    def __sub__(self, other: Any):
        if not isinstance(other, LaurentPoly) and not _is_rational(other):
            return NotImplemented
        return self + (-LaurentPoly.coerce(other))

    def __rsub__(self, other: Any):
        if not _is_rational(other):
            return NotImplemented
        return LaurentPoly.constant(other) + (-self)

    def __mul__(self, other: Any):
        if isinstance(other, LaurentPoly):
            return LaurentPoly(self.shift + other.shift, self.poly * other.poly)
        if _is_rational(other):
            return LaurentPoly(self.shift, self.poly.mul_ground(QQ.convert(other)))
        return NotImplemented

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "LaurentPoly":
        if n < 0:
            if self.poly.degree() != 0:
                raise ScalarError(f"{self} is not a unit in the Laurent ring")
            c = self.poly.coeff(1)
            return LaurentPoly.monomial(-self.shift * (-n), QQ.one / c ** (-n))
        return LaurentPoly(self.shift * n, self.poly ** n)

    def __eq__(self, other: Any) -> bool:
        if isinstance(other, LaurentPoly):
            return self.shift == other.shift and self.poly == other.poly
        if _is_rational(other):
            return self == LaurentPoly.constant(other)
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.shift, tuple(sorted(self.poly.items()))))
        return self._hash

    # -- evaluation ---------------------------------------------------

    def evaluate(self, x: Number):
        """Exact value at the rational point ``q = x``."""
        x = QQ.convert(x)
        if not self.poly:
            return QQ.zero
        if not x and self.shift < 0:
            raise ScalarError(f"{self} has a pole at q = 0")
        value = QQ.zero
        for (e,), c in self.poly.items():
            value += c * x ** e
        if self.shift >= 0:
            return value * x ** self.shift
        return value / x ** (-self.shift)

    def specialize_q1(self):
        return self.evaluate(1)

    def to_frac(self):
        if self.shift >= 0:
            return FIELD.new(_shift_up(self.poly, self.shift))
        return FIELD.new(self.poly, _X ** (-self.shift))

    def bar(self) -> "LaurentPoly":
        """Image under q -> q^-1."""
        return LaurentPoly.from_coeffs({-e: c for e, c in self.coeffs.items()})

    # -- text ---------------------------------------------------------

    def __str__(self) -> str:
        if not self.poly:
            return "0"
        pieces: List[str] = []
        for e, c in sorted(self.coeffs.items(), reverse=True):
            negative = c < 0
            mag = -c if negative else c
            body = f"q^{e}" if mag == 1 else f"{_format_rational(mag)}*q^{e}"
            if not pieces:
                pieces.append(f"-{body}" if negative else body)
            else:
                pieces.append(f"- {body}" if negative else f"+ {body}")
        return " ".join(pieces)

    def __repr__(self) -> str:
        return f"LaurentPoly({self})"

    @classmethod
    def parse(cls, text: str) -> "LaurentPoly":
        text = text.strip()
        if text == "0":
            return cls()
        tokens = text.split(" ")
        coeffs: Dict[int, Any] = {}
        sign = 1
        for token in tokens:
            if token in ("+", "-"):
                sign = 1 if token == "+" else -1
                continue
            if token.startswith("-"):
                sign, token = -1, token[1:]
            match = _TERM_RE.match(token)
            if match is None:
                raise ValueError(f"Malformed Laurent term {token!r} in {text!r}")
            if match.group("const") is not None:
                exp, coeff = 0, _parse_rational(match.group("const"))
            else:
                exp = int(match.group("exp"))
                coeff = _parse_rational(match.group("coeff")) if match.group("coeff") else QQ.one
            coeffs[exp] = coeffs.get(exp, QQ.zero) + sign * coeff
            sign = 1
        return cls.from_coeffs(coeffs)


def _to_frac(value: Any):
    if isinstance(value, ScalarQ):
        return value._frac
    if isinstance(value, LaurentPoly):
        return value.to_frac()
    if _is_rational(value):
        return FIELD.ground_new(QQ.convert(value))
    if getattr(value, "field", None) == FIELD:
        return value
    return None


class ScalarQ:
    """Element of QQ(q) in canonical form.

    ``num``/``den`` expose the canonical pair: ``den`` has lowest exponent 0
    and leading coefficient 1, and is coprime to ``num``.
    """

    __slots__ = ("_frac", "_canon", "_hash")

    def __init__(self, value: Any = 0):
        frac = _to_frac(value)
        if frac is None:
            raise TypeError(f"Cannot interpret {value!r} as an element of QQ(q)")
        self._frac = frac
        self._canon: Optional[Tuple[LaurentPoly, LaurentPoly]] = None
        self._hash: Optional[int] = None

    @classmethod
    def _wrap(cls, frac) -> "ScalarQ":
        obj = cls.__new__(cls)
        obj._frac = frac
        obj._canon = None
        obj._hash = None
        return obj

    @classmethod
    def from_pair(cls, num: Any, den: Any) -> "ScalarQ":
        n, d = _to_frac(num), _to_frac(den)
        if n is None or d is None:
            raise TypeError("numerator and denominator must be rational or Laurent")
        if not d:
            raise ZeroDivisionScalarError("zero denominator")
        return cls._wrap(n / d)

    @property
    def frac(self):
        return self._frac

    def _canonical(self) -> Tuple[LaurentPoly, LaurentPoly]:
        if self._canon is None:
            numer, denom = self._frac.numer, self._frac.denom
            low = denom.tail_degree()
            denom = _shift_down(denom, low)
            lc = denom.LC
            self._canon = (
                LaurentPoly(-low, numer.quo_ground(lc)),
                LaurentPoly(0, denom.quo_ground(lc)),
            )
        return self._canon

    @property
    def num(self) -> LaurentPoly:
        return self._canonical()[0]

    @property
    def den(self) -> LaurentPoly:
        return self._canonical()[1]

    def is_laurent(self) -> bool:
        return self.den == 1

    def to_laurent(self) -> LaurentPoly:
        if not self.is_laurent():
            raise ScalarError(f"{self} is not a Laurent polynomial")
        return self.num

    def is_zero(self) -> bool:
        return not self._frac

    def __bool__(self) -> bool:
        return bool(self._frac)

    # -- arithmetic ---------------------------------------------------

    def __add__(self, other: Any):
        o = _to_frac(other)
        if o is None:
            return NotImplemented
        return ScalarQ._wrap(self._frac + o)

    __radd__ = __add__

    def __sub__(self, other: Any):
        o = _to_frac(other)
        if o is None:
            return NotImplemented
        return ScalarQ._wrap(self._frac - o)

    def __rsub__(self, other: Any):
        o = _to_frac(other)
        if o is None:
            return NotImplemented
        return ScalarQ._wrap(o - self._frac)

    def __mul__(self, other: Any):
        o = _to_frac(other)
        if o is None:
            return NotImplemented
        return ScalarQ._wrap(self._frac * o)

    __rmul__ = __mul__

    def __neg__(self) -> "ScalarQ":
        return ScalarQ._wrap(-self._frac)

    def __truediv__(self, other: Any):
        o = _to_frac(other)
        if o is None:
            return NotImplemented
        if not o:
            raise ZeroDivisionScalarError(f"division of {self} by zero")
        return ScalarQ._wrap(self._frac / o)

    def __rtruediv__(self, other: Any):
        o = _to_frac(other)
        if o is None:
            return NotImplemented
        return ScalarQ._wrap(o) / self

    def __pow__(self, n: int) -> "ScalarQ":
        if n < 0:
            return self.inv() ** (-n)
        return ScalarQ._wrap(self._frac ** n)

    def inv(self) -> "ScalarQ":
        if not self._frac:
            raise ZeroDivisionScalarError("inverse of the zero scalar")
        return ScalarQ._wrap(1 / self._frac)

    def __eq__(self, other: Any) -> bool:
        o = _to_frac(other)
        if o is None:
            return NotImplemented
        return self._frac == o

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self._canonical())
        return self._hash

    # -- specialization -----------------------------------------------

    def evaluate(self, x: Number):
        num, den = self._canonical()
        d = den.evaluate(x)
        if not d:
            raise ScalarError(f"{self} has a pole at q = {x}")
        return num.evaluate(x) / d

    def specialize_q1(self):
        num, den = self._canonical()
        d = den.evaluate(1)
        if not d:
            raise PoleAtOneError(f"{self} has a pole at q = 1")
        return num.evaluate(1) / d

    def bar(self) -> "ScalarQ":
        num, den = self._canonical()
        return ScalarQ.from_pair(num.bar(), den.bar())

    # -- text ---------------------------------------------------------

    def __str__(self) -> str:
        num, den = self._canonical()
        return f"{num} / {den}"

    def __repr__(self) -> str:
        return f"ScalarQ({self})"

    @classmethod
    def parse(cls, text: str) -> "ScalarQ":
        if " / " not in text:
            return cls(LaurentPoly.parse(text))
        num, den = text.split(" / ")
        return cls.from_pair(LaurentPoly.parse(num), LaurentPoly.parse(den))


Scalar = Union[ScalarQ, LaurentPoly]


def as_scalar(value: Any) -> ScalarQ:
    return value if isinstance(value, ScalarQ) else ScalarQ(value)


def inv(a: Any) -> ScalarQ:
    return as_scalar(a).inv()


def specialize_q1(a: Any):
    """Evaluate at q = 1; raises PoleAtOneError where the value is undefined."""
    if _is_rational(a):
        return QQ.convert(a)
    return as_scalar(a).specialize_q1()


def quantum_integer(n: int) -> ScalarQ:
    """Balanced quantum integer [n] = q^(n-1) + q^(n-3) + ... + q^(1-n)."""
    if n < 0:
        raise ValueError(f"quantum_integer expects n >= 0, got {n}")
    return ScalarQ(LaurentPoly.from_coeffs({n - 1 - 2 * k: 1 for k in range(n)}))


# The numerators of [2], [3] and [3] - 1 factor over QQ into these.
_S_FACTORS = (
    _X,
    _X ** 2 + 1,
    _X ** 2 + _X + 1,
    _X ** 2 - _X + 1,
    _X ** 4 + 1,
)


@dataclass(frozen=True)
class DenominatorSupport:
    """Irreducible monic factors of a denominator, with multiplicities."""

    factors: Tuple[Tuple[LaurentPoly, int], ...]

    def as_strings(self) -> List[str]:
        return [f"({f})^{m}" for f, m in self.factors]

    def __str__(self) -> str:
        return " * ".join(self.as_strings()) if self.factors else "1"


def _poly_denominator(a: ScalarQ):
    """Denominator of ``a`` as an honest polynomial (q-powers included)."""
    num, den = a._canonical()
    poly = _shift_up(den.poly, den.shift)
    if num.shift < 0:
        poly = _shift_up(poly, -num.shift)
    return poly


def support_in_S(a: Any) -> Tuple[bool, DenominatorSupport]:
    """Factor the denominator of ``a`` over QQ and test membership in the localization at S."""
    a = as_scalar(a)
    denom = _poly_denominator(a)
    factors: List[Tuple[LaurentPoly, int]] = []
    ok = True
    if denom.degree() > 0:
        _, parts = denom.factor_list()
        for f, m in parts:
            f = f.monic()
            if not any(f == s for s in _S_FACTORS):
                ok = False
            factors.append((LaurentPoly(0, f), m))
    factors.sort(key=lambda fm: (fm[0].high_degree(), str(fm[0])))
    return ok, DenominatorSupport(tuple(factors))


Q = LaurentPoly.monomial(1)
Q_INV = LaurentPoly.monomial(-1)
ONE = LaurentPoly.constant(1)


def delta_q() -> LaurentPoly:
    """Loop value q^2 + 1 + q^-2."""
    return LaurentPoly.from_coeffs({2: 1, 0: 1, -2: 1})


def y_q() -> LaurentPoly:
    """Kink factor q^-4."""
    return LaurentPoly.monomial(-4)


def z_q() -> LaurentPoly:
    """Skein coefficient q^2 - q^-2."""
    return LaurentPoly.from_coeffs({2: 1, -2: -1})


DELTA = delta_q()
Y = y_q()
Y_INV = LaurentPoly.monomial(4)
Z = z_q()
