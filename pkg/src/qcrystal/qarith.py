"""Exact arithmetic in Q(q).

Two value types live here:

* :class:`LaurentPoly` -- an element of Q[q, q^-1], stored as a sorted tuple of
  ``(exponent, Fraction)`` pairs.
* :class:`ScalarQ` -- an element of Q(q), stored as ``c * q^e * N(q) / D(q)``
  where ``N`` and ``D`` are primitive integer polynomials with nonzero,
  positive constant terms and ``gcd(N, D) = 1``.  That form is canonical, so
  equality is structural and ``val0`` is just ``e``.

Polynomials inside :class:`ScalarQ` are ascending tuples of Python ints.
The one-variable integer gcd is delegated to sympy's dense-polynomial
routines; everything else is done here.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Union

from sympy.polys.densearith import dup_exquo
from sympy.polys.domains import ZZ
from sympy.polys.euclidtools import dup_gcd

__all__ = [
    "LaurentPoly",
    "ScalarQ",
    "NotRegularAtZero",
    "ZERO",
    "ONE",
    "Q",
    "qpow",
    "as_scalar",
    "bar",
    "val0",
    "eval0",
    "qint",
    "qint_s",
    "qint_factorial",
    "qbinom",
    "qbrace",
    "qbrace_factorial",
    "qbrace_binom",
    "parse_scalar",
]

Poly = tuple  # ascending tuple of ints
Number = Union[int, Fraction]


class NotRegularAtZero(ArithmeticError):
    """Raised when a value with a pole at q = 0 is evaluated at q = 0."""


# ---------------------------------------------------------------------------
# integer polynomial helpers (ascending coefficient tuples)
# ---------------------------------------------------------------------------


def _trim(a: list) -> list:
    while a and a[-1] == 0:
        a.pop()
    return a


def _padd(a: Poly, b: Poly, ca: int = 1, cb: int = 1) -> list:
    n = max(len(a), len(b))
    out = [0] * n
    for k, x in enumerate(a):
        out[k] = ca * x
    for k, x in enumerate(b):
        out[k] += cb * x
    return _trim(out)


def _pmul(a: Poly, b: Poly) -> tuple:
    if len(a) == 1:
        c = a[0]
        return tuple(c * x for x in b)
    if len(b) == 1:
        c = b[0]
        return tuple(c * x for x in a)
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return tuple(out)


def _shift(a: Poly, k: int) -> tuple:
    return (0,) * k + tuple(a) if k else tuple(a)


def _gcd(a: Poly, b: Poly) -> tuple:
    if len(a) == 1 or len(b) == 1:
        return (1,)
    g = dup_gcd([ZZ(x) for x in reversed(a)], [ZZ(x) for x in reversed(b)], ZZ)
    return tuple(int(x) for x in reversed(g))


def _exquo(a: Poly, b: Poly) -> tuple:
    if len(b) == 1:
        d = b[0]
        return tuple(x // d for x in a)
    r = dup_exquo([ZZ(x) for x in reversed(a)], [ZZ(x) for x in reversed(b)], ZZ)
    return tuple(int(x) for x in reversed(r))


def _content(a: Iterable[int]) -> int:
    g = 0
    for x in a:
        g = math.gcd(g, x)
        if g == 1:
            break
    return g


# ---------------------------------------------------------------------------
# ScalarQ
# ---------------------------------------------------------------------------


class ScalarQ:
    """An element of Q(q) in canonical reduced form.

    Do not call the constructor with unnormalized data; use :func:`as_scalar`,
    :func:`qpow` or arithmetic on existing values.
    """

    __slots__ = ("c", "e", "num", "den", "_hash")

    def __init__(self, c: Fraction, e: int, num: tuple, den: tuple):
        self.c = c
        self.e = e
        self.num = num
        self.den = den
        self._hash = None

    # -- construction -------------------------------------------------------

    @staticmethod
    def _build(c: Fraction, e: int, num, den, reduce: bool = True) -> "ScalarQ":
        num = list(num)
        _trim(num)
        if not num or c == 0:
            return ZERO
        k = 0
        while num[k] == 0:
            k += 1
        if k:
            num = num[k:]
            e += k
        den = list(den)
        _trim(den)
        k = 0
        while den[k] == 0:
            k += 1
        if k:
            den = den[k:]
            e -= k
        num = tuple(num)
        den = tuple(den)
        if reduce and len(den) > 1 and len(num) > 1:
            g = _gcd(num, den)
            if len(g) > 1:
                num = _exquo(num, g)
                den = _exquo(den, g)
        cn = _content(num)
        if num[0] < 0:
            cn = -cn
        if cn != 1:
            num = tuple(x // cn for x in num)
            c = c * cn
        cd = _content(den)
        if den[0] < 0:
            cd = -cd
        if cd != 1:
            den = tuple(x // cd for x in den)
            c = c / cd
        return ScalarQ(Fraction(c), e, num, den)

    # -- predicates / accessors ---------------------------------------------

    def __bool__(self) -> bool:
        return self.c != 0

    def is_zero(self) -> bool:
        return self.c == 0

    def is_laurent(self) -> bool:
        return self.den == (1,)

    def is_constant(self) -> bool:
        return self.c == 0 or (self.e == 0 and self.num == (1,) and self.den == (1,))

    @property
    def numerator(self) -> "LaurentPoly":
        if self.c == 0:
            return LaurentPoly({})
        c = self.c
        return LaurentPoly({self.e + k: c * x for k, x in enumerate(self.num) if x})

    @property
    def denominator(self) -> "LaurentPoly":
        return LaurentPoly({k: Fraction(x) for k, x in enumerate(self.den) if x})

    def to_laurent(self) -> "LaurentPoly":
        if self.den != (1,):
            raise ValueError(f"{self} is not a Laurent polynomial")
        return self.numerator

    def val0(self) -> Union[int, float]:
        """Order of vanishing at q = 0 (``inf`` for zero)."""
        return self.e if self.c else math.inf

    def eval0(self) -> Fraction:
        if self.c == 0:
            return Fraction(0)
        if self.e < 0:
            raise NotRegularAtZero(str(self))
        if self.e > 0:
            return Fraction(0)
        return self.c * Fraction(self.num[0], self.den[0])

    def val_inf(self) -> Union[int, float]:
        """Order of vanishing at q = infinity, i.e. -(degree of num/den)."""
        if self.c == 0:
            return math.inf
        return -(self.e + len(self.num) - len(self.den))

    def sign(self) -> int:
        return (self.c > 0) - (self.c < 0)

    def bar(self) -> "ScalarQ":
        """Substitute q -> q^-1."""
        if self.c == 0:
            return self
        e = -self.e - (len(self.num) - 1) + (len(self.den) - 1)
        return ScalarQ._build(self.c, e, self.num[::-1], self.den[::-1], reduce=False)

    def evaluate(self, x: Number) -> Fraction:
        """Value at the rational point q = x (x must not be a pole)."""
        x = Fraction(x)
        if self.c == 0:
            return Fraction(0)
        n = Fraction(0)
        for a in reversed(self.num):
            n = n * x + a
        d = Fraction(0)
        for a in reversed(self.den):
            d = d * x + a
        if d == 0:
            raise ZeroDivisionError(f"pole of {self} at q={x}")
        return self.c * x ** self.e * n / d

    def series(self, lo: int, hi: int) -> list:
        """Coefficients of q^lo .. q^hi in the expansion around q = 0."""
        out = [Fraction(0)] * (hi - lo + 1)
        if self.c == 0 or hi < self.e:
            return out
        need = hi - self.e + 1
        num = self.num
        den = self.den
        d0 = Fraction(den[0])
        coeffs: list = []
        for k in range(need):
            s = Fraction(num[k]) if k < len(num) else Fraction(0)
            for j in range(1, min(k, len(den) - 1) + 1):
                s -= den[j] * coeffs[k - j]
            coeffs.append(s / d0)
        for k, a in enumerate(coeffs):
            p = self.e + k
            if lo <= p <= hi:
                out[p - lo] = self.c * a
        return out

    # -- arithmetic ---------------------------------------------------------

    def __neg__(self) -> "ScalarQ":
        if self.c == 0:
            return self
        return ScalarQ(-self.c, self.e, self.num, self.den)

    def __add__(self, other) -> "ScalarQ":
        if not isinstance(other, ScalarQ):
            other = as_scalar(other)
        if self.c == 0:
            return other
        if other.c == 0:
            return self
        e = min(self.e, other.e)
        n1 = _shift(self.num, self.e - e)
        n2 = _shift(other.num, other.e - e)
        a1, b1 = self.c.numerator, self.c.denominator
        a2, b2 = other.c.numerator, other.c.denominator
        if self.den == other.den:
            num = _padd(n1, n2, a1 * b2, a2 * b1)
            return ScalarQ._build(Fraction(1, b1 * b2), e, num, self.den)
        g = _gcd(self.den, other.den)
        d1g = _exquo(self.den, g)
        d2g = _exquo(other.den, g)
        num = _padd(_pmul(n1, d2g), _pmul(n2, d1g), a1 * b2, a2 * b1)
        return ScalarQ._build(Fraction(1, b1 * b2), e, num, _pmul(self.den, d2g))

    __radd__ = __add__

    def __sub__(self, other) -> "ScalarQ":
        if not isinstance(other, ScalarQ):
            other = as_scalar(other)
        return self + (-other)

    def __rsub__(self, other) -> "ScalarQ":
        return as_scalar(other) + (-self)

    def __mul__(self, other) -> "ScalarQ":
        if not isinstance(other, ScalarQ):
            if isinstance(other, (int, Fraction)):
                if other == 0 or self.c == 0:
                    return ZERO
                return ScalarQ(self.c * other, self.e, self.num, self.den)
            other = as_scalar(other)
        if self.c == 0 or other.c == 0:
            return ZERO
        c = self.c * other.c
        e = self.e + other.e
        if self.den == (1,) and other.den == (1,):
            return ScalarQ(c, e, _pmul(self.num, other.num), (1,))
        n1, d1, n2, d2 = self.num, self.den, other.num, other.den
        g1 = _gcd(n1, d2)
        if len(g1) > 1:
            n1, d2 = _exquo(n1, g1), _exquo(d2, g1)
        g2 = _gcd(n2, d1)
        if len(g2) > 1:
            n2, d1 = _exquo(n2, g2), _exquo(d1, g2)
        return ScalarQ._build(c, e, _pmul(n1, n2), _pmul(d1, d2), reduce=False)

    __rmul__ = __mul__

    def inverse(self) -> "ScalarQ":
        if self.c == 0:
            raise ZeroDivisionError("inverse of zero in Q(q)")
        return ScalarQ._build(1 / self.c, -self.e, self.den, self.num, reduce=False)

    def __truediv__(self, other) -> "ScalarQ":
        if not isinstance(other, ScalarQ):
            other = as_scalar(other)
        return self * other.inverse()

    def __rtruediv__(self, other) -> "ScalarQ":
        return as_scalar(other) * self.inverse()

    def __pow__(self, n: int) -> "ScalarQ":
        if n < 0:
            return self.inverse() ** (-n)
        out = ONE
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    # -- comparison / hashing -----------------------------------------------

    def _key(self):
        return (self.c, self.e, self.num, self.den) if self.c else (0,)

    def __eq__(self, other) -> bool:
        if isinstance(other, ScalarQ):
            return self._key() == other._key()
        if isinstance(other, (int, Fraction)):
            return self._key() == as_scalar(other)._key()
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self._key())
        return self._hash

    # -- rendering ----------------------------------------------------------

    def __str__(self) -> str:
        if self.c == 0:
            return "0"
        num = self.numerator
        if self.den == (1,):
            return str(num)
        return f"({num})/({self.denominator})"

    def __repr__(self) -> str:
        return f"ScalarQ({self})"


def as_scalar(x) -> ScalarQ:
    if isinstance(x, ScalarQ):
        return x
    if isinstance(x, LaurentPoly):
        return x.to_scalar()
    if isinstance(x, (int, Fraction)):
        if x == 0:
            return ZERO
        return ScalarQ(Fraction(x), 0, (1,), (1,))
    if isinstance(x, str):
        return parse_scalar(x)
    raise TypeError(f"cannot coerce {type(x).__name__} to ScalarQ")


ZERO = ScalarQ(Fraction(0), 0, (), (1,))
ONE = ScalarQ(Fraction(1), 0, (1,), (1,))


@lru_cache(maxsize=None)
def qpow(k: int) -> ScalarQ:
    """q^k."""
    return ScalarQ(Fraction(1), k, (1,), (1,))


Q = qpow(1)


def bar(x: ScalarQ) -> ScalarQ:
    return as_scalar(x).bar()


def val0(x: ScalarQ):
    return as_scalar(x).val0()


def eval0(x: ScalarQ) -> Fraction:
    return as_scalar(x).eval0()


# ---------------------------------------------------------------------------
# LaurentPoly
# ---------------------------------------------------------------------------


class LaurentPoly:
    """An element of Q[q, q^-1] with no stored zero coefficients."""

    __slots__ = ("terms",)

    def __init__(self, coeffs: Union[Mapping[int, Number], Iterable] = ()):
        if isinstance(coeffs, Mapping):
            items = coeffs.items()
        else:
            items = coeffs
        acc: dict = {}
        for k, v in items:
            acc[int(k)] = acc.get(int(k), 0) + Fraction(v)
        self.terms = tuple(sorted((k, v) for k, v in acc.items() if v != 0))

    @classmethod
    def monomial(cls, k: int, c: Number = 1) -> "LaurentPoly":
        return cls({k: c})

    def as_dict(self) -> dict:
        return dict(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def min_degree(self):
        return self.terms[0][0] if self.terms else math.inf

    def max_degree(self):
        return self.terms[-1][0] if self.terms else -math.inf

    def coefficient(self, k: int) -> Fraction:
        return dict(self.terms).get(k, Fraction(0))

    def __add__(self, other) -> "LaurentPoly":
        other = _as_laurent(other)
        d = self.as_dict()
        for k, v in other.terms:
            d[k] = d.get(k, 0) + v
        return LaurentPoly(d)

    __radd__ = __add__

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly({k: -v for k, v in self.terms})

    def __sub__(self, other) -> "LaurentPoly":
        return self + (-_as_laurent(other))

    def __rsub__(self, other) -> "LaurentPoly":
        return _as_laurent(other) - self

    def __mul__(self, other) -> "LaurentPoly":
        other = _as_laurent(other)
        d: dict = {}
        for k1, v1 in self.terms:
            for k2, v2 in other.terms:
                d[k1 + k2] = d.get(k1 + k2, 0) + v1 * v2
        return LaurentPoly(d)

    __rmul__ = __mul__

    def bar(self) -> "LaurentPoly":
        return LaurentPoly({-k: v for k, v in self.terms})

    def is_bar_symmetric(self) -> bool:
        return self == self.bar()

    def to_scalar(self) -> ScalarQ:
        if not self.terms:
            return ZERO
        lo = self.terms[0][0]
        hi = self.terms[-1][0]
        den = 1
        for _, v in self.terms:
            den = den * v.denominator // math.gcd(den, v.denominator)
        num = [0] * (hi - lo + 1)
        for k, v in self.terms:
            num[k - lo] = int(v * den)
        return ScalarQ._build(Fraction(1, den), lo, num, (1,), reduce=False)

    def evaluate(self, x: Number) -> Fraction:
        x = Fraction(x)
        return sum((v * x ** k for k, v in self.terms), Fraction(0))

    def __eq__(self, other) -> bool:
        if isinstance(other, LaurentPoly):
            return self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self.terms == LaurentPoly({0: other}).terms
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.terms)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for k, v in self.terms:
            mag = abs(v)
            if k == 0:
                body = str(mag)
            else:
                qpart = "q" if k == 1 else f"q^{k}"
                body = qpart if mag == 1 else f"{mag}*{qpart}"
            if not parts:
                parts.append(("-" if v < 0 else "") + body)
            else:
                parts.append((" - " if v < 0 else " + ") + body)
        return "".join(parts)

    def __repr__(self) -> str:
        return f"LaurentPoly({self})"


def _as_laurent(x) -> LaurentPoly:
    if isinstance(x, LaurentPoly):
        return x
    if isinstance(x, (int, Fraction)):
        return LaurentPoly({0: x})
    if isinstance(x, ScalarQ):
        return x.to_laurent()
    raise TypeError(f"cannot coerce {type(x).__name__} to LaurentPoly")


# ---------------------------------------------------------------------------
# text parsing (inverse of str())
# ---------------------------------------------------------------------------

_TERM = re.compile(r"\s*([+-])?\s*(?:(\d+(?:/\d+)?)\s*\*?\s*)?(q(?:\^(-?\d+))?)?\s*")


def _parse_laurent(text: str) -> LaurentPoly:
    text = text.strip()
    if text == "0":
        return LaurentPoly({})
    d: dict = {}
    pos = 0
    while pos < len(text):
        m = _TERM.match(text, pos)
        if not m or m.end() == pos or (m.group(2) is None and m.group(3) is None):
            raise ValueError(f"cannot parse Laurent polynomial {text!r} at {pos}")
        sign = -1 if m.group(1) == "-" else 1
        coef = Fraction(m.group(2)) if m.group(2) else Fraction(1)
        if m.group(3):
            k = int(m.group(4)) if m.group(4) is not None else 1
        else:
            k = 0
        d[k] = d.get(k, 0) + sign * coef
        pos = m.end()
    return LaurentPoly(d)


def parse_scalar(text: str) -> ScalarQ:
    """Parse ``num``, ``num/den`` or ``(num)/(den)`` with Laurent-polynomial parts.

    This accepts the rendering produced by ``str(ScalarQ)``.
    """
    text = text.strip()
    m = re.fullmatch(r"\((.*)\)\s*/\s*\((.*)\)", text) or re.fullmatch(r"([^()/]*?)\s*/\s*\((.*)\)", text)
    if m:
        return _parse_laurent(m.group(1)).to_scalar() / _parse_laurent(m.group(2)).to_scalar()
    return _parse_laurent(text).to_scalar()


# ---------------------------------------------------------------------------
# quantum integers
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def qint_s(n: int, s: int) -> ScalarQ:
    """(q^{sn} - q^{-sn}) / (q^s - q^{-s}) as a Laurent polynomial."""
    if n == 0:
        return ZERO
    if n < 0:
        return -qint_s(-n, s)
    return LaurentPoly({s * (n - 1 - 2 * k): 1 for k in range(n)}).to_scalar()


def _is_real(i: int, datum) -> bool:
    return datum.A[i][i] == 2


def qint(n: int, i: int, datum) -> ScalarQ:
    """[n]_i with q_i = q^{s_i}."""
    return qint_s(n, datum.s[i])


def qint_factorial(n: int, i: int, datum) -> ScalarQ:
    out = ONE
    for k in range(1, n + 1):
        out = out * qint(k, i, datum)
    return out


def qbinom(m: int, n: int, i: int, datum) -> ScalarQ:
    if n < 0 or n > m:
        return ZERO
    return qint_factorial(m, i, datum) / (qint_factorial(m - n, i, datum) * qint_factorial(n, i, datum))


def _brace_c(i: int, datum) -> int:
    a = datum.A[i][i]
    if a > 0:
        raise ValueError(f"index {i} is real; {{n}}_i is only defined for imaginary indices")
    return -a // 2


def qbrace(n: int, i: int, datum) -> ScalarQ:
    """{n}_i: [n] in q_i^{c_i}; equals n when a_ii = 0."""
    c = _brace_c(i, datum)
    if c == 0:
        return as_scalar(n)
    return qint_s(n, datum.s[i] * c)


def qbrace_factorial(n: int, i: int, datum) -> ScalarQ:
    out = ONE
    for k in range(1, n + 1):
        out = out * qbrace(k, i, datum)
    return out


def qbrace_binom(m: int, n: int, i: int, datum) -> ScalarQ:
    if n < 0 or n > m:
        return ZERO
    return qbrace_factorial(m, i, datum) / (qbrace_factorial(m - n, i, datum) * qbrace_factorial(n, i, datum))
