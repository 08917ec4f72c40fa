"""Exact univariate polynomials and rational functions in the sparsity p0.

Coefficients are :class:`fractions.Fraction`; floats never enter a
formula. A :class:`RationalFn` is always stored reduced (constant gcd) with a
monic denominator, so two equal functions have identical coefficient lists.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Sequence

from .errors import PoleError

VAR = "p0"


def _strip(coeffs: Iterable) -> tuple[Fraction, ...]:
    c = [Fraction(x) for x in coeffs]
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


@dataclass(frozen=True)
class RationalPoly:
    """Dense polynomial, coefficients in ascending degree.

    The zero polynomial has no coefficients.
    """

    coeffs: tuple[Fraction, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _strip(self.coeffs))

    @classmethod
    def const(cls, c) -> "RationalPoly":
        return cls((c,))

    @classmethod
    def monomial(cls, degree: int, c=1) -> "RationalPoly":
        return cls((0,) * degree + (c,))

    @classmethod
    def lift(cls, x) -> "RationalPoly":
        if isinstance(x, RationalPoly):
            return x
        if isinstance(x, (int, Rational)):
            return cls.const(x)
        raise TypeError(f"cannot treat {type(x).__name__} as a polynomial")

    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    @property
    def lc(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_const(self) -> bool:
        return len(self.coeffs) <= 1

    def __bool__(self):
        return bool(self.coeffs)

    def __add__(self, other):
        try:
            other = RationalPoly.lift(other)
        except TypeError:
            return NotImplemented
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for k, v in enumerate(b):
            out[k] += v
        return RationalPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return RationalPoly(-c for c in self.coeffs)

    def __sub__(self, other):
        try:
            other = RationalPoly.lift(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return RationalPoly.lift(other) - self

    def __mul__(self, other):
        try:
            other = RationalPoly.lift(other)
        except TypeError:
            return NotImplemented
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return RationalPoly()
        out = [Fraction(0)] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    out[i + j] += x * y
        return RationalPoly(out)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative powers need RationalFn")
        result, base = RationalPoly.const(1), self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def divmod(self, other: "RationalPoly") -> tuple["RationalPoly", "RationalPoly"]:
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dd = other.degree
        lc = other.lc
        quo = [Fraction(0)] * max(0, len(rem) - dd)
        for k in range(len(rem) - dd - 1, -1, -1):
            c = rem[k + dd] / lc
            quo[k] = c
            if c:
                for j, y in enumerate(other.coeffs):
                    rem[k + j] -= c * y
        return RationalPoly(quo), RationalPoly(rem[:dd] if dd > 0 else [])

    def __floordiv__(self, other):
        return self.divmod(RationalPoly.lift(other))[0]

    def __mod__(self, other):
        return self.divmod(RationalPoly.lift(other))[1]

    def monic(self) -> "RationalPoly":
        if self.is_zero():
            return self
        lc = self.lc
        return RationalPoly(c / lc for c in self.coeffs)

    def evaluate(self, x):
        """Horner evaluation; exact for rational ``x``, float for float ``x``."""
        if isinstance(x, float):
            return float(self.evaluate(Fraction(x)))
        x = Fraction(x)
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    __call__ = evaluate

    def __str__(self):
        return render_poly(self)

    def to_json(self) -> list[list[str]]:
        return [[str(c.numerator), str(c.denominator)] for c in self.coeffs]

    @classmethod
    def from_json(cls, data: Sequence[Sequence[str]]) -> "RationalPoly":
        return cls(Fraction(int(n), int(d)) for n, d in data)


P0 = RationalPoly.monomial(1)
ONE = RationalPoly.const(1)


def poly_gcd(a: RationalPoly, b: RationalPoly) -> RationalPoly:
    """Monic gcd by the Euclidean algorithm over Q."""
    if a.is_zero() and b.is_zero():
        raise ValueError("gcd(0, 0) is undefined")
    a, b = a.monic(), b.monic()
    while not b.is_zero():
        a, b = b, (a % b).monic()
    return a


def _fmt_coeff(c: Fraction) -> str:
    return str(c) if c.denominator == 1 else f"({c})"


def render_poly(p: RationalPoly, var: str = VAR) -> str:
    """Descending-degree text, e.g. ``-24p0^9 + 144p0^8 - ... + 18p0^2``."""
    if p.is_zero():
        return "0"
    parts = []
    for k in range(p.degree, -1, -1):
        c = p.coeffs[k]
        if not c:
            continue
        sign = "-" if c < 0 else "+"
        a = abs(c)
        if k == 0:
            body = _fmt_coeff(a)
        else:
            mono = var if k == 1 else f"{var}^{k}"
            body = mono if a == 1 else f"{_fmt_coeff(a)}{mono}"
        parts.append((sign, body))
    first_sign, first = parts[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


@dataclass(frozen=True)
class RationalFn:
    """Quotient ``num / den`` in lowest terms with monic ``den``."""

    num: RationalPoly
    den: RationalPoly = ONE

    def __post_init__(self):
        num, den = RationalPoly.lift(self.num), RationalPoly.lift(self.den)
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        if num.is_zero():
            num, den = RationalPoly(), ONE
        else:
            g = poly_gcd(num, den)
            if not g.is_const():
                num, den = num // g, den // g
            lc = den.lc
            if lc != 1:
                num = RationalPoly(c / lc for c in num.coeffs)
                den = RationalPoly(c / lc for c in den.coeffs)
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    @classmethod
    def lift(cls, x) -> "RationalFn":
        if isinstance(x, RationalFn):
            return x
        return cls(RationalPoly.lift(x))

    def is_polynomial(self) -> bool:
        return self.den == ONE

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __add__(self, other):
        try:
            o = RationalFn.lift(other)
        except TypeError:
            return NotImplemented
        if self.den == o.den:
            return RationalFn(self.num + o.num, self.den)
        return RationalFn(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalFn(-self.num, self.den)

    def __sub__(self, other):
        try:
            o = RationalFn.lift(other)
        except TypeError:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return RationalFn.lift(other) - self

    def __mul__(self, other):
        try:
            o = RationalFn.lift(other)
        except TypeError:
            return NotImplemented
        return RationalFn(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = RationalFn.lift(other)
        if o.is_zero():
            raise ZeroDivisionError("division by the zero rational function")
        return RationalFn(self.num * o.den, self.den * o.num)

    def __rtruediv__(self, other):
        return RationalFn.lift(other) / self

    def __pow__(self, e: int):
        if e < 0:
            return RationalFn(ONE) / (self ** (-e))
        return RationalFn(self.num**e, self.den**e)

    def one_minus(self) -> "RationalFn":
        return RationalFn(self.den - self.num, self.den)

    def evaluate(self, x):
        """Value at ``x``: exact for ints/Fractions, correctly rounded for floats.

        Raises :class:`PoleError` where the reduced denominator vanishes.
        """
        as_float = isinstance(x, float)
        xf = Fraction(x)
        d = self.den.evaluate(xf)
        if d == 0:
            raise PoleError(f"denominator vanishes at p0 = {xf}")
        v = self.num.evaluate(xf) / d
        return float(v) if as_float else v

    __call__ = evaluate

    def __str__(self):
        if self.is_polynomial():
            return render_poly(self.num)
        return f"({render_poly(self.num)}) / ({render_poly(self.den)})"

    def to_json(self) -> dict:
        return {"num": self.num.to_json(), "den": self.den.to_json()}

    @classmethod
    def from_json(cls, data: dict) -> "RationalFn":
        return cls(RationalPoly.from_json(data["num"]), RationalPoly.from_json(data["den"]))
