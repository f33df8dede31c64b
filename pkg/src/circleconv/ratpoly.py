"""Exact polynomials with rational coefficients.

Carrier for minimal recursions: exact division, gcd, resultants,
cyclotomic polynomials and root-of-unity divisibility tests. All
arithmetic is over Fraction; nothing here touches floating point.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Iterable, Sequence


class RationalPolynomial:
    """A polynomial over Q, stored as ascending coefficients."""

    __slots__ = ("coefficients",)

    def __init__(self, coefficients: Iterable[Fraction | int]):
        coeffs = [Fraction(c) for c in coefficients]
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        object.__setattr__(self, "coefficients", tuple(coeffs))

    def __setattr__(self, name, value):  # pragma: no cover
        raise AttributeError("RationalPolynomial is immutable")

    @classmethod
    def from_descending(cls, coefficients: Sequence[Fraction | int]) -> "RationalPolynomial":
        return cls(list(coefficients)[::-1])

    @classmethod
    def x_minus(cls, a: Fraction | int) -> "RationalPolynomial":
        return cls([-Fraction(a), Fraction(1)])

    @property
    def degree(self) -> int:
        """Degree, with the zero polynomial at -1."""
        return len(self.coefficients) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coefficients

    @property
    def leading(self) -> Fraction:
        if self.is_zero:
            raise ValueError("zero polynomial has no leading coefficient")
        return self.coefficients[-1]

    @property
    def is_monic(self) -> bool:
        return not self.is_zero and self.leading == 1

    @property
    def is_integer(self) -> bool:
        return all(c.denominator == 1 for c in self.coefficients)

    def __eq__(self, other):
        return (isinstance(other, RationalPolynomial)
                and self.coefficients == other.coefficients)

    def __hash__(self):
        return hash(self.coefficients)

    def __bool__(self):
        return not self.is_zero

    def __add__(self, other: "RationalPolynomial") -> "RationalPolynomial":
        a, b = self.coefficients, other.coefficients
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        return RationalPolynomial(out)

    def __neg__(self) -> "RationalPolynomial":
        return RationalPolynomial([-c for c in self.coefficients])

    def __sub__(self, other: "RationalPolynomial") -> "RationalPolynomial":
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return RationalPolynomial([c * other for c in self.coefficients])
        out = [Fraction(0)] * (len(self.coefficients) + len(other.coefficients))
        for i, a in enumerate(self.coefficients):
            if not a:
                continue
            for j, b in enumerate(other.coefficients):
                out[i + j] += a * b
        return RationalPolynomial(out)

    __rmul__ = __mul__

    def __divmod__(self, other: "RationalPolynomial"):
        if other.is_zero:
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coefficients)
        div = other.coefficients
        dd = len(div) - 1
        q = [Fraction(0)] * max(0, len(rem) - dd)
        for i in range(len(rem) - 1, dd - 1, -1):
            c = rem[i] / div[-1]
            if c:
                q[i - dd] = c
                for j, b in enumerate(div):
                    rem[i - dd + j] -= c * b
            rem[i] = Fraction(0)
        return RationalPolynomial(q), RationalPolynomial(rem)

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def divides(self, other: "RationalPolynomial") -> bool:
        if self.is_zero:
            return other.is_zero
        return (other % self).is_zero

    def exact_divide(self, other: "RationalPolynomial") -> "RationalPolynomial":
        q, r = divmod(self, other)
        if not r.is_zero:
            raise ValueError(f"{other} does not divide {self}")
        return q

    def evaluate(self, x: Fraction | int) -> Fraction:
        out = Fraction(0)
        for c in reversed(self.coefficients):
            out = out * x + c
        return out

    def derivative(self) -> "RationalPolynomial":
        return RationalPolynomial(
            [i * c for i, c in enumerate(self.coefficients)][1:])

    def monic(self) -> "RationalPolynomial":
        if self.is_zero:
            raise ValueError("zero polynomial cannot be made monic")
        lead = self.leading
        return RationalPolynomial([c / lead for c in self.coefficients])

    def integer_content(self) -> int:
        """gcd of the coefficients of an integer polynomial."""
        if not self.is_integer:
            raise ValueError("integer content of a non-integer polynomial")
        out = 0
        for c in self.coefficients:
            out = gcd(out, abs(c.numerator))
        return out

    def gcd(self, other: "RationalPolynomial") -> "RationalPolynomial":
        a, b = self, other
        while not b.is_zero:
            a, b = b, a % b
        return a.monic() if not a.is_zero else a

    def is_squarefree(self) -> bool:
        if self.degree <= 1:
            return True
        return self.gcd(self.derivative()).degree == 0

    def resultant(self, other: "RationalPolynomial") -> Fraction:
        """Res(self, other) over Q, by the Euclidean recurrence."""
        f, g = self, other
        if f.is_zero or g.is_zero:
            return Fraction(0)
        sign = Fraction(1)
        acc = Fraction(1)
        while True:
            if g.degree == 0:
                return sign * acc * g.leading ** f.degree
            if f.degree < g.degree:
                if (f.degree * g.degree) % 2:
                    sign = -sign
                f, g = g, f
                continue
            r = f % g
            if r.is_zero:
                return Fraction(0)
            acc *= g.leading ** (f.degree - r.degree)
            if (f.degree * g.degree) % 2:
                sign = -sign
            f, g = g, r

    def __str__(self):
        if self.is_zero:
            return "0"
        parts = []
        for i in range(self.degree, -1, -1):
            c = self.coefficients[i]
            if not c:
                continue
            mag = abs(c)
            if i == 0:
                body = str(mag)
            elif i == 1:
                body = "x" if mag == 1 else f"{mag}x"
            else:
                body = f"x^{i}" if mag == 1 else f"{mag}x^{i}"
            if not parts:
                parts.append(body if c > 0 else f"-{body}")
            else:
                parts.append(f"+ {body}" if c > 0 else f"- {body}")
        return " ".join(parts)

    def __repr__(self):
        return f"RationalPolynomial({self})"


def lagrange_interpolate(points: Sequence[tuple[Fraction, Fraction]]) -> RationalPolynomial:
    """The unique polynomial of degree < len(points) through the points."""
    out = RationalPolynomial([])
    for i, (xi, yi) in enumerate(points):
        if yi == 0:
            continue
        term = RationalPolynomial([yi])
        for j, (xj, _) in enumerate(points):
            if i == j:
                continue
            term = term * RationalPolynomial([-xj, 1]) * Fraction(1, xi - xj)
        out = out + term
    return out


@lru_cache(maxsize=None)
def cyclotomic(m: int) -> RationalPolynomial:
    """The m-th cyclotomic polynomial, by exact division of x^m - 1."""
    if m < 1:
        raise ValueError("need m >= 1")
    num = RationalPolynomial([-1] + [0] * (m - 1) + [1])
    for d in range(1, m):
        if m % d == 0:
            num = num.exact_divide(cyclotomic(d))
    return num


def root_ratio_resultant(f: RationalPolynomial) -> RationalPolynomial:
    """R(x) with R vanishing exactly at the ratios of roots of f.

    R(x) = Res_y(f(y), f(x*y)) up to a constant, computed by evaluating at
    degree^2 + 1 rational points and interpolating exactly.
    """
    n = f.degree
    if n < 1:
        raise ValueError("need a nonconstant polynomial")
    points = []
    for t in range(1, n * n + 2):
        ft = RationalPolynomial(
            [c * Fraction(t) ** i for i, c in enumerate(f.coefficients)])
        points.append((Fraction(t), f.resultant(ft)))
    return lagrange_interpolate(points)
