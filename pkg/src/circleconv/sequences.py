"""Declarative integer sequences and their exact residue streams.

Every sequence kind can produce its residues modulo M directly, without
ever materializing full-precision terms, so counting 10^7 residues of a
doubly exponential sequence stays cheap. Exact terms are available where
they are representable; the double-exponential kind refuses term
generation past a bit-size cap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import CapExceededError, SpecParseError
from .ratpoly import RationalPolynomial

_INT64_MODULUS_MAX = 1 << 31   # keeps int64 products exact
_TERM_BIT_CAP = 2_000_000      # refuse exact terms beyond this many bits
_BLOCK = 1 << 14


@dataclass(frozen=True)
class PowerSequence:
    """c_k = ratio**k."""

    ratio: int

    def __post_init__(self):
        if self.ratio < 1:
            raise ValueError("ratio must be >= 1")


@dataclass(frozen=True)
class DoubleExponentialSequence:
    """c_k = base**(2**k)."""

    base: int

    def __post_init__(self):
        if self.base < 2:
            raise ValueError("base must be >= 2")


@dataclass(frozen=True)
class PolynomialSequence:
    """c_k = k**degree."""

    degree: int

    def __post_init__(self):
        if self.degree < 1:
            raise ValueError("degree must be >= 1")


@dataclass(frozen=True)
class AffineExponentialSequence:
    """c_k = scale * ratio**k + shift."""

    scale: int
    shift: int
    ratio: int

    def __post_init__(self):
        if self.scale == 0:
            raise ValueError("scale must be nonzero")
        if self.ratio < 1:
            raise ValueError("ratio must be >= 1")


@dataclass(frozen=True)
class RecurrenceSequence:
    """Integer linear recursion with a monic integer polynomial.

    With polynomial x^n + a_{n-1} x^{n-1} + ... + a_0, terms satisfy
    c_k = -(a_{n-1} c_{k-1} + ... + a_0 c_{k-n}) for k >= n.
    """

    polynomial: RationalPolynomial
    initial: tuple[int, ...]

    def __post_init__(self):
        f = self.polynomial
        if f.is_zero or not f.is_monic or not f.is_integer:
            raise ValueError("recursion polynomial must be monic with integer coefficients")
        if len(self.initial) < f.degree:
            raise ValueError(
                f"need at least {f.degree} initial terms, got {len(self.initial)}")
        object.__setattr__(self, "initial", tuple(int(v) for v in self.initial))


@dataclass(frozen=True)
class TableSequence:
    """Explicitly tabulated integers."""

    values: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(int(v) for v in self.values))


@dataclass(frozen=True)
class IntertwinedSequence:
    """Interleaving: c_{d*k + r} = parts[r][k] for r = 0..d-1."""

    parts: tuple["SequenceSpec", ...]

    def __post_init__(self):
        if not self.parts:
            raise ValueError("need at least one part")


SequenceSpec = Union[PowerSequence, DoubleExponentialSequence,
                     PolynomialSequence, AffineExponentialSequence,
                     RecurrenceSequence, TableSequence, IntertwinedSequence]


def _pow_table_residues(start: int, ratio: int, shift: int, modulus: int,
                        count: int) -> np.ndarray:
    """Residues of start * ratio**k + shift, blockwise int64."""
    out = np.empty(count, dtype=np.int64)
    block = min(_BLOCK, max(count, 1))
    powers = np.empty(block, dtype=np.int64)
    acc = 1 % modulus
    for j in range(block):
        powers[j] = acc
        acc = (acc * ratio) % modulus
    step = acc if block == _BLOCK else None  # ratio**block mod modulus
    lead = start % modulus
    done = 0
    while done < count:
        n = min(block, count - done)
        out[done:done + n] = (lead * powers[:n] + shift) % modulus
        done += n
        if done < count:
            lead = (lead * step) % modulus
    return out


def residues(seq: SequenceSpec, modulus: int, count: int) -> np.ndarray:
    """c_k mod modulus for k < count, as an int64 array.

    Requires modulus < 2**31 so that intermediate products stay exact in
    int64 arithmetic; use residues_big for larger moduli.
    """
    if modulus < 1:
        raise ValueError("modulus must be >= 1")
    if modulus >= _INT64_MODULUS_MAX:
        return np.array(residues_big(seq, modulus, count), dtype=object)
    if count < 0:
        raise ValueError("count must be >= 0")
    if isinstance(seq, PowerSequence):
        return _pow_table_residues(1, seq.ratio, 0, modulus, count)
    if isinstance(seq, AffineExponentialSequence):
        return _pow_table_residues(seq.scale, seq.ratio, seq.shift, modulus, count)
    if isinstance(seq, DoubleExponentialSequence):
        out = np.empty(count, dtype=np.int64)
        x = seq.base % modulus
        for k in range(count):
            out[k] = x
            x = (x * x) % modulus
        return out
    if isinstance(seq, PolynomialSequence):
        base = np.arange(count, dtype=np.int64) % modulus
        out = np.ones(count, dtype=np.int64)
        e = seq.degree
        sq = base
        while e:
            if e & 1:
                out = (out * sq) % modulus
            e >>= 1
            if e:
                sq = (sq * sq) % modulus
        return out
    if isinstance(seq, RecurrenceSequence):
        f = seq.polynomial
        deg = f.degree
        coeffs = [int(c) % modulus for c in f.coefficients[:deg]]
        vals = [v % modulus for v in seq.initial[:count]]
        while len(vals) < count:
            nxt = -sum(a * vals[len(vals) - deg + i] for i, a in enumerate(coeffs))
            vals.append(nxt % modulus)
        return np.fromiter(vals, dtype=np.int64, count=count)
    if isinstance(seq, TableSequence):
        if count > len(seq.values):
            raise ValueError(
                f"table holds {len(seq.values)} terms, {count} requested")
        return np.fromiter((v % modulus for v in seq.values[:count]),
                           dtype=np.int64, count=count)
    if isinstance(seq, IntertwinedSequence):
        d = len(seq.parts)
        out = np.empty(count, dtype=np.int64)
        for r, part in enumerate(seq.parts):
            n_r = (count - r + d - 1) // d
            if n_r > 0:
                out[r::d] = residues(part, modulus, n_r)
        return out
    raise TypeError(f"unknown sequence kind {type(seq).__name__}")


def residues_big(seq: SequenceSpec, modulus: int, count: int) -> list[int]:
    """c_k mod modulus for k < count, exact Python integers."""
    if modulus < 1:
        raise ValueError("modulus must be >= 1")
    if isinstance(seq, PowerSequence):
        out, x = [], 1 % modulus
        for _ in range(count):
            out.append(x)
            x = (x * seq.ratio) % modulus
        return out
    if isinstance(seq, AffineExponentialSequence):
        out, x = [], 1 % modulus
        for _ in range(count):
            out.append((seq.scale * x + seq.shift) % modulus)
            x = (x * seq.ratio) % modulus
        return out
    if isinstance(seq, DoubleExponentialSequence):
        out, x = [], seq.base % modulus
        for _ in range(count):
            out.append(x)
            x = (x * x) % modulus
        return out
    if isinstance(seq, PolynomialSequence):
        return [pow(k, seq.degree, modulus) for k in range(count)]
    if isinstance(seq, RecurrenceSequence):
        f = seq.polynomial
        deg = f.degree
        coeffs = [int(c) for c in f.coefficients[:deg]]
        out = [v % modulus for v in seq.initial[:count]]
        while len(out) < count:
            nxt = -sum(a * out[len(out) - deg + i] for i, a in enumerate(coeffs))
            out.append(nxt % modulus)
        return out
    if isinstance(seq, TableSequence):
        if count > len(seq.values):
            raise ValueError(
                f"table holds {len(seq.values)} terms, {count} requested")
        return [v % modulus for v in seq.values[:count]]
    if isinstance(seq, IntertwinedSequence):
        d = len(seq.parts)
        out = [0] * count
        for r, part in enumerate(seq.parts):
            n_r = (count - r + d - 1) // d
            out[r::d] = residues_big(part, modulus, n_r)
        return out
    raise TypeError(f"unknown sequence kind {type(seq).__name__}")


def terms(seq: SequenceSpec, count: int) -> list[int]:
    """The first count terms as exact integers."""
    if isinstance(seq, PowerSequence):
        out, x = [], 1
        for _ in range(count):
            out.append(x)
            x *= seq.ratio
        return out
    if isinstance(seq, AffineExponentialSequence):
        out, x = [], 1
        for _ in range(count):
            out.append(seq.scale * x + seq.shift)
            x *= seq.ratio
        return out
    if isinstance(seq, DoubleExponentialSequence):
        if count > 0 and (1 << (count - 1)) * seq.base.bit_length() > _TERM_BIT_CAP:
            raise CapExceededError(
                f"term {count - 1} of the double-exponential sequence exceeds "
                f"the {_TERM_BIT_CAP}-bit term cap")
        out, x = [], seq.base
        for _ in range(count):
            out.append(x)
            x *= x
        return out
    if isinstance(seq, PolynomialSequence):
        return [k ** seq.degree for k in range(count)]
    if isinstance(seq, RecurrenceSequence):
        f = seq.polynomial
        deg = f.degree
        coeffs = [int(c) for c in f.coefficients[:deg]]
        out = list(seq.initial[:count])
        while len(out) < count:
            out.append(-sum(a * out[len(out) - deg + i]
                            for i, a in enumerate(coeffs)))
        return out
    if isinstance(seq, TableSequence):
        if count > len(seq.values):
            raise ValueError(
                f"table holds {len(seq.values)} terms, {count} requested")
        return list(seq.values[:count])
    if isinstance(seq, IntertwinedSequence):
        d = len(seq.parts)
        out = [0] * count
        for r, part in enumerate(seq.parts):
            n_r = (count - r + d - 1) // d
            out[r::d] = terms(part, n_r)
        return out
    raise TypeError(f"unknown sequence kind {type(seq).__name__}")


def max_bit_length(seq: SequenceSpec, count: int) -> int:
    """Upper bound on the bit length of |c_k| for k < count."""
    if count <= 0:
        return 1
    if isinstance(seq, PowerSequence):
        return max(1, (count - 1) * max(1, seq.ratio.bit_length()))
    if isinstance(seq, AffineExponentialSequence):
        return (abs(seq.scale).bit_length()
                + (count - 1) * max(1, seq.ratio.bit_length())
                + abs(seq.shift).bit_length() + 2)
    if isinstance(seq, DoubleExponentialSequence):
        return (1 << (count - 1)) * seq.base.bit_length()
    if isinstance(seq, PolynomialSequence):
        return max(1, seq.degree * count.bit_length())
    if isinstance(seq, RecurrenceSequence):
        growth = 1 + sum(abs(int(c)) for c in seq.polynomial.coefficients)
        init_bits = max((abs(v).bit_length() for v in seq.initial), default=1)
        return count * max(1, growth.bit_length()) + init_bits + 1
    if isinstance(seq, TableSequence):
        upto = seq.values[:count]
        return max((abs(v).bit_length() for v in upto), default=1)
    if isinstance(seq, IntertwinedSequence):
        d = len(seq.parts)
        return max(max_bit_length(part, (count - r + d - 1) // d)
                   for r, part in enumerate(seq.parts))
    raise TypeError(f"unknown sequence kind {type(seq).__name__}")


# --- sequence-spec mini-language ---------------------------------------------
#
#   pow:q=3 | doubexp:b=2 | poly:l=2 | affine:r=1,s=3,q=6
#   rec:poly=1,-7,6;init=4,9        (polynomial leading coefficient first)
#   table:file=PATH                 (one decimal integer per line)
#   intertwine:(SPEC)|(SPEC)|...


def _int_field(fields: dict[str, str], key: str, spec: str) -> int:
    if key not in fields:
        raise SpecParseError(f"sequence spec {spec!r} lacks {key}=")
    try:
        return int(fields.pop(key))
    except ValueError:
        raise SpecParseError(f"bad integer for {key} in {spec!r}") from None


def _reject_extras(fields: dict[str, str], spec: str) -> None:
    if fields:
        key = sorted(fields)[0]
        raise SpecParseError(f"unknown field {key!r} in {spec!r}")


def _split_fields(body: str, spec: str, sep: str = ",") -> dict[str, str]:
    fields = {}
    for part in body.split(sep):
        if "=" not in part:
            raise SpecParseError(f"bad field {part!r} in {spec!r}")
        key, value = part.split("=", 1)
        fields[key.strip()] = value.strip()
    return fields


def _split_parenthesized(body: str, spec: str) -> list[str]:
    parts, depth, start = [], 0, 0
    for i, ch in enumerate(body):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                raise SpecParseError(f"unbalanced parentheses in {spec!r}")
        elif ch == "|" and depth == 0:
            parts.append(body[start:i])
            start = i + 1
    if depth:
        raise SpecParseError(f"unbalanced parentheses in {spec!r}")
    parts.append(body[start:])
    out = []
    for part in parts:
        part = part.strip()
        if not (part.startswith("(") and part.endswith(")")):
            raise SpecParseError(
                f"intertwine component {part!r} must be parenthesized")
        out.append(part[1:-1])
    return out


def parse_sequence(spec: str) -> SequenceSpec:
    """Parse a sequence-spec string; raises SpecParseError on bad input."""
    if ":" not in spec:
        raise SpecParseError(f"sequence spec {spec!r} lacks a kind prefix")
    kind, body = spec.split(":", 1)
    if kind == "pow":
        fields = _split_fields(body, spec)
        q = _int_field(fields, "q", spec)
        _reject_extras(fields, spec)
        return PowerSequence(q)
    if kind == "doubexp":
        fields = _split_fields(body, spec)
        b = _int_field(fields, "b", spec)
        _reject_extras(fields, spec)
        return DoubleExponentialSequence(b)
    if kind == "poly":
        fields = _split_fields(body, spec)
        degree = _int_field(fields, "l", spec)
        _reject_extras(fields, spec)
        return PolynomialSequence(degree)
    if kind == "affine":
        fields = _split_fields(body, spec)
        r = _int_field(fields, "r", spec)
        s = _int_field(fields, "s", spec)
        q = _int_field(fields, "q", spec)
        _reject_extras(fields, spec)
        return AffineExponentialSequence(r, s, q)
    if kind == "rec":
        fields = _split_fields(body, spec, sep=";")
        if "poly" not in fields or "init" not in fields:
            raise SpecParseError(f"rec spec {spec!r} needs poly= and init=")
        try:
            desc = [int(x) for x in fields.pop("poly").split(",")]
            init = [int(x) for x in fields.pop("init").split(",")]
        except ValueError:
            raise SpecParseError(f"bad integer list in {spec!r}") from None
        _reject_extras(fields, spec)
        poly = RationalPolynomial.from_descending(desc)
        if poly.is_zero or not poly.is_monic:
            raise SpecParseError(
                f"recursion polynomial in {spec!r} must be monic")
        return RecurrenceSequence(poly, tuple(init))
    if kind == "table":
        fields = _split_fields(body, spec)
        if "file" not in fields:
            raise SpecParseError(f"table spec {spec!r} needs file=")
        path = fields.pop("file")
        _reject_extras(fields, spec)
        try:
            with open(path, "r", encoding="ascii") as fh:
                values = [int(line) for line in fh if line.strip()]
        except OSError as exc:
            raise SpecParseError(f"cannot read table file {path!r}: {exc}") from None
        except ValueError:
            raise SpecParseError(f"non-integer line in table file {path!r}") from None
        return TableSequence(tuple(values))
    if kind == "intertwine":
        parts = [parse_sequence(sub) for sub in _split_parenthesized(body, spec)]
        return IntertwinedSequence(tuple(parts))
    raise SpecParseError(f"unknown sequence kind {kind!r}")


def describe(seq: SequenceSpec) -> str:
    """Canonical one-line description for traces and reports."""
    if isinstance(seq, PowerSequence):
        return f"pow:q={seq.ratio}"
    if isinstance(seq, DoubleExponentialSequence):
        return f"doubexp:b={seq.base}"
    if isinstance(seq, PolynomialSequence):
        return f"poly:l={seq.degree}"
    if isinstance(seq, AffineExponentialSequence):
        return f"affine:r={seq.scale},s={seq.shift},q={seq.ratio}"
    if isinstance(seq, RecurrenceSequence):
        desc = ",".join(str(int(c)) for c in reversed(seq.polynomial.coefficients))
        init = ",".join(str(v) for v in seq.initial)
        return f"rec:poly={desc};init={init}"
    if isinstance(seq, TableSequence):
        return f"table:<{len(seq.values)} values>"
    if isinstance(seq, IntertwinedSequence):
        return "intertwine:" + "|".join(f"({describe(p)})" for p in seq.parts)
    raise TypeError(f"unknown sequence kind {type(seq).__name__}")
