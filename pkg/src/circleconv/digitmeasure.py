"""Digit-process models of measures on the torus.

A measure is described by the joint law of its base-p digits: i.i.d.
(Bernoulli), stationary Markov, or an explicit per-position product rule.
The module exposes entropy rates, exact block laws on Z/p^kZ, certified
block convolutions, Fourier coefficients of independent-digit measures,
grid sampling, and the biased-digit entropy calculus with its inverse.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence, Union

import numpy as np

from . import cyclic
from .caps import EXACT_WEIGHT_CAP, grid_cap
from .cyclic import CyclicMeasure
from .errors import (CapExceededError, NumericError, SpecParseError,
                     UnsupportedMeasureError)

ROW_SUM_TOL = 1e-12
STATIONARY_TOL = 1e-10


def _check_row(row: Sequence[float], p: int, what: str) -> tuple[float, ...]:
    row = tuple(float(x) for x in row)
    if len(row) != p:
        raise ValueError(f"{what} must have {p} entries, got {len(row)}")
    if any(x < 0 for x in row):
        raise ValueError(f"{what} has a negative entry")
    if abs(sum(row) - 1.0) > ROW_SUM_TOL:
        raise ValueError(f"{what} sums to {sum(row)!r}, not 1")
    return row


@dataclass(frozen=True)
class Bernoulli:
    """I.i.d. digits with a fixed law; shift-invariant by construction."""

    base: int
    weights: tuple[float, ...]

    def __post_init__(self):
        if self.base < 2:
            raise ValueError("base must be >= 2")
        object.__setattr__(self, "weights",
                           _check_row(self.weights, self.base, "digit law"))

    @classmethod
    def from_bias(cls, base: int, beta: float) -> "Bernoulli":
        """The law (1-beta, beta/(p-1), ..., beta/(p-1))."""
        if not 0 <= beta <= 1 - 1 / base:
            raise ValueError(f"bias {beta} outside [0, 1 - 1/p]")
        return cls(base, (1 - beta,) + (beta / (base - 1),) * (base - 1))


def _strongly_connected(matrix: np.ndarray) -> bool:
    n = matrix.shape[0]
    support = matrix > 0
    for adj in (support, support.T):
        seen = np.zeros(n, dtype=bool)
        stack = [0]
        seen[0] = True
        while stack:
            i = stack.pop()
            for j in np.nonzero(adj[i])[0]:
                if not seen[j]:
                    seen[j] = True
                    stack.append(int(j))
        if not seen.all():
            return False
    return True


@dataclass(frozen=True, eq=False)
class Markov:
    """Stationary Markov digits; the chain must be irreducible.

    The stationary vector is computed by damped power iteration from the
    uniform start and checked against pi P = pi.
    """

    base: int
    matrix: np.ndarray
    stationary: np.ndarray = field(init=False)

    def __post_init__(self):
        if self.base < 2:
            raise ValueError("base must be >= 2")
        m = np.asarray(self.matrix, dtype=float)
        if m.shape != (self.base, self.base):
            raise ValueError(f"transition matrix must be {self.base}x{self.base}")
        for i in range(self.base):
            _check_row(m[i], self.base, f"transition row {i}")
        m = m.copy()
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)
        if not _strongly_connected(m):
            raise NumericError("reducible transition matrix: no unique stationary law")
        pi = np.full(self.base, 1.0 / self.base)
        for _ in range(200000):
            nxt = 0.5 * (pi + pi @ m)
            if np.abs(nxt - pi).sum() < 1e-16:
                pi = nxt
                break
            pi = nxt
        pi = pi / pi.sum()
        if np.abs(pi @ m - pi).sum() > STATIONARY_TOL:
            raise NumericError("stationary vector did not converge")
        pi.flags.writeable = False
        object.__setattr__(self, "stationary", pi)


@dataclass(frozen=True)
class Product:
    """Independent digits with a per-position law.

    rule(j) is the law of digit j (1-based, most significant first).
    Only constant rules are shift-invariant; constructions with pinned
    positions are flagged non-invariant.
    """

    base: int
    rule: Callable[[int], tuple[float, ...]]
    constant_rule: bool = False

    def __post_init__(self):
        if self.base < 2:
            raise ValueError("base must be >= 2")

    def row(self, position: int) -> tuple[float, ...]:
        return _check_row(self.rule(position), self.base,
                          f"digit law at position {position}")


DigitMeasure = Union[Bernoulli, Markov, Product]


def is_shift_invariant(m: DigitMeasure) -> bool:
    if isinstance(m, (Bernoulli, Markov)):
        return True
    return m.constant_rule


def _row_entropy(row: Sequence[float]) -> float:
    return -sum(x * math.log(x) for x in row if x > 0)


def entropy_rate(m: DigitMeasure) -> float:
    """Entropy per digit in nats; in [0, log p]."""
    if isinstance(m, Bernoulli):
        return _row_entropy(m.weights)
    if isinstance(m, Markov):
        return float(sum(m.stationary[i] * _row_entropy(m.matrix[i])
                         for i in range(m.base)))
    if m.constant_rule:
        return _row_entropy(m.row(1))
    raise UnsupportedMeasureError(
        "a non-constant product rule has no single entropy rate")


def bias_entropy(beta: float, p: int) -> float:
    """Entropy of (1-beta, beta/(p-1), ..., beta/(p-1)).

    Increasing and concave on [0, 1 - 1/p], with range [0, log p].
    """
    if p < 2:
        raise ValueError("base must be >= 2")
    if not 0 <= beta <= 1 - 1 / p + 1e-15:
        raise ValueError(f"bias {beta} outside [0, 1 - 1/p]")
    beta = min(beta, 1 - 1 / p)
    if beta == 0:
        return 0.0
    out = -beta * math.log(beta / (p - 1))
    if beta < 1:
        out -= (1 - beta) * math.log(1 - beta)
    return out


def bias_for_entropy(h: float, p: int) -> float:
    """The unique beta with bias_entropy(beta, p) = h, by bisection to 1e-12."""
    log_p = math.log(p)
    if not 0 <= h <= log_p + 1e-12:
        raise ValueError(f"entropy {h} outside [0, log {p}]")
    if h <= 0:
        return 0.0
    if h >= log_p:
        return 1 - 1 / p
    lo, hi = 0.0, 1 - 1 / p
    while hi - lo > 1e-12:
        mid = (lo + hi) / 2
        if bias_entropy(mid, p) < h:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


def bias_lower_bound_constants(p: int) -> tuple[float, float]:
    """Frozen constants (C, h0) for the calibrated lower bound

        bias_for_entropy(h, p) >= C * h / |log(h / log p)|   for 0 < h <= h0.

    Verified numerically by the test suite.
    """
    return 1 / (4 * math.log(p)), 0.1 * math.log(p)


def _digit_rows(m: DigitMeasure, k: int) -> list[tuple[float, ...]]:
    if isinstance(m, Bernoulli):
        return [m.weights] * k
    if isinstance(m, Product):
        return [m.row(j) for j in range(1, k + 1)]
    raise UnsupportedMeasureError("independent-digit rows undefined for Markov")


def block_distribution(m: DigitMeasure, k: int) -> CyclicMeasure:
    """Exact law of the first k digits read as an integer in Z/p^kZ.

    The index of a block x_1...x_k is sum_i x_i p^(k-i), most significant
    digit first. Independent-digit measures on small grids carry exact
    rational weights.
    """
    if k < 1:
        raise ValueError("need k >= 1")
    p = m.base
    size = p ** k
    if size > grid_cap():
        raise CapExceededError(
            f"block law needs {size} cells, grid cap is {grid_cap()}")
    if isinstance(m, Markov):
        w = m.stationary.copy()
        for _ in range(1, k):
            prev = w
            w = (prev[:, None] * m.matrix[np.arange(prev.size) % p]).ravel()
        return CyclicMeasure(w)
    rows = _digit_rows(m, k)
    if size <= EXACT_WEIGHT_CAP:
        acc = [Fraction(1)]
        for row in rows:
            frac_row = [Fraction(x) for x in row]
            acc = [a * r for a in acc for r in frac_row]
        return CyclicMeasure(None, exact=tuple(acc))
    w = np.ones(1)
    for row in rows:
        w = np.kron(w, np.asarray(row))
    return CyclicMeasure(w)


def convolution_block(ms: Sequence[DigitMeasure], k: int,
                      tol: float) -> tuple[CyclicMeasure, float]:
    """Law of the first k digits of the sum of independent draws, certified.

    Computes exact block laws to k+b digits, convolves them on Z/p^(k+b)Z
    and projects back to k digits. Truncating each summand to k+b digits
    loses less than n*p^-(k+b) of mass, so an unmodeled carry can change
    the top k digits only on cells whose low b digits lie within n of the
    carry boundary. The returned bound is the exact mass of those cells;
    b grows until the bound reaches tol.
    """
    if not ms:
        raise ValueError("empty measure list")
    if tol <= 0:
        raise ValueError("tol must be positive")
    p = ms[0].base
    if any(m.base != p for m in ms):
        raise ValueError("all measures must share one base")
    n = len(ms)
    b = 1
    while p ** b <= n:
        b += 1
    best: float | None = None
    while True:
        size = p ** (k + b)
        if size > grid_cap():
            raise CapExceededError(
                f"carry certification stuck at bound {best!r} before grid cap "
                f"{grid_cap()}; requested tol {tol}")
        law = block_distribution(ms[0], k + b).as_float()
        for m in ms[1:]:
            law = cyclic.convolve(law, block_distribution(m, k + b).as_float())
        cells = law.weights.reshape(p ** k, p ** b)
        bound = float(cells[:, p ** b - n:].sum())
        best = bound if best is None else min(best, bound)
        if bound <= tol:
            return cyclic.msd_projection(law, p, k), bound
        b += 1


def fourier_coefficient(m: DigitMeasure, freq: int, tol: float) -> complex:
    """The coefficient E exp(2*pi*i*freq*X) of an independent-digit measure.

    The infinite product over digit positions is truncated once the
    remaining factors can move the result by less than tol.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if isinstance(m, Markov):
        raise UnsupportedMeasureError(
            "Fourier coefficients of Markov digit measures are not supported")
    if freq == 0:
        return complex(1.0)
    p = m.base
    # Factor j differs from 1 by at most 2*pi*|freq|*(p-1)*p^-j; the tail
    # past J sums to 2*pi*|freq|*p^-J.
    depth = max(1, math.ceil(math.log(2 * math.pi * abs(freq) / tol, p)))
    out = complex(1.0)
    for j in range(1, depth + 1):
        row = m.weights if isinstance(m, Bernoulli) else m.row(j)
        pj = p ** j
        factor = sum(w * cmath.exp(2j * math.pi * ((freq * x) % pj) / pj)
                     for x, w in enumerate(row))
        out *= factor
        if out == 0:
            break
    return out


def sample_digits(m: DigitMeasure, digits: int, count: int,
                  rng: np.random.Generator) -> np.ndarray:
    """count x digits matrix of base-p digits drawn from the measure."""
    if digits < 1:
        raise ValueError("need digits >= 1")
    p = m.base
    if isinstance(m, Bernoulli):
        return rng.choice(p, size=(count, digits), p=np.asarray(m.weights))
    if isinstance(m, Product):
        cols = [rng.choice(p, size=count, p=np.asarray(m.row(j)))
                for j in range(1, digits + 1)]
        return np.stack(cols, axis=1)
    out = np.empty((count, digits), dtype=np.int64)
    out[:, 0] = rng.choice(p, size=count, p=m.stationary)
    u = rng.random((count, digits - 1)) if digits > 1 else None
    cum = np.cumsum(m.matrix, axis=1)
    for j in range(1, digits):
        out[:, j] = (u[:, j - 1][:, None] < cum[out[:, j - 1]]).argmax(axis=1)
    return out


def sample(m: DigitMeasure, digits: int, seed: int) -> Fraction:
    """One point of the p^-digits grid, deterministic in the seed."""
    mat = sample_digits(m, digits, 1, np.random.default_rng(seed))
    p = m.base
    value = 0
    for d in mat[0]:
        value = value * p + int(d)
    return Fraction(value, p ** digits)


def stalled_convolution_family(
        h_values: Sequence[float], p: int,
        tol: float = 1e-12) -> tuple[list[Bernoulli], float]:
    """Biased-digit measures with prescribed normalized entropies whose
    convolutions keep a first Fourier coefficient bounded away from 0.

    Measure i is Bernoulli with bias beta_i = bias_for_entropy(h_i log p).
    Each factor satisfies |E exp(2 pi i X) - 1| <= 4 pi beta_i, so when
    sum(4 pi beta_i) < 1 the product of coefficients is at least
    prod(1 - 4 pi beta_i) > 0. Otherwise the directly computed product of
    moduli is returned, with a warning if it underflows to 0.
    """
    log_p = math.log(p)
    measures = []
    betas = []
    for h in h_values:
        if not 0 < h < 1:
            raise ValueError(f"normalized entropy {h} outside (0, 1)")
        beta = bias_for_entropy(h * log_p, p)
        betas.append(beta)
        measures.append(Bernoulli.from_bias(p, beta))
    if sum(4 * math.pi * b for b in betas) < 1:
        bound = 1.0
        for b in betas:
            bound *= 1 - 4 * math.pi * b
    else:
        bound = 1.0
        for m in measures:
            bound *= abs(fourier_coefficient(m, 1, tol))
        if bound == 0.0:
            warnings.warn("coefficient product underflowed to 0; "
                          "the family gives no positive lower bound")
    return measures, bound


# --- measure-spec mini-language ---------------------------------------------
#
#   bernoulli:p=<int>,w=<r1;...;rp>
#   bernoulli:p=<int>,beta=<r>
#   markov:p=<int>,rows=<r;...|r;...|...>
#   product:p=<int>,fixed=<i1;i2;... or squares>,digit=<d>,else=bernoulli(<r1;...;rp>)


def _parse_fields(body: str, what: str) -> dict[str, str]:
    fields = {}
    for part in body.split(","):
        if "=" not in part:
            raise SpecParseError(f"bad {what} field {part!r}")
        key, value = part.split("=", 1)
        fields[key.strip()] = value.strip()
    return fields


def _parse_floats(text: str, what: str) -> list[float]:
    try:
        return [float(x) for x in text.split(";") if x != ""]
    except ValueError:
        raise SpecParseError(f"bad number in {what}: {text!r}") from None


def parse_measure(spec: str) -> DigitMeasure:
    """Parse a measure-spec string; raises SpecParseError on bad input."""
    if ":" not in spec:
        raise SpecParseError(f"measure spec {spec!r} lacks a kind prefix")
    kind, body = spec.split(":", 1)
    fields = _parse_fields(body, f"{kind} spec")
    try:
        p = int(fields.pop("p"))
    except KeyError:
        raise SpecParseError(f"measure spec {spec!r} lacks p=") from None
    except ValueError:
        raise SpecParseError(f"bad base in {spec!r}") from None
    if kind == "bernoulli":
        if "beta" in fields:
            try:
                beta = float(fields.pop("beta"))
            except ValueError:
                raise SpecParseError(f"bad beta in {spec!r}") from None
            _reject_extras(fields, spec)
            return Bernoulli.from_bias(p, beta)
        if "w" in fields:
            row = _parse_floats(fields.pop("w"), "w")
            _reject_extras(fields, spec)
            return Bernoulli(p, tuple(row))
        raise SpecParseError(f"bernoulli spec {spec!r} needs w= or beta=")
    if kind == "markov":
        if "rows" not in fields:
            raise SpecParseError(f"markov spec {spec!r} needs rows=")
        rows = [_parse_floats(r, "rows") for r in fields.pop("rows").split("|")]
        _reject_extras(fields, spec)
        return Markov(p, np.array(rows))
    if kind == "product":
        return _parse_product(p, fields, spec)
    raise SpecParseError(f"unknown measure kind {kind!r}")


def _reject_extras(fields: dict[str, str], spec: str) -> None:
    if fields:
        key = sorted(fields)[0]
        raise SpecParseError(f"unknown field {key!r} in {spec!r}")


def _parse_product(p: int, fields: dict[str, str], spec: str) -> Product:
    fixed_raw = fields.pop("fixed", "")
    digit_raw = fields.pop("digit", "0")
    else_raw = fields.pop("else", None)
    _reject_extras(fields, spec)
    try:
        digit = int(digit_raw)
    except ValueError:
        raise SpecParseError(f"bad digit in {spec!r}") from None
    if not 0 <= digit < p:
        raise SpecParseError(f"pinned digit {digit} outside 0..{p - 1}")
    if else_raw is None:
        raise SpecParseError(f"product spec {spec!r} needs else=bernoulli(...)")
    if not (else_raw.startswith("bernoulli(") and else_raw.endswith(")")):
        raise SpecParseError(f"bad else clause {else_raw!r}")
    row = tuple(_parse_floats(else_raw[len("bernoulli("):-1], "else"))
    _check_row(row, p, "else law")
    point = tuple(1.0 if i == digit else 0.0 for i in range(p))
    if fixed_raw == "squares":
        def rule(j: int, point=point, row=row) -> tuple[float, ...]:
            return point if math.isqrt(j) ** 2 == j else row
        return Product(p, rule, constant_rule=False)
    try:
        fixed = frozenset(int(x) for x in fixed_raw.split(";") if x != "")
    except ValueError:
        raise SpecParseError(f"bad fixed positions in {spec!r}") from None

    def rule(j: int, point=point, row=row, fixed=fixed) -> tuple[float, ...]:
        return point if j in fixed else row

    return Product(p, rule, constant_rule=not fixed)
