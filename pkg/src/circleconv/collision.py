"""Collision exponents of integer sequences modulo prime powers.

Two routes: brute-force residue counting for arbitrary sequences, and an
exact reduction over rational arithmetic for linear recursions, built
from minimal-polynomial recovery, degeneracy tests via cyclotomic
divisibility, intertwining decompositions, and the coprime-part formula.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Sequence

import numpy as np

from . import sequences as seqmod
from .caps import count_cap
from .errors import CapExceededError, NotLinearRecursionError, NumericError
from .intmath import orders_with_totient_at_most, prime_factors
from .ratpoly import RationalPolynomial, cyclotomic, root_ratio_resultant
from .sequences import (DoubleExponentialSequence, RecurrenceSequence,
                        SequenceSpec, TableSequence)

DEFAULT_DEGREE_CAP = 8
_ALGORITHM_TERMS = 512


def collision_pairs(seq: SequenceSpec, p: int, n: int) -> int:
    """Number of pairs k, l < p^n with c_k = c_l mod p^n.

    Counted in one pass through a residue table; at least p^n because the
    diagonal always collides.
    """
    if p < 2:
        raise ValueError("base must be >= 2")
    if n < 1:
        raise ValueError("level must be >= 1")
    modulus = p ** n
    cap = count_cap()
    if modulus > cap:
        feasible = n
        while p ** feasible > cap:
            feasible -= 1
        raise CapExceededError(
            f"level {n} needs {modulus} terms, counting cap is {cap} "
            f"(largest feasible level: {feasible})")
    res = seqmod.residues(seq, modulus, modulus)
    counts = np.bincount(res, minlength=modulus)
    return int((counts.astype(np.int64) ** 2).sum())


@dataclass(frozen=True)
class LevelEstimate:
    level: int
    pairs: int
    gamma: float


def collision_exponent_estimates(seq: SequenceSpec, p: int,
                                 n_max: int) -> list[LevelEstimate]:
    """The raw series gamma_n = log(pairs)/(n log p) for n = 1..n_max.

    The limsup of the series is the collision exponent; no extrapolation
    is applied.
    """
    out = []
    for n in range(1, n_max + 1):
        pairs = collision_pairs(seq, p, n)
        out.append(LevelEstimate(n, pairs, math.log(pairs) / (n * math.log(p))))
    return out


def minimal_recursion(terms: Sequence[int],
                      max_degree: int = DEFAULT_DEGREE_CAP) -> RationalPolynomial:
    """Monic rational polynomial of least degree annihilating the terms.

    Probes degrees up to min(max_degree, len(terms)//2) by exact rational
    elimination and re-verifies the winner against every provided term.
    The all-zero sequence yields the degree-0 polynomial 1.
    """
    terms = [int(t) for t in terms]
    if not terms:
        raise ValueError("empty term list")
    if all(t == 0 for t in terms):
        return RationalPolynomial([1])
    cap = min(max_degree, len(terms) // 2)
    for d in range(1, cap + 1):
        coeffs = _solve_recursion(terms, d)
        if coeffs is None:
            continue
        f = RationalPolynomial(coeffs + [Fraction(1)])
        if _annihilates(f, terms):
            return f
    raise NotLinearRecursionError(
        f"no linear recursion of degree <= {cap} fits the {len(terms)} terms")


def _solve_recursion(terms: list[int], d: int) -> list[Fraction] | None:
    """Solve for a_0..a_{d-1} with c_k + sum a_i c_{k-d+i} = 0, or None."""
    rows = [[Fraction(terms[k - d + i]) for i in range(d)] + [Fraction(-terms[k])]
            for k in range(d, len(terms))]
    if len(rows) < d:
        return None
    pivots: list[int] = []
    r = 0
    for col in range(d):
        pivot = next((i for i in range(r, len(rows)) if rows[i][col]), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        lead = rows[r][col]
        rows[r] = [x / lead for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][col]:
                factor = rows[i][col]
                rows[i] = [x - factor * y for x, y in zip(rows[i], rows[r])]
        pivots.append(col)
        r += 1
        if r == len(rows):
            break
    for i in range(r, len(rows)):
        if rows[i][d]:
            return None  # inconsistent: no recursion of this degree
    solution = [Fraction(0)] * d
    for row_idx, col in enumerate(pivots):
        solution[col] = rows[row_idx][d]
    return solution


def _annihilates(f: RationalPolynomial, terms: Sequence[int]) -> bool:
    d = f.degree
    coeffs = f.coefficients
    for k in range(d, len(terms)):
        if sum(coeffs[i] * terms[k - d + i] for i in range(d + 1)):
            return False
    return True


def coefficient_gcd(f: RationalPolynomial) -> int:
    """gcd of the absolute non-leading coefficients of a monic integer
    polynomial; 0 when they all vanish."""
    if f.is_zero or not f.is_monic or not f.is_integer:
        raise ValueError("need a monic polynomial with integer coefficients")
    out = 0
    for c in f.coefficients[:-1]:
        out = gcd(out, abs(c.numerator))
    return out


def is_degenerate(f: RationalPolynomial) -> tuple[bool, int | None]:
    """Whether some root of f, or some ratio of its roots, is a root of unity.

    Root test: the m-th cyclotomic divides f for some m with
    totient(m) <= deg f. Ratio test: the m-th cyclotomic (m >= 2) divides
    the root-ratio resultant with the diagonal (x-1)^deg factor removed,
    for m with totient(m) <= (deg f)^2. A ratio of exactly 1 can only
    come from a repeated root and does not count as degenerate by itself;
    non-squarefree input draws a warning.

    Returns (verdict, witness m or None).
    """
    if f.is_zero or not f.is_monic or not f.is_integer:
        raise ValueError("need a monic polynomial with integer coefficients")
    if f.degree < 1:
        return False, None
    if f.evaluate(0) == 0:
        raise ValueError("constant coefficient must be nonzero")
    if not f.is_squarefree():
        warnings.warn("polynomial has repeated roots; unit ratios between "
                      "equal roots are not counted as degenerate")
    for m in orders_with_totient_at_most(f.degree):
        if cyclotomic(m).divides(f):
            return True, m
    if f.degree >= 2:
        ratio_poly = root_ratio_resultant(f)
        diagonal = RationalPolynomial([-1, 1])
        for _ in range(f.degree):
            ratio_poly = ratio_poly.exact_divide(diagonal)
        for m in orders_with_totient_at_most(f.degree ** 2):
            if m >= 2 and cyclotomic(m).divides(ratio_poly):
                return True, m
    return False, None


def intertwine_decompose(seq: SequenceSpec, d: int,
                         terms_per_part: int = 24,
                         max_degree: int = DEFAULT_DEGREE_CAP) -> list[RecurrenceSequence]:
    """Split into d interleaved subsequences with their minimal recursions."""
    if d < 1:
        raise ValueError("need d >= 1")
    all_terms = seqmod.terms(seq, d * terms_per_part)
    out = []
    for r in range(d):
        part = all_terms[r::d]
        poly = minimal_recursion(part, max_degree)
        if poly.degree == 0:
            # All-zero subsequence: carry it as the constant recursion.
            out.append(RecurrenceSequence(RationalPolynomial([-1, 1]), (0,)))
        else:
            out.append(RecurrenceSequence(_ensure_monic_integer(poly),
                                          tuple(part[:poly.degree])))
    return out


def _ensure_monic_integer(f: RationalPolynomial) -> RationalPolynomial:
    if not f.is_integer:
        raise NumericError(
            f"minimal recursion {f} of an integer sequence is not integral")
    return f


@dataclass(frozen=True)
class ExactExponent:
    """The exact value 1 + log(factor)/log(base) of a reduced exponent."""

    base: int
    factor: int

    def __post_init__(self):
        if self.base < 2:
            raise ValueError("base must be >= 2")
        if not 1 <= self.factor <= self.base:
            raise ValueError("factor must lie in 1..base")

    @property
    def value(self) -> float:
        return 1 + math.log(self.factor) / math.log(self.base)

    @property
    def symbolic(self) -> str:
        if self.factor == 1:
            return "1"
        if self.factor == self.base:
            return "2"
        return f"1 + log({self.factor})/log({self.base})"


@dataclass
class CollisionReport:
    """Outcome of a collision-exponent computation.

    quantity says which object the numbers describe: a plain exponent
    estimated from finite levels, or the reduced exponent produced
    exactly by the recursion algorithm.
    """

    quantity: str
    base: int
    levels: list[LevelEstimate] = field(default_factory=list)
    trace: list[str] = field(default_factory=list)
    exact: ExactExponent | None = None
    lower_bound_only: bool = False
    warnings: list[str] = field(default_factory=list)

    def to_json_dict(self) -> dict:
        out: dict = {"quantity": self.quantity, "base": self.base}
        if self.exact is not None:
            out["exponent"] = {
                "symbolic": self.exact.symbolic,
                "value": float(f"{self.exact.value:.12g}"),
            }
            out["lower_bound_only"] = self.lower_bound_only
        if self.levels:
            out["levels"] = [
                {"n": le.level, "pairs": le.pairs,
                 "gamma": float(f"{le.gamma:.12g}")}
                for le in self.levels]
        if self.trace:
            out["trace"] = list(self.trace)
        if self.warnings:
            out["warnings"] = list(self.warnings)
        return out


def estimate_report(seq: SequenceSpec, p: int, n_max: int) -> CollisionReport:
    """Brute-force exponent estimates packaged as a report."""
    return CollisionReport(
        quantity="collision_exponent_estimate", base=p,
        levels=collision_exponent_estimates(seq, p, n_max))


def reduced_exponent(seq: SequenceSpec, q: int,
                     max_degree: int = DEFAULT_DEGREE_CAP) -> CollisionReport:
    """Exact reduced collision exponent of a linear recursion sequence.

    Runs the full reduction: minimal polynomial, even/odd splits at a
    root -1, affine rescaling at a simple root 1, the double-root-at-1
    shortcut, intertwining decompositions, and the coprime-part formula
    on a nondegenerate polynomial. Sequences constant on an arithmetic
    progression come out at exactly 2.
    """
    if q < 2:
        raise ValueError("base must be >= 2")
    if isinstance(seq, DoubleExponentialSequence):
        raise NotLinearRecursionError(
            "double-exponential sequences satisfy no linear recursion")
    if isinstance(seq, TableSequence):
        terms = list(seq.values[:max(_ALGORITHM_TERMS, 4 * max_degree)])
    else:
        terms = seqmod.terms(seq, _ALGORITHM_TERMS)
    report = CollisionReport(quantity="reduced_collision_exponent", base=q)
    state = _AlgorithmState(q, max_degree, report)
    report.exact = state.run(terms, depth=0, label="sequence")
    return report


class _AlgorithmState:
    def __init__(self, q: int, max_degree: int, report: CollisionReport):
        self.q = q
        self.max_degree = max_degree
        self.report = report

    def run(self, terms: list[int], depth: int, label: str) -> ExactExponent:
        if depth > 40:
            raise NumericError("recursion reduction did not terminate")
        q = self.q
        trace = self.report.trace
        if not terms:
            raise NotLinearRecursionError("ran out of terms while splitting")
        if all(t == terms[0] for t in terms):
            trace.append(f"{label}: constant ({terms[0]}), exponent 2")
            return ExactExponent(q, q)
        f = minimal_recursion(terms, self.max_degree)
        trace.append(f"{label}: minimal polynomial {f}")
        if f.coefficients[0] == 0:
            shift = next(i for i, c in enumerate(f.coefficients) if c)
            trace.append(f"{label}: zero constant coefficient, dropping "
                         f"{shift} leading terms")
            return self.run(terms[shift:], depth + 1, label)
        if f.evaluate(-1) == 0:
            trace.append(f"{label}: root at -1, splitting even/odd indices")
            even = self.run(terms[0::2], depth + 1, f"{label}/even")
            odd = self.run(terms[1::2], depth + 1, f"{label}/odd")
            return max(even, odd, key=lambda e: e.factor)
        if f.evaluate(1) == 0:
            reduced = f.exact_divide(RationalPolynomial([-1, 1]))
            if reduced.evaluate(1) == 0:
                trace.append(f"{label}: double root at 1, exponent 1")
                return ExactExponent(q, 1)
            return self._affine_shift(terms, f, reduced, depth, label)
        split = self._try_intertwine(terms, f, depth, label)
        if split is not None:
            return split
        return self._nondegenerate(f, label)

    def _affine_shift(self, terms: list[int], f: RationalPolynomial,
                      reduced: RationalPolynomial, depth: int,
                      label: str) -> ExactExponent:
        # The reduced polynomial g = f/(x-1) maps the sequence to the
        # constant rho = sum g_i c_i, so c_k - rho/g(1) satisfies g.
        rho = sum(c * terms[i] for i, c in enumerate(reduced.coefficients))
        offset = Fraction(rho) / reduced.evaluate(1)
        r, s = offset.denominator, offset.numerator
        self.report.trace.append(
            f"{label}: simple root at 1, replacing terms by {r}*c - {s}")
        if gcd(r, self.q) > 1:
            self.report.lower_bound_only = True
            self.report.warnings.append(
                f"rescaling factor {r} shares a divisor with {self.q}; "
                "the result is a lower bound only")
        new_terms = [r * t - s for t in terms]
        return self.run(new_terms, depth + 1, label)

    def _try_intertwine(self, terms: list[int], f: RationalPolynomial,
                        depth: int, label: str) -> ExactExponent | None:
        degree = f.degree
        biggest = max(orders_with_totient_at_most(degree))
        for d in range(2, biggest + 1):
            parts = [terms[r::d] for r in range(d)]
            if any(len(part) < 2 for part in parts):
                continue
            try:
                polys = [minimal_recursion(part, self.max_degree)
                         for part in parts]
            except NotLinearRecursionError:
                continue
            if all(poly.degree < degree for poly in polys):
                self.report.trace.append(
                    f"{label}: intertwining of {d} shorter recursions "
                    f"({', '.join(str(poly) for poly in polys)})")
                results = [self.run(part, depth + 1, f"{label}/part{r}")
                           for r, part in enumerate(parts)]
                return max(results, key=lambda e: e.factor)
        return None

    def _nondegenerate(self, f: RationalPolynomial, label: str) -> ExactExponent:
        f = _ensure_monic_integer(f)
        spread = coefficient_gcd(f)
        carried = 1
        for prime, exponent in prime_factors(self.q).items():
            if spread % prime == 0:
                carried *= prime ** exponent
        self.report.trace.append(
            f"{label}: nondegenerate, coefficient gcd {spread}, "
            f"carried factor {carried} of {self.q}")
        return ExactExponent(self.q, carried)


@dataclass(frozen=True)
class PowerBound:
    """What is known about the collision exponent of ratio powers q^k."""

    kind: str                 # "exact" | "upper" | "none"
    value: float | None
    prime: int | None


def power_sequence_bound(p: int, q: int) -> PowerBound:
    """Known exponent facts for the sequence q^k modulo powers of p.

    Coprime p, q give exponent exactly 1; a prime factor of p away from q
    gives the upper bound 2 - log(prime)/log(p) (the largest such prime
    gives the best bound); otherwise nothing is claimed.
    """
    if p < 2 or q < 2:
        raise ValueError("need p, q >= 2")
    if gcd(p, q) == 1:
        return PowerBound("exact", 1.0, None)
    missing = [prime for prime in prime_factors(p) if q % prime]
    if missing:
        best = max(missing)
        return PowerBound("upper", 2 - math.log(best) / math.log(p), best)
    return PowerBound("none", None, None)
