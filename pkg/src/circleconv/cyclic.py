"""Probability measures on finite cyclic groups Z/NZ.

Weight vectors indexed by residue are the substrate for everything
downstream: convolution, characters, entropy and subgroup projections.
Measures built from integers or Fractions additionally carry exact
rational weights (up to EXACT_WEIGHT_CAP), which the oracle tests use to
sidestep float drift entirely.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

import numpy as np

from .caps import DIRECT_CONV_CAP, EXACT_WEIGHT_CAP
from .errors import NumericError
from .intmath import divisors, perfect_power_exponent

WEIGHT_SUM_RENORM = 1e-12   # renormalize when the sum drifts past this
WEIGHT_SUM_REJECT = 1e-6    # refuse weights whose sum drifts past this

ExactWeights = tuple[Fraction, ...]


class CyclicMeasure:
    """A probability distribution on Z/NZ.

    weights[i] is the mass at residue i. Instances are immutable; all
    operations in this module are pure functions returning new measures.
    """

    __slots__ = ("modulus", "weights", "exact")

    def __init__(self, weights: Sequence[float] | np.ndarray,
                 exact: ExactWeights | None = None):
        if exact is None and not isinstance(weights, np.ndarray):
            seq = list(weights)
            if seq and all(isinstance(x, (int, Fraction)) for x in seq) \
                    and len(seq) <= EXACT_WEIGHT_CAP:
                exact = tuple(Fraction(x) for x in seq)
        if exact is not None:
            if sum(exact) != 1:
                raise NumericError("exact weights must sum to exactly 1")
            if any(x < 0 for x in exact):
                raise ValueError("negative weight")
            w = np.array([float(x) for x in exact], dtype=float)
        else:
            w = np.asarray(weights, dtype=float)
            if w.ndim != 1:
                raise ValueError("weights must be a 1-d sequence")
            if w.size < 1:
                raise ValueError("modulus must be >= 1")
            if float(w.min(initial=0.0)) < -1e-12:
                raise ValueError("negative weight")
            w = np.maximum(w, 0.0)
            total = float(w.sum())
            if abs(total - 1.0) > WEIGHT_SUM_REJECT:
                raise NumericError(
                    f"weight sum {total!r} drifts beyond {WEIGHT_SUM_REJECT}")
            if abs(total - 1.0) > WEIGHT_SUM_RENORM:
                w = w / total
        w.flags.writeable = False
        object.__setattr__(self, "modulus", int(w.size))
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "exact", exact)

    def __setattr__(self, name, value):  # pragma: no cover
        raise AttributeError("CyclicMeasure is immutable")

    def __repr__(self):
        return f"CyclicMeasure(modulus={self.modulus})"

    @property
    def is_exact(self) -> bool:
        return self.exact is not None

    def as_float(self) -> "CyclicMeasure":
        """The same measure with exact tracking dropped."""
        if self.exact is None:
            return self
        return CyclicMeasure(self.weights)


def point_mass(modulus: int, at: int = 0) -> CyclicMeasure:
    if modulus < 1:
        raise ValueError("modulus must be >= 1")
    w = [0] * modulus
    w[at % modulus] = 1
    return CyclicMeasure(w)


def uniform(modulus: int) -> CyclicMeasure:
    if modulus < 1:
        raise ValueError("modulus must be >= 1")
    return CyclicMeasure([Fraction(1, modulus)] * modulus)


@dataclass(frozen=True)
class SubgroupHandle:
    """The subgroup {0, d, 2d, ...} of Z/NZ, d a divisor of N.

    Cyclic groups have exactly one subgroup per divisor order, so the
    generator pins the subgroup uniquely.
    """

    modulus: int
    generator: int

    def __post_init__(self):
        if self.modulus < 1:
            raise ValueError("modulus must be >= 1")
        if not (1 <= self.generator <= self.modulus):
            raise ValueError("generator must lie in 1..modulus")
        if self.modulus % self.generator:
            raise ValueError(
                f"generator {self.generator} does not divide {self.modulus}")

    @property
    def order(self) -> int:
        return self.modulus // self.generator

    def elements(self) -> range:
        return range(0, self.modulus, self.generator)

    @classmethod
    def full(cls, modulus: int) -> "SubgroupHandle":
        return cls(modulus, 1)

    @classmethod
    def trivial(cls, modulus: int) -> "SubgroupHandle":
        return cls(modulus, modulus)

    @classmethod
    def of_order(cls, modulus: int, order: int) -> "SubgroupHandle":
        if order < 1 or modulus % order:
            raise ValueError(f"no subgroup of order {order} in Z/{modulus}Z")
        return cls(modulus, modulus // order)


def all_subgroups(modulus: int) -> list[SubgroupHandle]:
    """One handle per subgroup, sorted by decreasing order."""
    return [SubgroupHandle(modulus, d) for d in divisors(modulus)]


def _exact_convolve(a: ExactWeights, b: ExactWeights) -> ExactWeights:
    n = len(a)
    out = [Fraction(0)] * n
    for s, ws in enumerate(a):
        if not ws:
            continue
        for t, wt in enumerate(b):
            if wt:
                out[(s + t) % n] += ws * wt
    return tuple(out)


def convolve(a: CyclicMeasure, b: CyclicMeasure) -> CyclicMeasure:
    """Cyclic convolution: the law of X + Y mod N for independent X, Y.

    Direct O(N^2) arithmetic up to DIRECT_CONV_CAP, fast transform above;
    exact rational arithmetic when both operands carry exact weights.
    """
    if a.modulus != b.modulus:
        raise ValueError(
            f"modulus mismatch: {a.modulus} vs {b.modulus}")
    n = a.modulus
    if a.exact is not None and b.exact is not None:
        return CyclicMeasure(None, exact=_exact_convolve(a.exact, b.exact))
    if n <= DIRECT_CONV_CAP:
        full = np.convolve(a.weights, b.weights)
        out = full[:n].copy()
        out[:n - 1] += full[n:]
    else:
        out = np.fft.irfft(np.fft.rfft(a.weights) * np.fft.rfft(b.weights), n)
    return CyclicMeasure(out)


def dft(a: CyclicMeasure) -> np.ndarray:
    """Character sums: coefficient l is sum_t a[t] * exp(2*pi*i*l*t/N).

    Note the positive sign in the exponent, matching the Fourier
    coefficients of a measure rather than the engineering DFT.
    """
    return np.fft.ifft(a.weights) * a.modulus


def entropy(a: CyclicMeasure) -> float:
    """Shannon entropy in nats, with 0*log(0) = 0."""
    w = a.weights[a.weights > 0.0]
    return float(-(w * np.log(w)).sum())


def _entropy_of(w: np.ndarray) -> float:
    w = w[w > 0.0]
    return float(-(w * np.log(w)).sum())


def coset_pushforward(a: CyclicMeasure, group: SubgroupHandle) -> CyclicMeasure:
    """The law of X mod G on Z_N/G, identified with Z/dZ via x mod d."""
    if group.modulus != a.modulus:
        raise ValueError(
            f"modulus mismatch: measure on {a.modulus}, subgroup of {group.modulus}")
    d = group.generator
    w = a.weights.reshape(group.order, d).sum(axis=0)
    if a.exact is not None:
        ex = [Fraction(0)] * d
        for i, x in enumerate(a.exact):
            ex[i % d] += x
        return CyclicMeasure(None, exact=tuple(ex))
    return CyclicMeasure(w)


def conditional_entropy_mod(a: CyclicMeasure, group: SubgroupHandle) -> float:
    """H(X | X mod G) = H(X) - H(X mod G), in nats.

    Lies in [0, log(order of G)]; equals entropy(a) when G is the whole
    group and 0 when G is trivial.
    """
    if group.modulus != a.modulus:
        raise ValueError(
            f"modulus mismatch: measure on {a.modulus}, subgroup of {group.modulus}")
    cosets = a.weights.reshape(group.order, group.generator).sum(axis=0)
    return entropy(a) - _entropy_of(cosets)


def min_overlap(a: CyclicMeasure, g: int) -> float:
    """sum_x min(a[x], a[x+g mod N]), the shift overlap in [0, 1]."""
    if not 0 <= g < a.modulus:
        raise ValueError(f"shift {g} outside 0..{a.modulus - 1}")
    return float(np.minimum(a.weights, np.roll(a.weights, -g)).sum())


def walk_distribution(steps: Sequence[CyclicMeasure]) -> CyclicMeasure:
    """Law of the sum of independent steps: left fold of convolve."""
    if not steps:
        raise ValueError("empty step list")
    acc = steps[0]
    for s in steps[1:]:
        acc = convolve(acc, s)
    return acc


def msd_projection(a: CyclicMeasure, base: int, n: int) -> CyclicMeasure:
    """Pushforward to the n most-significant base-p digits: z -> z // p^(k-n)."""
    k = perfect_power_exponent(a.modulus, base)
    if k is None:
        raise ValueError(
            f"modulus {a.modulus} is not a perfect power of {base}")
    if not 0 <= n <= k:
        raise ValueError(f"digit count {n} outside 0..{k}")
    fiber = base ** (k - n)
    w = a.weights.reshape(base ** n, fiber).sum(axis=1)
    if a.exact is not None:
        ex = tuple(sum(a.exact[i * fiber:(i + 1) * fiber], Fraction(0))
                   for i in range(base ** n))
        return CyclicMeasure(None, exact=ex)
    return CyclicMeasure(w)


def element_order(t: int, modulus: int) -> int:
    """Additive order of t in Z/NZ: N / gcd(t, N)."""
    if modulus < 1:
        raise ValueError("modulus must be >= 1")
    return modulus // gcd(t % modulus, modulus)
