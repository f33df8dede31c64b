"""Weyl-average machinery on grid measures and digit measures.

Averages of exp(2 pi i freq c_n x) over a sequence are evaluated exactly
at rational points, integrated against grid measures through their
character sums, and estimated by seeded Monte Carlo against digit
measures. Also provides measure reflection and the truncated weighted
Fourier distance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import cyclic, digitmeasure
from .caps import FOURIER_DISTANCE_KMAX, MC_GUARD_DIGITS, SAMPLE_DEPTH_CAP
from .convlab import GridMeasure
from .cyclic import dft
from .digitmeasure import DigitMeasure
from .errors import CapExceededError
from .sequences import SequenceSpec, max_bit_length, residues, residues_big

_CHUNK = 1024


@dataclass(frozen=True)
class WeylAverage:
    """The average of exp(2 pi i freq c_n x) over the first n_terms terms."""

    seq: SequenceSpec
    freq: int
    n_terms: int

    def __post_init__(self):
        if self.freq == 0:
            raise ValueError("frequency must be nonzero")
        if self.n_terms < 1:
            raise ValueError("need at least one term")


def point_from_digits(digits: str, base: int) -> Fraction:
    """The point 0.d1 d2 ... in base p as an exact rational."""
    if not digits:
        raise ValueError("empty digit string")
    value = 0
    for ch in digits:
        d = int(ch, base)
        value = value * base + d
    return Fraction(value, base ** len(digits))


def weyl_average(w: WeylAverage, x: Fraction) -> complex:
    """Evaluate the average at an exact rational point of the torus."""
    x = Fraction(x)
    den = x.denominator
    res = residues_big(w.seq, den, w.n_terms)
    num = x.numerator % den
    total = 0j
    for r in res:
        total += np.exp(2j * math.pi * ((w.freq * r * num) % den) / den)
    return total / w.n_terms


def weyl_average_integral(mu: GridMeasure, w: WeylAverage) -> complex:
    """Integral of the average against a grid measure, via its characters.

    Equals the mean of the measure's Fourier coefficients at the
    frequencies freq * c_n, all reduced exactly on the grid.
    """
    modulus = mu.law.modulus
    coeffs = dft(mu.law)
    freqs = (w.freq % modulus) * residues(w.seq, modulus, w.n_terms) % modulus
    return complex(coeffs[freqs].mean())


def weyl_average_second_moment(mu: GridMeasure, w: WeylAverage) -> float:
    """Integral of the squared modulus of the average against the measure.

    Expands into a double sum of Fourier coefficients at the pairwise
    frequency differences; real and within [0, 1] up to roundoff.
    """
    modulus = mu.law.modulus
    coeffs = dft(mu.law)
    res = residues(w.seq, modulus, w.n_terms).astype(np.int64)
    diffs = (w.freq % modulus) * ((res[None, :] - res[:, None]) % modulus) % modulus
    total = complex(coeffs[diffs].mean())
    return float(total.real)


def reflect(mu: GridMeasure) -> GridMeasure:
    """Pushforward under negation: cell m goes to -m mod p^K."""
    w = mu.law.weights
    return GridMeasure(mu.base, mu.depth,
                       cyclic.CyclicMeasure(np.roll(w[::-1], 1)))


def fourier_distance(mu: GridMeasure, nu: GridMeasure,
                     k_max: int = FOURIER_DISTANCE_KMAX) -> tuple[float, float]:
    """Truncated weighted squared Fourier deficit between two grid measures.

    Returns (sum over |k| <= k_max of 2^-|k| |mu_hat(k) - nu_hat(k)|^2,
    truncation allowance 2^(2 - k_max)). Grid measures alias frequencies
    modulo p^K, which is exact for the measures themselves.
    """
    if (mu.base, mu.depth) != (nu.base, nu.depth):
        raise ValueError("grid base/depth mismatch")
    modulus = mu.law.modulus
    a = dft(mu.law)
    b = dft(nu.law)
    total = 0.0
    for k in range(1, k_max + 1):
        for idx in (k % modulus, -k % modulus):
            total += 2.0 ** (-k) * abs(a[idx] - b[idx]) ** 2
    return total, 2.0 ** (2 - k_max)


def normality_estimate(m: DigitMeasure, seq: SequenceSpec, freq: int,
                       n_terms: int, samples: int, seed: int,
                       guard: int = MC_GUARD_DIGITS) -> tuple[float, float]:
    """Monte-Carlo mean of the squared Weyl average under a digit measure.

    Points are sampled to enough digits that every phase freq * c_n * x
    is resolved to p^-guard, so the estimator is unbiased for the grid
    truncation of the measure. Returns (mean, standard error);
    deterministic for a fixed seed via per-chunk derived seeds.
    """
    if freq == 0:
        raise ValueError("frequency must be nonzero")
    if n_terms < 1 or samples < 1:
        raise ValueError("need n_terms >= 1 and samples >= 1")
    p = m.base
    bits = max_bit_length(seq, n_terms) + abs(freq).bit_length()
    depth = math.ceil(bits * math.log(2) / math.log(p)) + guard
    if depth > SAMPLE_DEPTH_CAP:
        raise CapExceededError(
            f"resolving the phases needs {depth} digits, sampler cap is "
            f"{SAMPLE_DEPTH_CAP}")
    modulus = p ** depth
    freqs = [(freq * r) % modulus for r in residues_big(seq, modulus, n_terms)]
    values = np.empty(samples, dtype=float)
    done = 0
    chunk_index = 0
    while done < samples:
        n = min(_CHUNK, samples - done)
        rng = np.random.default_rng([seed, chunk_index])
        digits = digitmeasure.sample_digits(m, depth, n, rng)
        for i in range(n):
            x = 0
            for d in digits[i]:
                x = x * p + int(d)
            phases = np.array([(f * x) % modulus for f in freqs], dtype=float)
            g = np.exp(2j * math.pi * phases / modulus).mean()
            values[done + i] = abs(g) ** 2
        done += n
        chunk_index += 1
    mean = float(values.mean())
    if samples == 1:
        return mean, 0.0
    return mean, float(values.std(ddof=1) / math.sqrt(samples))
