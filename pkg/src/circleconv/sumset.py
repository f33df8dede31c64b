"""Digit-constrained subshifts and sum-set dimension checks.

S(N, beta) is the set of base-p expansions in which every window of N
consecutive digits holds at most floor(beta*N) nonzero digits. The
language is a subshift of finite type; its topological entropy is the
log spectral radius of a transfer matrix over occupancy states, and the
Hausdorff dimension of the set is the entropy divided by log p.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .caps import SFT_STATE_CAP
from .errors import CapExceededError, NumericError

_POWER_ITERATIONS = 200000
_POWER_TOL = 1e-12


@dataclass(frozen=True)
class DigitSFT:
    """Sliding-window digit subshift: <= budget nonzero digits per window.

    States are occupancy words of the last window-1 positions with at
    most budget nonzero entries; a nonzero position carries digit
    multiplicity base-1.
    """

    base: int
    window: int
    budget: int

    def __post_init__(self):
        if self.base < 2:
            raise ValueError("base must be >= 2")
        if self.window < 1:
            raise ValueError("window must be >= 1")
        if self.budget < 0:
            raise ValueError("budget must be >= 0")

    @classmethod
    def from_density(cls, base: int, window: int,
                     beta: Fraction | float | str) -> "DigitSFT":
        """Budget floor(beta * window); pass a Fraction or string for an
        exact threshold."""
        frac = Fraction(beta) if not isinstance(beta, str) else Fraction(beta)
        return cls(base, window, math.floor(frac * window))


def _states(s: DigitSFT) -> list[int]:
    width = s.window - 1
    cap = min(s.budget, width)
    states = [u for u in range(1 << width) if bin(u).count("1") <= cap]
    if len(states) > SFT_STATE_CAP:
        raise CapExceededError(
            f"{len(states)} transfer states exceed the cap {SFT_STATE_CAP}")
    return states


def _transitions(s: DigitSFT) -> tuple[np.ndarray, np.ndarray]:
    """(next_zero, next_nonzero) state indices; -1 marks a forbidden step."""
    width = s.window - 1
    mask = (1 << width) - 1
    states = _states(s)
    index = {u: i for i, u in enumerate(states)}
    nxt0 = np.empty(len(states), dtype=np.int64)
    nxt1 = np.empty(len(states), dtype=np.int64)
    for i, u in enumerate(states):
        weight = bin(u).count("1")
        nxt0[i] = index[(u << 1) & mask]
        if weight + 1 <= s.budget:
            nxt1[i] = index[((u << 1) | 1) & mask]
        else:
            nxt1[i] = -1
    return nxt0, nxt1


def _matvec(v: np.ndarray, nxt0: np.ndarray, nxt1: np.ndarray,
            nonzero_weight: int) -> np.ndarray:
    out = np.zeros_like(v)
    np.add.at(out, nxt0, v)
    ok = nxt1 >= 0
    np.add.at(out, nxt1[ok], nonzero_weight * v[ok])
    return out


def perron_data(s: DigitSFT) -> tuple[float, np.ndarray]:
    """(spectral radius, Perron vector) of the weighted transfer matrix."""
    nxt0, nxt1 = _transitions(s)
    v = np.full(len(nxt0), 1.0 / len(nxt0))
    radius = 1.0
    for _ in range(_POWER_ITERATIONS):
        w = _matvec(v, nxt0, nxt1, s.base - 1)
        new_radius = float(w.sum())
        w /= new_radius
        if (abs(new_radius - radius) <= _POWER_TOL * new_radius
                and np.abs(w - v).max() <= _POWER_TOL):
            return new_radius, w
        v, radius = w, new_radius
    raise NumericError("power iteration did not converge")


def topological_entropy(s: DigitSFT) -> float:
    """log of the transfer-matrix spectral radius, in nats."""
    radius, _ = perron_data(s)
    return math.log(radius)


def hausdorff_dimension(s: DigitSFT) -> float:
    """Dimension of the constrained set: entropy over log base."""
    return topological_entropy(s) / math.log(s.base)


def _digits(value: int, base: int, length: int) -> list[int]:
    out = [0] * length
    for i in range(length - 1, -1, -1):
        value, out[i] = divmod(value, base)
    return out


def _windows_ok(digits: Sequence[int], window: int, budget: int) -> bool:
    nonzero = [1 if d else 0 for d in digits]
    current = sum(nonzero[:window])
    if current > budget:
        return False
    for i in range(window, len(nonzero)):
        current += nonzero[i] - nonzero[i - window]
        if current > budget:
            return False
    return True


def _enumerate_words(base: int, window: int, budget: int, length: int) -> list[int]:
    """All admissible words of the given length, ascending as integers."""
    out: list[int] = []

    def extend(value: int, occupancy: tuple[int, ...]):
        depth = len(occupancy)
        if depth == length:
            out.append(value)
            return
        recent = occupancy[max(0, depth - window + 1):]
        weight = sum(recent)
        extend(value * base, occupancy + (0,))
        if weight + 1 <= budget:
            for digit in range(1, base):
                extend(value * base + digit, occupancy + (1,))

    extend(0, ())
    return out


def count_words(s: DigitSFT, length: int) -> int:
    """Exact number of admissible words of the given length (integer DP)."""
    width = s.window - 1
    mask = (1 << width) - 1
    counts = {0: 1}
    for _ in range(length):
        nxt: dict[int, int] = {}
        for u, c in counts.items():
            weight = bin(u).count("1")
            u0 = (u << 1) & mask
            nxt[u0] = nxt.get(u0, 0) + c
            if weight + 1 <= s.budget:
                u1 = ((u << 1) | 1) & mask
                nxt[u1] = nxt.get(u1, 0) + c * (s.base - 1)
        counts = nxt
    return sum(counts.values())


def sumset_containment_check(window_a: int, beta_a: Fraction | float,
                             window_b: int, beta_b: Fraction | float,
                             base: int, length: int,
                             pair_cap: int = 10**7) -> bool:
    """Exhaustively verify the window-budget bound for sums of two sets.

    Every length-L sum (with carries, checking both carry-in offsets 0
    and base-1) of a word from S(window_a, beta_a) and a word from
    S(window_b, beta_b) must lie in S(window_b, beta_a+beta_b+1/window_b).
    Requires window_a | window_b and window_b | length. Enumeration is in
    ascending order, so the first counterexample found is the least.
    """
    if window_b % window_a:
        raise ValueError("the first window must divide the second")
    if length % window_b:
        raise ValueError("length must be a multiple of the second window")
    beta_a, beta_b = Fraction(beta_a), Fraction(beta_b)
    budget_a = math.floor(beta_a * window_a)
    budget_b = math.floor(beta_b * window_b)
    target = math.floor((beta_a + beta_b) * window_b + 1)
    words_a = _enumerate_words(base, window_a, budget_a, length)
    words_b = _enumerate_words(base, window_b, budget_b, length)
    if len(words_a) * len(words_b) > pair_cap:
        raise CapExceededError(
            f"{len(words_a)}*{len(words_b)} word pairs exceed the cap {pair_cap}")
    modulus = base ** length
    for x in words_a:
        for y in words_b:
            total = x + y
            for carry in (0, base - 1):
                z = (total + carry) % modulus
                if not _windows_ok(_digits(z, base, length), window_b, target):
                    return False
    return True


@dataclass(frozen=True)
class PipelineEntry:
    target_dim: float
    window: int | None
    budget: int | None
    beta: float | None
    dim: float | None
    found: bool


@dataclass
class PipelineReport:
    base: int
    eps: float
    entries: list[PipelineEntry]
    sum_beta: float
    condition_ok: bool            # sum of betas < 1 - eps
    bound_window: int | None
    bound_budget: int | None
    bound_dim: float | None
    vacuous: bool
    notes: list[str] = field(default_factory=list)

    def to_json_dict(self) -> dict:
        return {
            "base": self.base,
            "eps": float(f"{self.eps:.12g}"),
            "entries": [
                {"d": float(f"{e.target_dim:.12g}"), "N": e.window,
                 "beta": None if e.beta is None else float(f"{e.beta:.12g}"),
                 "dim": None if e.dim is None else float(f"{e.dim:.12g}"),
                 "found": e.found}
                for e in self.entries],
            "sum_beta": float(f"{self.sum_beta:.12g}"),
            "bound_dim": (None if self.bound_dim is None
                          else float(f"{self.bound_dim:.12g}")),
            "vacuous": self.vacuous,
            "notes": list(self.notes),
        }


def small_dimension_sumset_pipeline(target_dims: Sequence[float], eps: float,
                                    base: int,
                                    window_tries: int = 64) -> PipelineReport:
    """Pick digit subshifts matching prescribed dimensions and bound the
    dimension of their sum set.

    For each target d_i a pair (N_i, beta_i) is searched with N_{i-1}
    dividing N_i, N_i >= 2^i / eps, and d_i < dim S(N_i, beta_i) <
    (1+eps) d_i. When the densities satisfy sum(beta_i) < 1 - eps, the
    sum of all the sets stays inside S(N_last, eps + sum beta_i), whose
    dimension bounds the limit away from 1.
    """
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    entries: list[PipelineEntry] = []
    notes: list[str] = []
    prev_window = 1
    betas: list[Fraction] = []
    last_window: int | None = None
    for i, d in enumerate(target_dims, start=1):
        if not 0 < d < 1:
            raise ValueError(f"target dimension {d} outside (0, 1)")
        min_window = max(prev_window, math.ceil(2 ** i / eps))
        found = None
        window = ((min_window + prev_window - 1) // prev_window) * prev_window
        for _ in range(window_tries):
            for budget in range(1, window + 1):
                try:
                    s = DigitSFT(base, window, budget)
                    dim = hausdorff_dimension(s)
                except CapExceededError:
                    break
                if dim >= (1 + eps) * d:
                    break
                if dim > d:
                    found = (window, budget, dim)
                    break
            if found:
                break
            window += prev_window
        if found is None:
            notes.append(f"index {i}: no window/budget within caps "
                         f"reaches ({d}, {(1 + eps) * d})")
            entries.append(PipelineEntry(d, None, None, None, None, False))
            continue
        window, budget, dim = found
        betas.append(Fraction(budget, window))
        entries.append(PipelineEntry(d, window, budget,
                                     float(Fraction(budget, window)), dim, True))
        prev_window = window
        last_window = window
    sum_beta = sum(betas, Fraction(0))
    condition_ok = float(sum_beta) < 1 - eps
    vacuous = not condition_ok
    bound_window = bound_budget = None
    bound_dim = None
    if last_window is None:
        last_window = max(2, math.ceil(2 / eps))
        notes.append(f"no indices requested; bounding with the reference "
                     f"window {last_window}")
        sum_beta = Fraction(0)
        condition_ok = True
        vacuous = False
    if condition_ok:
        bound_window = last_window
        bound_budget = math.floor((Fraction(str(eps)) + sum_beta) * last_window)
        try:
            bound_dim = hausdorff_dimension(
                DigitSFT(base, bound_window, bound_budget))
        except CapExceededError:
            notes.append("final bound matrix exceeds the state cap")
            bound_dim = None
    else:
        notes.append("density condition failed: the bound is vacuous")
    return PipelineReport(base=base, eps=eps, entries=entries,
                          sum_beta=float(sum_beta), condition_ok=condition_ok,
                          bound_window=bound_window, bound_budget=bound_budget,
                          bound_dim=bound_dim, vacuous=vacuous, notes=notes)
