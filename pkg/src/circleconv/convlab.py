"""Conditional-information functionals on grid measures.

A grid measure is a law on Z/p^KZ read as K base-p digits (cell m sits at
the point m/p^K, so grid convolution is cyclic convolution). The module
computes the expected conditional information of the top k digits given
the remaining digits, optionally also given the coset of the top block
modulo a subgroup, runs the associated monotonicity checks, detects
near-invariant subgroups, and drives the convolution entropy experiment.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import cyclic, digitmeasure
from .caps import grid_cap
from .cyclic import CyclicMeasure, SubgroupHandle
from .digitmeasure import DigitMeasure
from .errors import CapExceededError
from .intmath import smallest_prime_factor

SLACK = 1e-10


@dataclass(frozen=True)
class GridMeasure:
    """A probability law on the p^-K grid of the torus."""

    base: int
    depth: int
    law: CyclicMeasure

    def __post_init__(self):
        if self.base < 2:
            raise ValueError("base must be >= 2")
        if self.depth < 1:
            raise ValueError("depth must be >= 1")
        if self.law.modulus != self.base ** self.depth:
            raise ValueError(
                f"law has modulus {self.law.modulus}, expected {self.base ** self.depth}")


def uniform_grid(base: int, depth: int) -> GridMeasure:
    return GridMeasure(base, depth, cyclic.uniform(base ** depth))


def point_grid(base: int, depth: int, at: int = 0) -> GridMeasure:
    return GridMeasure(base, depth, cyclic.point_mass(base ** depth, at))


def grid_from_digit_measure(m: DigitMeasure, depth: int) -> GridMeasure:
    return GridMeasure(m.base, depth, digitmeasure.block_distribution(m, depth))


def convolve_grids(a: GridMeasure, b: GridMeasure) -> GridMeasure:
    if (a.base, a.depth) != (b.base, b.depth):
        raise ValueError("grid base/depth mismatch")
    return GridMeasure(a.base, a.depth, cyclic.convolve(a.law, b.law))


def _entropy_of(w: np.ndarray) -> float:
    w = w[w > 0.0]
    return float(-(w * np.log(w)).sum())


def _split(mu: GridMeasure, k: int) -> np.ndarray:
    """Weights reshaped to [top block value, low digits value]."""
    p, K = mu.base, mu.depth
    if not 1 <= k <= K:
        raise ValueError(f"top digit count {k} outside 1..{K}")
    return mu.law.weights.reshape(p ** k, p ** (K - k))


def conditional_top_entropy(mu: GridMeasure, k: int) -> float:
    """Expected entropy of the top k digits given the remaining digits.

    Equals H(X) - H(low digits of X); the uniform grid gives k*log p.
    """
    mat = _split(mu, k)
    return _entropy_of(mu.law.weights) - _entropy_of(mat.sum(axis=0))


def conditional_top_entropy_mod(mu: GridMeasure, k: int,
                                group: SubgroupHandle) -> float:
    """Expected entropy of the top k digits given the low digits and the
    coset of the top block modulo the subgroup.

    Equals conditional_top_entropy when the subgroup is the whole of
    Z/p^kZ and 0 when it is trivial; always within [0, log order].
    """
    p = mu.base
    if group.modulus != p ** k:
        raise ValueError(
            f"subgroup modulus {group.modulus} does not match p^k = {p ** k}")
    mat = _split(mu, k)
    d = group.generator
    joint = mat.reshape(group.order, d, mat.shape[1]).sum(axis=0)
    return _entropy_of(mu.law.weights) - _entropy_of(joint.ravel())


def coset_entropy_given_low(mu: GridMeasure, k: int,
                            group: SubgroupHandle) -> float:
    """Expected entropy of (top block mod G) given the low digits."""
    return conditional_top_entropy(mu, k) - conditional_top_entropy_mod(mu, k, group)


def check_coset_entropy_monotone(mu: GridMeasure, nu: GridMeasure, k: int,
                                 group: SubgroupHandle) -> tuple[float, float, bool]:
    """Convolving cannot shrink the coset entropy given the low digits.

    Returns (lhs, rhs, holds) with lhs the functional of mu * nu and rhs
    that of mu; holds means lhs >= rhs - 1e-10.
    """
    conv = convolve_grids(mu, nu)
    lhs = coset_entropy_given_low(conv, k, group)
    rhs = coset_entropy_given_low(mu, k, group)
    return lhs, rhs, lhs >= rhs - SLACK


def check_information_gain_dominance(mu: GridMeasure, nu: GridMeasure, k: int,
                                     group: SubgroupHandle) -> tuple[float, float, bool]:
    """The convolution gain of top-given-low information dominates the
    gain of the coset-refined information.

    Returns (delta_top, delta_mod, holds) with holds meaning
    delta_top >= delta_mod - 1e-10.
    """
    conv = convolve_grids(mu, nu)
    delta_top = conditional_top_entropy(conv, k) - conditional_top_entropy(mu, k)
    delta_mod = (conditional_top_entropy_mod(conv, k, group)
                 - conditional_top_entropy_mod(mu, k, group))
    return delta_top, delta_mod, delta_top >= delta_mod - SLACK


def top_entropy_floor(mu: GridMeasure, k: int, group: SubgroupHandle,
                      ell: int) -> tuple[float, float, bool]:
    """Floor on the entropy of the top ell digits from coset information.

    Requires order(G) >= p^ell. Returns (lhs, rhs, holds) where
    lhs = H(top ell digits) and
    rhs = (ell-1) log p - log order + conditional_top_entropy_mod.
    """
    p = mu.base
    if group.order < p ** ell:
        raise ValueError(
            f"subgroup order {group.order} below p^ell = {p ** ell}")
    lhs = _entropy_of(_split(mu, ell).sum(axis=1))
    rhs = ((ell - 1) * math.log(p) - math.log(group.order)
           + conditional_top_entropy_mod(mu, k, group))
    return lhs, rhs, lhs >= rhs - SLACK


def near_invariant_subgroup(mu: GridMeasure, k: int, tol: float) -> SubgroupHandle:
    """Largest subgroup under which the conditional top-block law barely moves.

    For each subgroup of Z/p^kZ in decreasing order of size, every shift
    g in the subgroup must move the conditional law of the top block
    given the low digits by at most tol in expected total variation
    (fibers weighted by their mass). The trivial subgroup always
    qualifies and is the floor.
    """
    p = mu.base
    mat = _split(mu, k)
    for group in cyclic.all_subgroups(p ** k):
        ok = True
        for g in group.elements():
            if g == 0:
                continue
            # Fiber-mass weighting cancels: the mass-weighted sum of
            # conditional TVs is half the unnormalized L1 difference.
            expected_tv = 0.5 * float(np.abs(mat - np.roll(mat, g, axis=0)).sum())
            if expected_tv > tol:
                ok = False
                break
        if ok:
            return group
    return SubgroupHandle.trivial(p ** k)


@dataclass(frozen=True)
class ExperimentRow:
    n: int
    h_norm: float
    i_k_norm: float
    ell_k: int
    subgroup_order: int
    epsilon: float
    top_ell_entropy: float
    floor_applicable: bool
    floor_ok: bool


@dataclass(frozen=True)
class ExperimentTable:
    base: int
    depth: int
    report_k: int
    rows: tuple[ExperimentRow, ...]

    def to_csv_rows(self) -> list[list[str]]:
        header = ["n", "H_norm", "I_k_norm", "ell_k", "subgroup_order"]
        out = [header]
        for r in self.rows:
            out.append([str(r.n), f"{r.h_norm:.12g}", f"{r.i_k_norm:.12g}",
                        str(r.ell_k), str(r.subgroup_order)])
        return out


def convolution_entropy_experiment(ms: Sequence[DigitMeasure], depth: int,
                                   report_k: int,
                                   nis_tol: float = 0.05) -> ExperimentTable:
    """Fold the given measures on the grid and report entropy growth.

    Row n carries the normalized entropy of the n-fold convolution and
    the normalized conditional top-block information at report_k digits,
    together with the near-invariant subgroup found at tolerance nis_tol,
    the certified coset-information deficit epsilon, and the bookkeeping
    for the top-digit entropy floor at ell = floor(k log p_* / log p).
    """
    if not ms:
        raise ValueError("empty measure list")
    p = ms[0].base
    if any(m.base != p for m in ms):
        raise ValueError("all measures must share one base")
    if not 1 <= report_k <= depth:
        raise ValueError(f"report_k {report_k} outside 1..{depth}")
    if p ** depth > grid_cap():
        raise CapExceededError(
            f"grid needs {p ** depth} cells, grid cap is {grid_cap()}")
    log_p = math.log(p)
    p_star = smallest_prime_factor(p)
    ell = int(report_k * math.log(p_star) / log_p)
    rows = []
    grid: GridMeasure | None = None
    for n, m in enumerate(ms, start=1):
        step = grid_from_digit_measure(m, depth)
        grid = step if grid is None else convolve_grids(grid, step)
        h_norm = _entropy_of(grid.law.weights) / (depth * log_p)
        i_k = conditional_top_entropy(grid, report_k)
        group = near_invariant_subgroup(grid, report_k, nis_tol)
        eps = max(0.0, math.log(group.order)
                  - conditional_top_entropy_mod(grid, report_k, group))
        top_ell = _entropy_of(_split(grid, ell).sum(axis=1)) if ell >= 1 else 0.0
        applicable = ell >= 1 and group.order >= p ** ell
        floor_ok = (not applicable) or (
            top_ell >= (ell - 1) * log_p - (report_k + 1) * eps - 1e-9)
        rows.append(ExperimentRow(
            n=n, h_norm=h_norm, i_k_norm=i_k / (report_k * log_p),
            ell_k=ell, subgroup_order=group.order, epsilon=eps,
            top_ell_entropy=top_ell, floor_applicable=applicable,
            floor_ok=floor_ok))
    return ExperimentTable(p, depth, report_k, tuple(rows))
