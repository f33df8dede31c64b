"""Small exact integer helpers used across modules."""

from __future__ import annotations


def smallest_prime_factor(n: int) -> int:
    if n < 2:
        raise ValueError(f"need n >= 2, got {n}")
    d = 2
    while d * d <= n:
        if n % d == 0:
            return d
        d += 1
    return n


def prime_factors(n: int) -> dict[int, int]:
    """Prime factorization as {prime: exponent}."""
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def totient(n: int) -> int:
    phi = 1
    for p, e in prime_factors(n).items():
        phi *= (p - 1) * p ** (e - 1)
    return phi


def divisors(n: int) -> list[int]:
    """All positive divisors of n, ascending."""
    small, large = [], []
    d = 1
    while d * d <= n:
        if n % d == 0:
            small.append(d)
            if d != n // d:
                large.append(n // d)
        d += 1
    return small + large[::-1]


def orders_with_totient_at_most(bound: int) -> list[int]:
    """All m >= 1 with totient(m) <= bound, ascending.

    Uses totient(m) >= sqrt(m/2), so m <= 2*bound^2 is exhaustive.
    """
    if bound < 1:
        return []
    out = []
    for m in range(1, 2 * bound * bound + 2):
        if totient(m) <= bound:
            out.append(m)
    return out


def perfect_power_exponent(n: int, base: int) -> int | None:
    """The k with base**k == n, or None if n is not a power of base."""
    if base < 2 or n < 1:
        return None
    k = 0
    while n > 1:
        if n % base:
            return None
        n //= base
        k += 1
    return k
