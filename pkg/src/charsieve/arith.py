"""Elementary arithmetic: sieves, factorization, multiplicative helpers, PRNG.

Conventions
-----------
* ``moebius(1) == 1``; ``moebius(n) == 0`` exactly when ``n`` has a square
  factor.  ``n >= 1`` everywhere; nonpositive arguments raise ``DomainError``.
* ``Factorization.factors`` is a tuple of ``(prime, exponent)`` pairs with
  primes strictly increasing; ``factorize(1).factors == ()``.
* The PRNG is SplitMix64.  It is the only source of randomness in the
  package; reports that consume randomness stamp the seed they used, and the
  stream for a fixed seed is part of the package's determinism contract.

References
----------
[HW79] Hardy, Wright, "An Introduction to the Theory of Numbers", 5th ed.
[Vau13] Steele, Lea, Flood, "Fast splittable pseudorandom number generators",
        OOPSLA 2014 (SplitMix64 update/output functions).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DomainError

_MASK64 = (1 << 64) - 1

# Witnesses making Miller-Rabin deterministic for n < 3.4e14; ample for the
# conductor/discriminant ranges handled here.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17)


def sieve_primes(n: int) -> list[int]:
    """Return the sorted list of primes ``p <= n`` (empty for ``n < 2``)."""
    if n < 2:
        return []
    flags = bytearray(b"\x01") * (n + 1)
    flags[0] = flags[1] = 0
    for p in range(2, math.isqrt(n) + 1):
        if flags[p]:
            flags[p * p :: p] = bytearray(len(range(p * p, n + 1, p)))
    return [i for i in range(2, n + 1) if flags[i]]


def prime_array(n: int) -> np.ndarray:
    """Primes ``<= n`` as an int64 array (vectorized counterpart of sieve_primes)."""
    if n < 2:
        return np.empty(0, dtype=np.int64)
    flags = np.ones(n + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if flags[p]:
            flags[p * p :: p] = False
    return np.flatnonzero(flags).astype(np.int64)


def moebius_sieve(n: int) -> np.ndarray:
    """Array ``mu`` of length ``n+1`` with ``mu[k] == moebius(k)`` (``mu[0] = 0``)."""
    if n < 0:
        raise DomainError(f"moebius_sieve needs n >= 0, got {n}")
    mu = np.ones(n + 1, dtype=np.int8)
    if n >= 0:
        mu[0] = 0
    for p in sieve_primes(n):
        mu[p::p] *= -1
        sq = p * p
        if sq <= n:
            mu[sq::sq] = 0
    return mu


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin; exact for all ``n < 3.4e14``."""
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_rho(n: int) -> int:
    # Brent's cycle variant; n must be odd composite.
    if n % 2 == 0:
        return 2
    for c in range(1, 64):
        x = y = 2
        d = 1
        f = lambda v: (v * v + c) % n
        while d == 1:
            x = f(x)
            y = f(f(y))
            d = math.gcd(abs(x - y), n)
        if d != n:
            return d
    raise RuntimeError(f"pollard rho exhausted increments on n={n}")


@dataclass(frozen=True)
class Factorization:
    """Prime factorization ``n = prod p**e`` with primes strictly increasing."""

    n: int
    factors: tuple[tuple[int, int], ...]

    @property
    def prime_divisors(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.factors)

    @property
    def radical(self) -> int:
        return math.prod(self.prime_divisors)

    @property
    def is_squarefree(self) -> bool:
        return all(e == 1 for _, e in self.factors)

    @property
    def omega(self) -> int:
        """Number of distinct prime divisors."""
        return len(self.factors)

    def moebius(self) -> int:
        if not self.is_squarefree:
            return 0
        return -1 if self.omega % 2 else 1

    def divisors(self) -> list[int]:
        """All positive divisors of ``n``, sorted increasingly."""
        divs = [1]
        for p, e in self.factors:
            divs = [d * p**k for d in divs for k in range(e + 1)]
        return sorted(divs)

    def squarefree_divisors(self) -> list[int]:
        """Divisors of the radical, sorted increasingly."""
        divs = [1]
        for p in self.prime_divisors:
            divs = divs + [d * p for d in divs]
        return sorted(divs)


@lru_cache(maxsize=65536)
def factorize(n: int) -> Factorization:
    """Factor ``n >= 1`` by trial division, falling back to Pollard rho."""
    if n < 1:
        raise DomainError(f"factorize needs n >= 1, got {n}")
    m = n
    out: dict[int, int] = {}
    for p in (2, 3, 5):
        while m % p == 0:
            out[p] = out.get(p, 0) + 1
            m //= p
    # 30-wheel trial division covers everything we meet in practice.
    p, wheel = 7, (4, 2, 4, 2, 4, 6, 2, 6)
    i = 0
    while p * p <= m and p < 1_000_000:
        while m % p == 0:
            out[p] = out.get(p, 0) + 1
            m //= p
        p += wheel[i]
        i = (i + 1) % 8
    stack = [m] if m > 1 else []
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if is_prime(m):
            out[m] = out.get(m, 0) + 1
            continue
        d = _pollard_rho(m)
        stack.extend((d, m // d))
    return Factorization(n, tuple(sorted(out.items())))


def moebius(n: int) -> int:
    """Möbius function of a single integer (``moebius_sieve`` for bulk use)."""
    return factorize(n).moebius()


def euler_phi(n: int) -> int:
    f = factorize(n)
    out = f.n
    for p, _ in f.factors:
        out = out // p * (p - 1)
    return out


def squarefree_part_mask(values: np.ndarray, mu: np.ndarray) -> np.ndarray:
    """Boolean mask of squarefree entries, given a Möbius table covering them."""
    return mu[values] != 0


class SplitMix64:
    """SplitMix64 PRNG [Vau13]: 64-bit state, golden-ratio increment.

    ``next_u64`` implements the reference update/output mix; ``next_float``
    maps the top 53 bits into [0, 1).  Seed 0 yields 0xE220A8397B1DCDAF first,
    which is pinned by a test as the determinism anchor.
    """

    __slots__ = ("state",)

    def __init__(self, seed: int) -> None:
        self.state = seed & _MASK64

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def next_float(self) -> float:
        return (self.next_u64() >> 11) * 2.0**-53

    def unit_vector(self, dim: int) -> np.ndarray:
        """Deterministic point on the unit sphere (Box-Muller on the stream)."""
        if dim < 1:
            raise DomainError(f"unit_vector needs dim >= 1, got {dim}")
        out = np.empty(dim)
        for i in range(0, dim, 2):
            u1 = self.next_float() or 2.0**-53
            u2 = self.next_float()
            r = math.sqrt(-2.0 * math.log(u1))
            out[i] = r * math.cos(2.0 * math.pi * u2)
            if i + 1 < dim:
                out[i + 1] = r * math.sin(2.0 * math.pi * u2)
        norm = float(np.linalg.norm(out))
        if norm == 0.0:  # pragma: no cover - measure zero
            out[0] = 1.0
            norm = 1.0
        return out / norm
