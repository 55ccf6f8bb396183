"""Cyclic number fields of prime degree, realized by their character classes.

A cyclic degree-``n`` extension of the rationals (``n`` an odd prime)
corresponds, by class field theory over the rationals, to a Galois-conjugacy
class of primitive order-``n`` Dirichlet characters: the ``phi(n) = n - 1``
powers ``chi^a`` with ``a`` coprime to ``n`` cut out the same field.  The
conductor ``f`` of the class is a product of distinct primes ``p = 1 (mod
n)``, optionally times ``n^2``, and the conductor-discriminant formula gives
``D_K = f^(n-1)`` because every character in the class has conductor ``f``
[Was97, ch. 3-4].  Enumerating fields therefore reduces to enumerating
admissible conductors and partitioning the primitive order-``n`` characters
into conjugacy orbits — exact integer work, no number-field arithmetic.

Splitting data comes from the same dictionary: for unramified ``p`` the
Frobenius class of ``p`` in the cyclic Galois group is the discrete logarithm
of ``chi(p)`` against a fixed primitive ``n``-th root of unity, with class
``0`` exactly when ``p`` splits completely [Was97, ch. 14].

Conventions
-----------
* Field labels are ``"n.f.index"`` where ``index`` is the 0-based rank of
  the character class among the classes of conductor ``f``, ordered
  lexicographically by the exponent vector of the normalized representative
  (first local component scaled to 1).  Labels are stable identifiers for
  CSV joins.
* ``characters[0]`` of a :class:`CyclicField` is that normalized
  representative; Frobenius classes are discrete logs of *its* values, so
  they are well-defined integers in ``{0, ..., n-1}``.
* The ramified marker in class tables is ``-1`` (int8).

References
----------
[Was97] Washington, "Introduction to Cyclotomic Fields", 2nd ed., ch. 3
        (conductor-discriminant), ch. 14 (splitting of primes).
[Dav80] Davenport, "Multiplicative Number Theory", 2nd ed., ch. 5.
"""

from __future__ import annotations

import logging
from bisect import bisect_right
from dataclasses import dataclass
from itertools import product
from typing import Sequence

import numpy as np

from .arith import factorize, is_prime, sieve_primes
from .characters import CharacterGroup, DirichletCharacter
from .errors import DomainError

logger = logging.getLogger(__name__)

#: Frobenius-class sentinel for ramified primes.
RAMIFIED = -1

_SUPPORTED_DEGREES = (3, 5, 7)
_X_CAP = 1.0e12


@dataclass(frozen=True)
class CyclicField:
    """A cyclic degree-``n`` field over the rationals, as a character class.

    ``characters`` holds the ``n - 1`` mutually conjugate primitive order-n
    characters mod ``conductor`` that cut out the field, normalized
    representative first; ``discriminant`` is ``conductor**(degree - 1)``.
    """

    degree: int
    conductor: int
    discriminant: int
    characters: tuple[DirichletCharacter, ...]
    label: str

    def __post_init__(self) -> None:
        n = self.degree
        if not is_prime(n) or n == 2:
            raise DomainError(f"degree must be an odd prime, got {n}")
        if self.discriminant != self.conductor ** (n - 1):
            raise DomainError(
                f"discriminant {self.discriminant} is not conductor^{n - 1}"
            )
        if len(self.characters) != n - 1:
            raise DomainError(
                f"expected {n - 1} conjugate characters, got {len(self.characters)}"
            )
        for chi in self.characters:
            if chi.modulus != self.conductor or not chi.is_primitive:
                raise DomainError(f"character {chi.label} is not primitive mod f")
            if chi.order != n:
                raise DomainError(f"character {chi.label} does not have order {n}")

    @property
    def representative(self) -> DirichletCharacter:
        """The normalized defining character (first conjugate)."""
        return self.characters[0]


@dataclass(frozen=True)
class SlopeRecord:
    """Log-log regression of field counts against the discriminant bound.

    ``counts`` aligns with ``grid``; ``residuals`` aligns with the points
    actually regressed (positive counts).  ``degenerate`` flags grids whose
    counts carry no slope information (constant, or fewer than two positive
    points); the slope is then reported as 0.
    """

    degree: int
    grid: tuple[float, ...]
    counts: tuple[int, ...]
    slope: float
    intercept: float
    residuals: tuple[float, ...]
    degenerate: bool


def _admissible_conductors(n: int, f_max: int) -> list[int]:
    """Conductors ≤ f_max: squarefree products of primes ≡ 1 (mod n), times
    an optional factor n²."""
    if f_max < 1:
        return []
    split_primes = [p for p in sieve_primes(f_max) if p % n == 1]
    products: list[int] = []

    def extend(start: int, prod: int) -> None:
        for i in range(start, len(split_primes)):
            f = prod * split_primes[i]
            if f > f_max:
                return
            products.append(f)
            extend(i + 1, f)

    extend(0, 1)
    wild = n * n
    if wild <= f_max:
        products.extend(
            wild * b for b in [1, *products] if wild * b <= f_max
        )
    return sorted(products)


def _character_classes(
    n: int, conductor: int
) -> list[tuple[DirichletCharacter, ...]]:
    """Conjugacy classes of primitive order-``n`` characters mod ``conductor``.

    Builds the classes from the character-group structure: each local
    component of admissible order ``d`` contributes the ``n - 1`` nontrivial
    exponents ``k * d/n``, and conjugation acts by scaling every ``k`` by the
    same unit mod ``n``.  Classes are returned sorted by their normalized
    (first ``k`` scaled to 1) exponent vector, representative first.
    """
    group = CharacterGroup(conductor)
    strides: list[int] = []
    for comp in group.components:
        if comp.order % n != 0:
            raise DomainError(
                f"modulus {conductor} admits no primitive order-{n} characters"
            )
        strides.append(comp.order // n)

    orbits: dict[tuple[int, ...], None] = {}
    total = 0
    for ks in product(range(1, n), repeat=len(strides)):
        total += 1
        unit_inv = pow(ks[0], -1, n)
        canonical = tuple(k * unit_inv % n for k in ks)
        orbits[canonical] = None

    classes: list[tuple[DirichletCharacter, ...]] = []
    seen = 0
    for canonical in sorted(orbits):
        members = []
        for a in range(1, n):
            exps = tuple(
                (a * k % n) * s for k, s in zip(canonical, strides)
            )
            members.append(group.character(exps))
        seen += len(members)
        classes.append(tuple(members))
    if seen != total:
        raise DomainError(
            f"conjugacy classes mod {conductor} do not partition the "
            f"{total} primitive order-{n} characters"
        )
    return classes


def enumerate_cyclic(n: int, X: float) -> list[CyclicField]:
    """All cyclic degree-``n`` fields with discriminant ``f^(n-1) <= X``.

    Enumerates admissible conductors (squarefree products of primes ``= 1
    (mod n)``, optionally times ``n^2``), builds the conjugacy classes of
    primitive order-``n`` characters for each, and returns one field per
    class, sorted by (discriminant, class index).  Each field appears exactly
    once.  Supported degrees are 3, 5, 7 at ``X <= 10^12``.
    """
    if n not in _SUPPORTED_DEGREES:
        raise DomainError(f"degree must be one of {_SUPPORTED_DEGREES}, got {n}")
    if not 0 < X <= _X_CAP:
        raise DomainError(f"need 0 < X <= {_X_CAP:g}, got {X}")
    f_max = int(round(X ** (1.0 / (n - 1))))
    while f_max ** (n - 1) > X:
        f_max -= 1
    while (f_max + 1) ** (n - 1) <= X:
        f_max += 1

    fields: list[CyclicField] = []
    for f in _admissible_conductors(n, f_max):
        for index, members in enumerate(_character_classes(n, f)):
            fields.append(
                CyclicField(
                    degree=n,
                    conductor=f,
                    discriminant=f ** (n - 1),
                    characters=members,
                    label=f"{n}.{f}.{index}",
                )
            )
    fields.sort(key=lambda K: (K.discriminant, K.label))
    logger.debug("enumerated %d cyclic degree-%d fields with D <= %g", len(fields), n, X)
    return fields


def frobenius_class(K: CyclicField, p: int) -> int:
    """Frobenius class of ``p`` in ``{0, ..., n-1}``, or ``RAMIFIED``.

    The class is the discrete log of ``chi(p)`` against ``e^(2*pi*i/n)`` for
    the field's normalized representative ``chi``; class 0 means ``p`` splits
    completely.  Primes dividing the conductor return :data:`RAMIFIED`.
    """
    if not is_prime(p):
        raise DomainError(f"p must be prime, got {p}")
    if K.conductor % p == 0:
        return RAMIFIED
    phase = K.representative.phase(p)
    assert phase is not None  # p coprime to the conductor by the branch above
    return int(phase * K.degree) % K.degree


def residue_class_table(K: CyclicField) -> np.ndarray:
    """Frobenius class of every residue mod the conductor, as int8.

    ``table[p % f]`` is the class of any unramified prime ``p``;
    entries at residues sharing a factor with ``f`` hold :data:`RAMIFIED`.
    The discrete logs come from the exact rational phase of the
    representative character, so no floating-point rounding is involved.
    """
    chi = K.representative
    f, n = K.conductor, K.degree
    table = np.full(f, RAMIFIED, dtype=np.int8)
    for a in range(1, f):
        phase = chi.phase(a)
        if phase is not None:
            table[a] = int(phase * n) % n
    return table


def discriminant_exponent(n: int, g_order: int) -> int:
    """Conductor exponent ``n - 1`` contributed by a totally ramified prime.

    For a cyclic group of prime order ``n``, an inertia generator ``g`` acts
    on the ``n`` cosets of the trivial subgroup with a single orbit, leaving
    ``n - #orbits = n - 1``.  Non-generators (``g_order != n``) are excluded
    by the totally-ramified family and rejected.
    """
    if not is_prime(n):
        raise DomainError(f"n must be prime, got {n}")
    if g_order != n:
        raise DomainError(
            f"inertia generator must have order {n}, got order {g_order}"
        )
    return n - 1


def count_slope(n: int, X_grid: Sequence[float]) -> SlopeRecord:
    """Least-squares slope of ``log count`` against ``log X`` over the grid.

    Requires at least four grid points spanning at least three decades.  The
    family is enumerated once at the largest grid point and counted by
    bisection at the rest.  Grid points with zero count carry no information
    for the log-log fit and are dropped; a grid left with constant or fewer
    than two positive counts yields ``slope = 0`` with ``degenerate`` set.
    """
    grid = sorted(float(x) for x in X_grid)
    if len(grid) < 4:
        raise DomainError(f"need at least 4 grid points, got {len(grid)}")
    if grid[0] <= 0.0:
        raise DomainError("grid points must be positive")
    if grid[-1] / grid[0] < 1.0e3:
        raise DomainError(
            f"grid must span >= 3 decades, got {grid[-1] / grid[0]:g}x"
        )
    fields = enumerate_cyclic(n, grid[-1])
    discs = [K.discriminant for K in fields]
    counts = tuple(bisect_right(discs, x) for x in grid)

    kept = [(x, c) for x, c in zip(grid, counts) if c > 0]
    distinct = {c for _, c in kept}
    if len(kept) < 2 or len(distinct) < 2:
        return SlopeRecord(
            degree=n, grid=tuple(grid), counts=counts, slope=0.0,
            intercept=0.0, residuals=(), degenerate=True,
        )
    log_x = np.log([x for x, _ in kept])
    log_c = np.log([c for _, c in kept])
    slope, intercept = np.polyfit(log_x, log_c, 1)
    residuals = log_c - (slope * log_x + intercept)
    record = SlopeRecord(
        degree=n, grid=tuple(grid), counts=counts, slope=float(slope),
        intercept=float(intercept),
        residuals=tuple(float(r) for r in residuals), degenerate=False,
    )
    logger.debug("degree-%d slope %.4f over %d points", n, record.slope, len(kept))
    return record
