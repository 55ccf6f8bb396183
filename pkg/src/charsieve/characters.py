"""Dirichlet character groups: construction, evaluation, conductor, primitivity.

A character mod q is stored as an exponent vector on a fixed generator basis
of (ℤ/qℤ)×.  The basis comes from the CRT decomposition: each odd prime power
p^e contributes one cyclic component with a primitive-root generator; 4
contributes C₂ generated by 3; 2^e (e ≥ 3) contributes C₂ × C_{2^{e-2}}
generated by −1 and 5 [IK04, §3.1].  Evaluation is a discrete-log table
lookup, so character values are exact roots of unity: χ(n) = ω^{t(n)} with
ω = e^{2πi/L}, L the group exponent, and t(n) an integer computed without
floating arithmetic.

Conventions
-----------
* χ(n) = 0 iff gcd(n, q) > 1; the modulus-1 group has the single character
  that is identically 1 (including at n = 0).
* ``label`` is "q.k" with k the 1-based rank of the exponent vector in
  lexicographic order (components ordered by modulus, the 2-part's −1
  generator first); principal character is always "q.1".
* ``conductor`` follows the local rule: an odd p-component of order p^m·t
  (t | p−1) contributes p^{m+1} when nontrivial; the 2-part contributes 4
  for (−1)-only characters and 2^{m+2} when the 5-component has order 2^m.

References
----------
[IK04] Iwaniec, Kowalski, "Analytic Number Theory", AMS Colloq. 53.
[Ste07] Stein, "Modular Forms: A Computational Approach", GSM 79 (conductor
        algorithm, §4.3).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product

import numpy as np

from .arith import euler_phi, factorize
from .errors import DomainError

__all__ = [
    "DirichletCharacter",
    "CharacterFamily",
    "CharacterGroup",
    "character_group",
    "evaluate",
    "conductor",
    "gauss_sum",
    "product_character",
]


def _primitive_root(p: int, e: int) -> int:
    """Primitive root mod p^e for odd prime p."""
    phi_p = p - 1
    qs = factorize(phi_p).prime_divisors
    g = 2
    while True:
        if all(pow(g, phi_p // q, p) != 1 for q in qs):
            break
        g += 1
    if e == 1:
        return g
    # Lift: g works mod p^e unless g^(p-1) ≡ 1 mod p², then g+p does.
    if pow(g, p - 1, p * p) == 1:
        g += p
    return g


@dataclass(frozen=True)
class _Component:
    """One cyclic factor of (ℤ/qℤ)×: modulus piece, generator, order, dlog table."""

    modulus: int
    generator: int
    order: int
    dlog: np.ndarray = field(repr=False, compare=False)


def _build_components(q: int) -> tuple[_Component, ...]:
    comps: list[_Component] = []
    for p, e in factorize(q).factors:
        m = p**e
        if p == 2:
            if e == 1:
                continue  # (ℤ/2ℤ)× trivial
            if e == 2:
                dlog = np.full(4, -1, dtype=np.int64)
                dlog[1], dlog[3] = 0, 1
                comps.append(_Component(4, 3, 2, dlog))
            else:
                half = 2 ** (e - 2)
                dA = np.full(m, -1, dtype=np.int64)
                dB = np.full(m, -1, dtype=np.int64)
                x = 1
                for b in range(half):
                    dA[x], dB[x] = 0, b
                    dA[m - x], dB[m - x] = 1, b
                    x = 5 * x % m
                comps.append(_Component(m, m - 1, 2, dA))
                comps.append(_Component(m, 5, half, dB))
        else:
            g = _primitive_root(p, e)
            d = m // p * (p - 1)
            dlog = np.full(m, -1, dtype=np.int64)
            x = 1
            for k in range(d):
                dlog[x] = k
                x = x * g % m
            comps.append(_Component(m, g, d, dlog))
    return tuple(comps)


class CharacterGroup:
    """The full character group mod q with shared evaluation tables."""

    def __init__(self, q: int) -> None:
        if q < 1:
            raise DomainError(f"modulus must be >= 1, got {q}")
        self.modulus = q
        self.components = _build_components(q)
        self.orders = tuple(c.order for c in self.components)
        self.exponent = math.lcm(*self.orders) if self.orders else 1
        # t(n) per component, scaled so χ(n) = ω_L^{Σ a_j·scale_j·dlog_j(n)}.
        self._scales = tuple(self.exponent // c.order for c in self.components)
        ns = np.arange(q if q > 1 else 1, dtype=np.int64)
        if q == 1:
            self._unit_mask = np.ones(1, dtype=bool)
            self._dlog_matrix = np.zeros((0, 1), dtype=np.int64)
        else:
            self._unit_mask = np.gcd(ns, q) == 1
            rows = [c.dlog[ns % c.modulus] for c in self.components]
            self._dlog_matrix = (
                np.vstack(rows) if rows else np.zeros((0, q), dtype=np.int64)
            )
        self._roots = np.exp(2j * np.pi * np.arange(self.exponent) / self.exponent)
        self._table_cache: dict[tuple[int, ...], np.ndarray] = {}

    def __len__(self) -> int:
        return euler_phi(self.modulus)

    def character(self, exponents: tuple[int, ...]) -> "DirichletCharacter":
        if len(exponents) != len(self.components):
            raise DomainError(
                f"expected {len(self.components)} exponents for modulus "
                f"{self.modulus}, got {len(exponents)}"
            )
        exps = tuple(a % c.order for a, c in zip(exponents, self.components))
        return DirichletCharacter(self.modulus, exps, self)

    def characters(self) -> tuple["DirichletCharacter", ...]:
        """All φ(q) characters, in lexicographic exponent order."""
        return tuple(
            self.character(exps) for exps in product(*(range(d) for d in self.orders))
        )

    def phase_index(self, exponents: tuple[int, ...], n: int) -> int | None:
        """t with χ(n) = ω_L^t, or None when gcd(n, q) > 1."""
        q = self.modulus
        if q == 1:
            return 0
        n %= q
        if not self._unit_mask[n]:
            return None
        t = 0
        for a, sc, c in zip(exponents, self._scales, self.components):
            t += a * sc * int(c.dlog[n % c.modulus])
        return t % self.exponent

    def value_table(self, exponents: tuple[int, ...]) -> np.ndarray:
        """χ(n) for n = 0..q−1 as a complex array (cached per character)."""
        tab = self._table_cache.get(exponents)
        if tab is None:
            if self.modulus == 1:
                tab = np.ones(1, dtype=np.complex128)
            else:
                t = np.zeros(self.modulus, dtype=np.int64)
                for a, sc, row in zip(exponents, self._scales, self._dlog_matrix):
                    t += a * sc * row
                tab = self._roots[t % self.exponent]
                tab = np.where(self._unit_mask, tab, 0.0 + 0.0j)
            tab.setflags(write=False)
            self._table_cache[exponents] = tab
        return tab


@lru_cache(maxsize=64)
def _group(q: int) -> CharacterGroup:
    return CharacterGroup(q)


@dataclass(frozen=True)
class DirichletCharacter:
    """A Dirichlet character mod q, as an exponent vector on the group basis."""

    modulus: int
    exponents: tuple[int, ...]
    group: CharacterGroup = field(repr=False, compare=False)

    def __call__(self, n: int) -> complex:
        t = self.group.phase_index(self.exponents, n)
        if t is None:
            return 0j
        return complex(self.group._roots[t])

    def phase(self, n: int) -> Fraction | None:
        """χ(n) = e^{2πi·phase}; exact rational in [0,1), None off units."""
        t = self.group.phase_index(self.exponents, n)
        if t is None:
            return None
        return Fraction(t, self.group.exponent)

    def value_table(self) -> np.ndarray:
        return self.group.value_table(self.exponents)

    @property
    def order(self) -> int:
        os = [
            c.order // math.gcd(c.order, a)
            for a, c in zip(self.exponents, self.group.components)
        ]
        return math.lcm(*os) if os else 1

    @property
    def is_principal(self) -> bool:
        return all(a == 0 for a in self.exponents)

    @property
    def conductor(self) -> int:
        cond = 1
        comps = self.group.components
        # The 2-part spans at most two leading components sharing a modulus.
        i = 0
        if len(comps) >= 2 and comps[0].modulus == comps[1].modulus:
            a_minus, a_five = self.exponents[0], self.exponents[1]
            c5 = comps[1]
            if a_five % c5.order:
                m_ord = c5.order // math.gcd(c5.order, a_five)
                cond *= 4 * m_ord
            elif a_minus % 2:
                cond *= 4
            i = 2
        elif comps and comps[0].modulus == 4:
            if self.exponents[0] % 2:
                cond *= 4
            i = 1
        for a, c in zip(self.exponents[i:], comps[i:]):
            if a % c.order == 0:
                continue
            p = factorize(c.modulus).factors[0][0]
            ord_local = c.order // math.gcd(c.order, a)
            m = 0
            while ord_local % p == 0:
                ord_local //= p
                m += 1
            cond *= p ** (m + 1)
        return cond

    @property
    def is_primitive(self) -> bool:
        return self.conductor == self.modulus

    @property
    def parity(self) -> int:
        """0 if χ(−1) = 1 (even), 1 if χ(−1) = −1 (odd)."""
        if self.modulus <= 2:
            return 0
        t = self.group.phase_index(self.exponents, self.modulus - 1)
        assert t is not None
        return 0 if t == 0 else 1

    @property
    def label(self) -> str:
        rank = 0
        for a, d in zip(self.exponents, self.group.orders):
            rank = rank * d + a
        return f"{self.modulus}.{rank + 1}"

    def power(self, k: int) -> "DirichletCharacter":
        return self.group.character(
            tuple(a * k % c.order for a, c in zip(self.exponents, self.group.components))
        )

    def conjugate(self) -> "DirichletCharacter":
        return self.power(-1)

    def primitive_character(self) -> "DirichletCharacter":
        """The primitive character inducing this one (itself if primitive)."""
        f = self.conductor
        if f == self.modulus:
            return self
        target = _group(f)
        exps = []
        for c in target.components:
            n = _crt_lift(c.generator, c.modulus, f)
            # Shift within the residue class mod f until coprime to q.
            while math.gcd(n, self.modulus) != 1:
                n += f
            ph = self.phase(n)
            assert ph is not None
            a = ph * c.order
            # Integral because χ factors through (ℤ/fℤ)× by definition of f.
            assert a.denominator == 1, (self.modulus, self.exponents, f)
            exps.append(int(a) % c.order)
        out = target.character(tuple(exps))
        assert out.conductor == f
        return out


def character_group(q: int) -> "CharacterFamily":
    """All φ(q) characters mod q as a family (A = d = 1)."""
    g = _group(q)
    return CharacterFamily(q, g.characters())


@dataclass(frozen=True)
class CharacterFamily:
    """A family of characters sharing a modulus, with conductor/size exponents.

    Every member must have conductor ≤ q^A, and the family size must be ≤ q^d;
    both hold trivially for the full or primitive group with A = d = 1 (q ≥ 2).
    """

    q: int
    members: tuple[DirichletCharacter, ...]
    A: float = 1.0
    d: float = 1.0

    def __post_init__(self) -> None:
        if any(chi.modulus != self.q for chi in self.members):
            raise DomainError("family members must share the modulus")
        if self.q > 1:
            if any(chi.conductor > self.q**self.A for chi in self.members):
                raise DomainError("family violates conductor bound q^A")
            if len(self.members) > self.q**self.d:
                raise DomainError("family size exceeds q^d")

    def __iter__(self):
        return iter(self.members)

    def __len__(self) -> int:
        return len(self.members)

    def __getitem__(self, i: int) -> DirichletCharacter:
        return self.members[i]

    def primitive(self) -> "CharacterFamily":
        return CharacterFamily(
            self.q,
            tuple(chi for chi in self.members if chi.is_primitive),
            self.A,
            self.d,
        )

    def principal(self) -> DirichletCharacter:
        for chi in self.members:
            if chi.is_principal:
                return chi
        raise DomainError("family contains no principal character")


def evaluate(chi: DirichletCharacter, n: int) -> complex:
    """χ(n); exact root of unity (or 0 off the unit group)."""
    return chi(n)


def conductor(chi: DirichletCharacter) -> int:
    return chi.conductor


def gauss_sum(chi: DirichletCharacter) -> complex:
    """τ(χ) = Σ_a χ(a) e(a/q); |τ(χ)| = √q exactly when χ is primitive."""
    q = chi.modulus
    tab = chi.value_table()
    e = np.exp(2j * np.pi * np.arange(q) / q)
    return complex(np.dot(tab, e))


def product_character(chi: DirichletCharacter, psi: DirichletCharacter) -> DirichletCharacter:
    """The character mod lcm(q₁,q₂) with values χ(n)ψ(n) on its unit group."""
    m = math.lcm(chi.modulus, psi.modulus)
    target = _group(m)
    exps = []
    for c in target.components:
        n = _crt_lift(c.generator, c.modulus, m)
        p1, p2 = chi.phase(n), psi.phase(n)
        assert p1 is not None and p2 is not None
        a = (p1 + p2) * c.order
        # Integral: n^{ord(c)} ≡ 1 (mod m), so χψ(n) is an ord(c)-th root of 1.
        assert a.denominator == 1
        exps.append(int(a) % c.order)
    return target.character(tuple(exps))


def _crt_lift(g: int, m: int, full: int) -> int:
    """The residue mod ``full`` that is ≡ g (mod m) and ≡ 1 (mod full/m)."""
    rest = full // m
    if rest == 1:
        return g % full
    return (g * rest * pow(rest, -1, m) + m * pow(m, -1, rest)) % full
