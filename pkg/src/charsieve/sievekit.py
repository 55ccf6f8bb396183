"""Pseudo-character apparatus and the Selberg-weighted zero detector.

For a primitive Dirichlet character f of conductor q and a sieve level z ≥ 1
with P = ∏_{p<z} p, the admissible moduli are the squarefree r ≤ R_cap
coprime to q·P.  The pseudo-character weights are

    ψ_f(r)  = μ(r)·r·|λ_f(r)|⁻²      (= μ(r)·r in degree 1),
    ψ_{f,r}(n) = μ(n)²·ψ_f(gcd(n,r)),

and the companion objects h(d) (a finite multiplicative convolution table on
squarefree d | rt) and ρ_f(d) = ∏_{p|d} p/(p+1) satisfy two exact identities:
pointwise, ψ_{f,r}(n)ψ_{g,t}(n) = μ(n)² Σ_{d|n} h(d); and on weighted average,
Σ_d h(d)ρ_f(d)/d = δ(r,t)·|ψ_f(r)|.  Everything on this side of the module is
integer/rational arithmetic and is checked with zero tolerance.

The detector side combines Selberg weights λ_d = μ(d)m(d) (m the standard
truncated-log shape with breakpoints w < y, cf. [Gra81]) with exponential
damping e^{-n/X}, X = x/(log qT)²:

    z_r(f,ρ) = Σ♭_{n ≤ x, (n,P)=1} Δ(n) e^{-n/X} ψ_{f,r}(n) λ_f(n) n^{-ρ},

Δ(n) = Σ_{d|n} λ_d.  The n = 1 term, e^{-1/X}, is kept out of z_r: it is the
split-off main term of the Mellin identity

    e^{-1/X} + z_r(f,ρ) + Σ♭_{n>x} (same summand)
        = (1/2πi) ∫_{Re s=3} L♭(f,s+ρ) M_r(f,s+ρ) Γ(s) Xˢ ds,

which `detector_identity_check` verifies numerically with certified bounds on
both truncations (series remainder and Γ-decay contour tail).

References
----------
[Gra81] Graham, "On Linnik's constant", Acta Arith. 39 (1981).
[MV07]  Montgomery & Vaughan, "Multiplicative Number Theory I", ch. 3, 7.
[IK04]  Iwaniec & Kowalski, "Analytic Number Theory", ch. 5, 6.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.special import loggamma

from .arith import factorize, moebius_sieve, sieve_primes
from .characters import DirichletCharacter
from .errors import DomainError, PrecisionError

__all__ = [
    "PseudoCharacterContext",
    "SelbergWeightScheme",
    "OrthogonalityReport",
    "DetectorIdentityReport",
    "admissible_r_set",
    "psi_f",
    "psi_fr",
    "h_coeffs",
    "rho_f",
    "orthogonality_check",
    "selberg_delta",
    "mollifier_value",
    "mollifier_envelope",
    "detector_value",
    "detector_identity_check",
    "pseudo_coefficient_bound",
    "admissible_weight_sum",
    "delta_moment_ratio",
]

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PseudoCharacterContext:
    """Bundles a character f with the sieve parameters (δ, z, P, R_cap)."""

    character: DirichletCharacter
    delta: float = 0.1
    z: float = 4.0
    r_cap: int = 100
    P: int = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if not 0.0 < self.delta < 0.25:
            raise DomainError(f"delta must lie in (0, 1/4), got {self.delta}")
        if self.z < 1:
            raise DomainError(f"z must be >= 1, got {self.z}")
        if self.r_cap < 1:
            raise DomainError(f"r_cap must be >= 1, got {self.r_cap}")
        prod = 1
        for p in self._small_primes():
            prod *= p
        object.__setattr__(self, "P", prod)

    def _small_primes(self) -> list[int]:
        """Primes p < z."""
        bound = math.ceil(self.z) - 1
        if bound < 2:
            return []
        return [p for p in sieve_primes(bound) if p < self.z]


def _is_admissible(ctx: PseudoCharacterContext, r: int) -> bool:
    if not 1 <= r <= ctx.r_cap:
        return False
    if not factorize(r).is_squarefree:
        return False
    # coprime to P and to the full modulus (λ_f(p) ≠ 0 needs p ∤ q; the
    # |λ_f(p)| > p^{-δ} condition is then automatic in degree 1).
    return math.gcd(r, ctx.P * ctx.character.modulus) == 1


def admissible_r_set(ctx: PseudoCharacterContext) -> list[int]:
    """All admissible r ≤ R_cap, ascending.  Always contains r = 1."""
    mu = moebius_sieve(ctx.r_cap)
    qp = ctx.P * ctx.character.modulus
    return [
        int(r)
        for r in range(1, ctx.r_cap + 1)
        if mu[r] != 0 and math.gcd(r, qp) == 1
    ]


def psi_f(ctx: PseudoCharacterContext, r: int) -> int:
    """ψ_f(r) = μ(r)·r·|λ_f(r)|⁻², an exact integer in degree 1."""
    fac = factorize(r)
    if not fac.is_squarefree:
        return 0
    if math.gcd(r, ctx.character.modulus) != 1:
        raise DomainError(f"psi_f needs lambda_f(r) != 0; r={r} shares a prime with the modulus")
    return fac.moebius() * r


def psi_fr(ctx: PseudoCharacterContext, r: int, n: int) -> int:
    """ψ_{f,r}(n) = μ(n)²·ψ_f(gcd(n, r))."""
    if not factorize(n).is_squarefree:
        return 0
    return psi_f(ctx, math.gcd(n, r))


def h_coeffs(
    ctx_f: PseudoCharacterContext,
    ctx_g: PseudoCharacterContext,
    r: int,
    t: int,
) -> dict[int, int]:
    """The convolution table h on squarefree d | rt.

    h(d) = ∏_{p|d, p|r, p∤t}(ψ_f(p)−1) · ∏_{p|d, p|t, p∤r}(ψ_g(p)−1)
           · ∏_{p|d, p|gcd(r,t)}(ψ_f(p)ψ_g(p)−1),

    multiplicative over the primes of rad(rt), so the table is built prime by
    prime.  Satisfies |h(d)| ≤ ∏_{p|r}2|ψ_f(p)| · ∏_{p|t}2|ψ_g(p)|.
    """
    if not _is_admissible(ctx_f, r):
        raise DomainError(f"r={r} is not admissible for the f context")
    if not _is_admissible(ctx_g, t):
        raise DomainError(f"t={t} is not admissible for the g context")
    table = {1: 1}
    for p in sorted(set(factorize(r).prime_divisors) | set(factorize(t).prime_divisors)):
        if r % p == 0 and t % p == 0:
            hp = psi_f(ctx_f, p) * psi_f(ctx_g, p) - 1
        elif r % p == 0:
            hp = psi_f(ctx_f, p) - 1
        else:
            hp = psi_f(ctx_g, p) - 1
        table.update({d * p: v * hp for d, v in table.items()})
    return table


def rho_f(ctx: PseudoCharacterContext, d: int) -> Fraction:
    """ρ_f(d) = ∏_{p|d}(1+|λ_f(p)|²p⁻¹)⁻¹ = ∏_{p|d} p/(p+1), exact."""
    fac = factorize(d)
    if not fac.is_squarefree:
        raise DomainError(f"rho_f needs squarefree d, got {d}")
    if math.gcd(d, ctx.character.modulus) != 1:
        raise DomainError(f"rho_f needs d coprime to the modulus, got {d}")
    out = Fraction(1)
    for p in fac.prime_divisors:
        out *= Fraction(p, p + 1)
    return out


@dataclass(frozen=True)
class OrthogonalityReport:
    """Outcome of the two exact pseudo-character identities for one (r, t)."""

    r: int
    t: int
    n_max: int
    pointwise_ok: bool
    first_counterexample: int | None
    weighted_sum: Fraction
    weighted_expected: Fraction

    @property
    def weighted_ok(self) -> bool:
        return self.weighted_sum == self.weighted_expected

    @property
    def passed(self) -> bool:
        return self.pointwise_ok and self.weighted_ok


def _gcd_lookup(values: np.ndarray, mapping: dict[int, int]) -> np.ndarray:
    uniq, inv = np.unique(values, return_inverse=True)
    lut = np.array([mapping[int(v)] for v in uniq], dtype=np.int64)
    return lut[inv]


def orthogonality_check(
    ctx: PseudoCharacterContext, r: int, t: int, n_max: int
) -> OrthogonalityReport:
    """Verify both identities for the pair (f, f̄) at (r, t), exactly.

    Pointwise: ψ_{f,r}(n)ψ_{f̄,t}(n) = μ(n)² Σ_{d|n} h(d) for every n ≤ n_max
    (integer arithmetic).  Weighted: Σ_d h(d)|λ_f(d)|²ρ_f(d)/d = δ(r,t)|ψ_f(r)|
    (rational arithmetic).  Failures are reported, not raised.
    """
    # Degree 1: ψ_{f̄} = ψ_f, so one context serves both sides.
    h = h_coeffs(ctx, ctx, r, t)
    ns = np.arange(1, n_max + 1, dtype=np.int64)
    mu = moebius_sieve(n_max)[1:]
    sqfree = (mu != 0).astype(np.int64)

    psi_map_r = {d: psi_f(ctx, d) for d in factorize(r).squarefree_divisors()}
    psi_map_t = {d: psi_f(ctx, d) for d in factorize(t).squarefree_divisors()}
    lhs = _gcd_lookup(np.gcd(ns, r), psi_map_r) * _gcd_lookup(np.gcd(ns, t), psi_map_t)
    lhs *= sqfree

    lcm_rt = r * t // math.gcd(r, t)
    h_partial = {
        d: sum(h[e] for e in factorize(d).divisors() if e in h)
        for d in factorize(lcm_rt).squarefree_divisors()
    }
    rhs = sqfree * _gcd_lookup(np.gcd(ns, lcm_rt), h_partial)

    mism = np.flatnonzero(lhs != rhs)
    first = int(ns[mism[0]]) if len(mism) else None

    weighted = sum((Fraction(v) * rho_f(ctx, d) / d for d, v in h.items()), Fraction(0))
    expected = Fraction(abs(psi_f(ctx, r))) if r == t else Fraction(0)
    return OrthogonalityReport(
        r=r,
        t=t,
        n_max=n_max,
        pointwise_ok=first is None,
        first_counterexample=first,
        weighted_sum=weighted,
        weighted_expected=expected,
    )


@dataclass(frozen=True)
class SelbergWeightScheme:
    """Selberg weight data: breakpoints w < y, series length x, damping qt.

    m(d) is 1 up to w, decays as log(y/d)/log(y/w) on [w, y], and vanishes
    beyond y; λ_d = μ(d)m(d); Δ(n) = Σ_{d|n} λ_d vanishes exactly for
    1 < n ≤ w.  X = x/(log qt)² sets the e^{-n/X} damping scale.
    """

    w: float
    y: float
    x: float
    qt: float

    def __post_init__(self) -> None:
        if self.w < 1:
            raise DomainError(f"w must be >= 1, got {self.w}")
        if self.y <= self.w:
            raise DomainError(f"y must exceed w, got y={self.y}, w={self.w}")
        if self.x <= 0:
            raise DomainError(f"x must be positive, got {self.x}")
        if self.qt <= 1:
            raise DomainError(f"qt must exceed 1, got {self.qt}")

    @property
    def X(self) -> float:
        return self.x / math.log(self.qt) ** 2

    def m(self, d: float) -> float:
        if d <= self.w:
            return 1.0
        if d >= self.y:
            return 0.0
        return math.log(self.y / d) / math.log(self.y / self.w)

    def lambda_array(self, limit: int | None = None) -> np.ndarray:
        """λ_d = μ(d)·m(d) for 0 ≤ d ≤ limit (index 0 unused)."""
        top = int(self.y) if limit is None else min(limit, int(self.y))
        mu = moebius_sieve(max(top, 1))
        lam = np.zeros(top + 1)
        for d in range(1, top + 1):
            if mu[d]:
                lam[d] = mu[d] * self.m(d)
        return lam

    def delta_array(self, n_max: int) -> np.ndarray:
        """Δ(n) for 0 ≤ n ≤ n_max by a divisor-add sieve."""
        lam = self.lambda_array(n_max)
        out = np.zeros(n_max + 1)
        for d in range(1, len(lam)):
            if lam[d]:
                out[d::d] += lam[d]
        return out


def selberg_delta(scheme: SelbergWeightScheme, n: int) -> float:
    """Δ(n) = Σ_{d|n} μ(d)m(d); exactly 0 for 1 < n ≤ w."""
    if n < 1:
        raise DomainError(f"selberg_delta needs n >= 1, got {n}")
    total = 0.0
    for d in factorize(n).divisors():
        if d <= scheme.y:
            dm = factorize(d).moebius()
            if dm:
                total += dm * scheme.m(d)
    return total


def _coprime_to_small_primes_mask(n_max: int, ctx: PseudoCharacterContext) -> np.ndarray:
    """Boolean mask over 1..n_max of gcd(n, P) = 1, without big-int gcds."""
    mask = np.ones(n_max + 1, dtype=bool)
    mask[0] = False
    for p in ctx._small_primes():
        mask[p::p] = False
    return mask[1:]


def _psi_lookup(ctx: PseudoCharacterContext, r: int, ns: np.ndarray) -> np.ndarray:
    psi_map = {d: psi_f(ctx, d) for d in factorize(r).squarefree_divisors()}
    return _gcd_lookup(np.gcd(ns, r), psi_map).astype(np.float64)


def detector_value(
    ctx: PseudoCharacterContext,
    r: int,
    rho: complex,
    scheme: SelbergWeightScheme,
) -> complex:
    """z_r(f,ρ) = Σ♭_{n ≤ x, (n,P)=1} Δ(n) e^{-n/X} ψ_{f,r}(n) λ_f(n) n^{-ρ}.

    The sum starts at n = 2: the n = 1 term is the e^{-1/X} main term of the
    Mellin identity and is accounted separately there (Δ(n) = 0 for
    1 < n ≤ w, so any starting point in that range gives the same value).
    """
    if not _is_admissible(ctx, r):
        raise DomainError(f"r={r} is not admissible")
    top = int(math.floor(scheme.x))
    if top < 2:
        return 0j
    return complex(_detector_sum(ctx, r, rho, scheme, 2, top))


def _detector_sum(
    ctx: PseudoCharacterContext,
    r: int,
    rho: complex,
    scheme: SelbergWeightScheme,
    lo: int,
    hi: int,
) -> complex:
    """The detector summand aggregated over lo ≤ n ≤ hi (vectorized)."""
    if hi < lo:
        return 0j
    ns = np.arange(lo, hi + 1, dtype=np.int64)
    mu = moebius_sieve(hi)[lo:]
    keep = (mu != 0) & _coprime_to_small_primes_mask(hi, ctx)[lo - 1 :]
    ns = ns[keep]
    if len(ns) == 0:
        return 0j
    delta = scheme.delta_array(hi)[ns]
    psi = _psi_lookup(ctx, r, ns)
    chi = ctx.character.value_table()[ns % ctx.character.modulus]
    logn = np.log(ns)
    weights = delta * np.exp(-ns / scheme.X) * psi
    return complex(np.sum(weights * chi * np.exp(-rho * logn)))


def _mollifier_sum(
    ctx: PseudoCharacterContext,
    r: int,
    s: np.ndarray,
    scheme: SelbergWeightScheme,
) -> np.ndarray:
    """M_r(f,s) on an array of s values (no domain restriction).

    M_r(f,s) = Σ♭_{d ≤ y, (d,P)=1} λ_d ψ_{f,r}(d) λ_f(d) d^{-s}
               · ∏_{p | r/(r,d)} (1 + ψ_f(p)λ_f(p)p^{-s})
               · ∏_{p | rd} (1 + λ_f(p)p^{-s})^{-1}.
    """
    chi = ctx.character
    top = int(scheme.y)
    mu = moebius_sieve(max(top, 1))
    coprime = _coprime_to_small_primes_mask(max(top, 1), ctx)
    r_primes = factorize(r).prime_divisors
    out = np.zeros(len(s), dtype=np.complex128)
    for d in range(1, top + 1):
        if mu[d] == 0 or not coprime[d - 1]:
            continue
        lam_d = mu[d] * scheme.m(d)
        if lam_d == 0.0:
            continue
        chi_d = complex(chi(d))
        if chi_d == 0:
            continue
        term = lam_d * psi_fr(ctx, r, d) * chi_d * np.exp(-s * math.log(d))
        for p in r_primes:
            if d % p != 0:
                term = term * (
                    1 + psi_f(ctx, p) * complex(chi(p)) * np.exp(-s * math.log(p))
                )
        rd_primes = set(r_primes) | set(factorize(d).prime_divisors)
        for p in sorted(rd_primes):
            term = term / (1 + complex(chi(p)) * np.exp(-s * math.log(p)))
        out += term
    return out


def mollifier_value(
    ctx: PseudoCharacterContext,
    r: int,
    s: complex,
    scheme: SelbergWeightScheme,
) -> complex:
    """The mollifier M_r(f,s) in its analytic band 1/2 ≤ Re(s) ≤ 1.

    Requires z ≥ 4 (the degree-1 sieve level keeping 1+λ_f(p)p^{-s} away
    from 0 for the primes entering the inverted factors).
    """
    s = complex(s)
    if not 0.5 <= s.real <= 1.0:
        raise DomainError(f"mollifier_value is defined for 1/2 <= Re(s) <= 1, got {s}")
    if ctx.z < 4:
        raise DomainError(f"mollifier_value requires z >= 4, got z={ctx.z}")
    if not _is_admissible(ctx, r):
        raise DomainError(f"r={r} is not admissible")
    return complex(_mollifier_sum(ctx, r, np.array([s]), scheme)[0])


def mollifier_envelope(
    ctx: PseudoCharacterContext,
    r: int,
    scheme: SelbergWeightScheme,
    s: complex,
    eps: float,
) -> float:
    """The comparison envelope r^{1+2δ−Re(s)+ε} · y^{1−Re(s)+ε}."""
    sigma = complex(s).real
    return r ** (1 + 2 * ctx.delta - sigma + eps) * scheme.y ** (1 - sigma + eps)


def pseudo_coefficient_bound(
    ctx: PseudoCharacterContext, r: int, d: int, eps: float
) -> float:
    """The envelope r^δ · gcd(r,d) · d^{ε/2} dominating |ψ_{f,r}(d)λ_f(d)|."""
    return r**ctx.delta * math.gcd(r, d) * d ** (eps / 2)


def admissible_weight_sum(ctx: PseudoCharacterContext, r_limit: int) -> Fraction:
    """Σ 1/|ψ_f(r)| over admissible squarefree r ≤ r_limit, exact.

    In degree 1 each term is 1/r.  The cap is the argument, not ctx.r_cap,
    so calibration sweeps can range over several decades with one context.
    """
    mu = moebius_sieve(r_limit)
    qp = ctx.P * ctx.character.modulus
    total = Fraction(0)
    for r in range(1, r_limit + 1):
        if mu[r] != 0 and math.gcd(r, qp) == 1:
            total += Fraction(1, r)
    return total


def delta_moment_ratio(
    scheme: SelbergWeightScheme, x: float, alpha: float
) -> float:
    """Σ_{n≤x} Δ(n)² n^{1−2α} divided by the envelope log(x/w)/log(y/w)·x^{2−2α}."""
    if not 0.5 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (1/2, 1), got {alpha}")
    if x <= scheme.w:
        raise DomainError(f"x must exceed w={scheme.w}, got {x}")
    top = int(math.floor(x))
    delta = scheme.delta_array(top)[1:]
    ns = np.arange(1, top + 1, dtype=np.float64)
    moment = float(np.sum(delta * delta * ns ** (1 - 2 * alpha)))
    envelope = (
        math.log(x / scheme.w) / math.log(scheme.y / scheme.w) * x ** (2 - 2 * alpha)
    )
    return moment / envelope


@dataclass(frozen=True)
class DetectorIdentityReport:
    """Both sides of the Mellin identity with certified truncation bounds."""

    lhs: complex
    rhs: complex
    series_tail_bound: float
    contour_tail_bound: float
    quadrature_error: float

    @property
    def residual(self) -> float:
        return abs(self.lhs - self.rhs)

    @property
    def certified_error(self) -> float:
        return self.series_tail_bound + self.contour_tail_bound + self.quadrature_error


def _mollifier_abs_bound(
    ctx: PseudoCharacterContext,
    r: int,
    sigma: float,
    scheme: SelbergWeightScheme,
) -> float:
    """Σ of absolute values of the mollifier terms at Re(s) = sigma ≥ 2."""
    top = int(scheme.y)
    mu = moebius_sieve(max(top, 1))
    coprime = _coprime_to_small_primes_mask(max(top, 1), ctx)
    r_primes = factorize(r).prime_divisors
    total = 0.0
    for d in range(1, top + 1):
        if mu[d] == 0 or not coprime[d - 1]:
            continue
        term = scheme.m(d) * abs(psi_fr(ctx, r, d)) * float(d) ** -sigma
        if term == 0.0:
            continue
        for p in r_primes:
            if d % p != 0:
                term *= 1 + abs(psi_f(ctx, p)) * float(p) ** -sigma
        rd_primes = set(r_primes) | set(factorize(d).prime_divisors)
        for p in sorted(rd_primes):
            term /= 1 - float(p) ** -sigma
        total += term
    return total


def _l_flat_euler_product(
    chi: DirichletCharacter, s: np.ndarray, z: float, prime_cap: int = 3000
) -> tuple[np.ndarray, float]:
    """L♭(f,s) = ∏_{p ≥ z}(1+λ_f(p)p^{-s}) on Re(s) ≥ 3, with a certified
    relative truncation bound for the omitted p > prime_cap factors."""
    sigma_min = float(np.min(s.real))
    if sigma_min < 3.0:
        raise DomainError("Euler-product route requires Re(s) >= 3")
    out = np.ones(len(s), dtype=np.complex128)
    for p in sieve_primes(prime_cap):
        if p >= z:
            out = out * (1 + complex(chi(p)) * np.exp(-s * math.log(p)))
    log_tail = prime_cap ** (1 - sigma_min) / (sigma_min - 1)
    return out, math.expm1(log_tail)


def detector_identity_check(
    ctx: PseudoCharacterContext,
    r: int,
    rho: complex,
    scheme: SelbergWeightScheme,
    contour_height: float,
    tol: float = 1e-8,
) -> DetectorIdentityReport:
    """Verify e^{-1/X} + z_r(f,ρ) + tail = (1/2πi)∫_{(3)} L♭·M_r·Γ(s)Xˢ ds.

    The left side extends the detector series until the certified geometric
    remainder (|Δ(n)| ≤ y, |ψ_{f,r}(n)| ≤ r, |n^{-ρ}| ≤ 1) drops below
    tol/10; the right side is an adaptive Simpson integral on Re(s) = 3,
    truncated at ±contour_height with a certified Γ-decay tail bound.
    """
    rho = complex(rho)
    if rho.real < 0.5:
        raise DomainError(f"identity check expects Re(rho) >= 1/2, got {rho}")
    if contour_height < 5.0:
        raise DomainError(f"contour_height must be >= 5, got {contour_height}")
    X = scheme.X
    x_top = int(math.floor(scheme.x))
    budget = tol / 10

    n_ext = max(x_top, 2)
    while scheme.y * r * math.exp(-n_ext / X) / math.expm1(1 / X) > budget:
        n_ext = int(n_ext * 1.5) + 1
        if n_ext > 50_000_000:
            raise PrecisionError("series tail will not certify at these parameters")
    series_tail = scheme.y * r * math.exp(-n_ext / X) / math.expm1(1 / X)
    lhs = (
        math.exp(-1 / X)
        + detector_value(ctx, r, rho, scheme)
        + _detector_sum(ctx, r, rho, scheme, max(x_top + 1, 2), n_ext)
    )

    def integrand(u: np.ndarray) -> np.ndarray:
        s = 3.0 + 1j * u + rho
        lf, _ = _l_flat_euler_product(ctx.character, s, ctx.z)
        mr = _mollifier_sum(ctx, r, s, scheme)
        gam = np.exp(loggamma(3.0 + 1j * u))
        return lf * mr * gam * np.exp((3.0 + 1j * u) * math.log(X))

    # Tail beyond ±H: |Γ(3+iu)| ≤ |Γ(3+iH)|·e^{-(u-H)} for H ≥ 5, and
    # |L♭·M_r| is bounded on Re(s) = 3+Re(ρ) by term-by-term absolute values.
    sigma0 = 3.0 + rho.real
    c_l = math.exp(sum(float(p) ** -sigma0 for p in sieve_primes(3000) if p >= ctx.z) + 1e-9)
    c_m = _mollifier_abs_bound(ctx, r, sigma0, scheme)
    gam_h = abs(np.exp(loggamma(complex(3.0, contour_height))))
    contour_tail = c_l * c_m * X**3 * 2 * gam_h / (2 * math.pi)
    if contour_tail > budget:
        raise PrecisionError(
            f"Gamma-decay tail {contour_tail:.3e} exceeds budget {budget:.3e};"
            " raise contour_height"
        )

    h_steps = 256
    prev = None
    rhs = None
    quad_err = math.inf
    while h_steps <= 2**18:
        u = np.linspace(-contour_height, contour_height, h_steps + 1)
        f = integrand(u)
        weights = np.ones(h_steps + 1)
        weights[1:-1:2] = 4.0
        weights[2:-1:2] = 2.0
        step = 2 * contour_height / h_steps
        cur = complex(np.sum(weights * f) * step / 3.0 / (2 * math.pi))
        if prev is not None:
            quad_err = abs(cur - prev)
            if quad_err < budget:
                rhs = cur
                break
        prev = cur
        h_steps *= 2
    if rhs is None:
        raise PrecisionError("contour quadrature did not converge")

    report = DetectorIdentityReport(
        lhs=complex(lhs),
        rhs=rhs,
        series_tail_bound=series_tail,
        contour_tail_bound=contour_tail,
        quadrature_error=quad_err,
    )
    logger.debug(
        "detector identity r=%d rho=%s residual=%.3e certified=%.3e",
        r,
        rho,
        report.residual,
        report.certified_error,
    )
    return report
