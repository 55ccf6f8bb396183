"""Mean-value harnesses for pseudo-character-twisted Dirichlet polynomials.

This module evaluates both sides of large-sieve-type inequalities for short
Dirichlet polynomials twisted by the pseudo-characters of
:mod:`charsieve.sievekit`: a zero-sum form (polynomial evaluated at a
well-spaced family of low-lying zeros) against a density-weighted majorant,
and a dyadic bilinear form against the mean-square majorant ``(tau-1) * N'
* sum |a_n|^2``.  It also houses the supporting bookkeeping: eta-spaced
selection of zeros by horizontal strips, the duality (operator-norm
symmetry) check on the explicit coefficient matrix, the per-strip zero
count envelope, and the parameter calculator that turns ``(q, T, R)`` into
the support thresholds and sieve parameters used downstream.

Conventions
-----------
* Coefficient vectors are sparse mappings ``n -> a_n`` with integer keys
  ``n >= 1``; absent keys mean ``a_n = 0``.  Values may be complex.
* The family sum ranges over the *primitive* members of a
  :class:`~charsieve.characters.CharacterFamily`; imprimitive characters
  are induced and carry no new polynomial.
* Each primitive ``f`` is weighted by ``1/s(f)`` with ``s(f) = phi(q)/q``
  (the unramified-pair residue), each pseudo-modulus ``r`` by
  ``1/|psi_f(r)| = 1/r``.
* Implied absolute constants in the underlying inequalities are neither
  known nor asserted: every harness reports an empirical *ratio*, and the
  support hypotheses (coefficients supported above the threshold ``M``)
  are enforced only in the default ``mode="paper"``; ``mode="desk"``
  relaxes them behind an explicit, report-stamped flag.
* All floating-point reductions run through :func:`numpy.sum` on arrays
  built in a fixed (sorted) order, so results are reproducible run to run
  regardless of how callers parallelize the per-``(f, r)`` work.

References
----------
[MV07] Montgomery & Vaughan, "Multiplicative Number Theory I", ch. 7
       (the classical large sieve and its dual form).
[IK04] Iwaniec & Kowalski, "Analytic Number Theory", ch. 7 (bilinear
       forms, duality) and ch. 10 (zero-counting conventions).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .arith import SplitMix64
from .characters import CharacterFamily
from .errors import ContractError, DomainError
from .lfunc import Rectangle, Zero, rankin_selberg_residue
from .sievekit import PseudoCharacterContext, admissible_r_set, psi_f, psi_fr

logger = logging.getLogger(__name__)

#: Slack allowed when checking that zeros lie inside the stated rectangle;
#: covers the boundary offset used by the contour counter when it certifies
#: an enclosure that straddles the rectangle edge.
_RECT_SLACK = 1e-3

#: Relative convergence tolerance and iteration cap for power iteration.
_POWER_TOL = 1e-10
_POWER_MAX_ITER = 1000


# ---------------------------------------------------------------------------
# domain types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WellSpacedSelection:
    """A parity class of per-strip zero representatives, pairwise eta-spaced.

    ``rectangles`` is the inclusive index range ``(j_lo, j_hi)`` of occupied
    horizontal strips ``R_j = [alpha, 1] x [j*eta, (j+1)*eta)``; it is empty
    when ``j_hi < j_lo``.  ``chosen`` holds the representatives of the larger
    parity class (ties go to even), so ``len(chosen)`` is at least half the
    number of per-strip representatives and any two chosen zeros have
    imaginary parts at least ``eta`` apart.
    """

    eta: float
    rectangles: tuple[int, int]
    chosen: tuple[Zero, ...]
    parity: str
    representative_count: int

    def __post_init__(self) -> None:
        if not self.eta > 0.0:
            raise DomainError(f"eta must be positive, got {self.eta}")
        if self.parity not in ("even", "odd"):
            raise DomainError(f"parity must be 'even' or 'odd', got {self.parity!r}")
        gammas = sorted(z.gamma for z in self.chosen)
        for lo, hi in zip(gammas, gammas[1:]):
            if hi - lo < self.eta - 1e-12:
                raise DomainError(
                    f"selection violates spacing: gap {hi - lo} < eta {self.eta}"
                )
        if 2 * len(self.chosen) < self.representative_count:
            raise DomainError(
                "selection smaller than half the representatives: "
                f"{len(self.chosen)} of {self.representative_count}"
            )


@dataclass(frozen=True)
class SieveReport:
    """Both sides of a sieve inequality plus the run parameters that made it.

    ``ratio`` is ``lhs/rhs`` (0 when ``rhs`` is 0); it is *reported*, never
    asserted against 1, because the implied constants are not effective.
    """

    lhs: float
    rhs: float
    ratio: float
    params: dict[str, object] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.lhs < 0.0 or self.rhs < 0.0:
            raise DomainError("sieve report sides must be nonnegative")


@dataclass(frozen=True)
class ConstantsRecord:
    """Exponents, thresholds and sieve parameters derived from the inputs.

    Fields that the given inputs do not determine are ``None``; values whose
    formula overflows a float are ``math.inf``.  Inputs are echoed so the
    record can be serialized as a self-contained report.
    """

    n: float
    n_k: float
    A: float
    d: float
    q: float | None
    T: float | None
    c: float | None
    delta: float | None
    alpha: float | None
    tau: float | None
    eps0: float
    eps2: float | None
    eps3: float | None
    eps4: float | None
    c1: float
    c2: float
    z: float
    eta: float | None
    R: float | None
    M: float | None
    M_prime: float | None
    w: float | None
    y: float | None
    x: float | None


@dataclass(frozen=True)
class DualityReport:
    """Operator-norm symmetry data for the explicit coefficient matrix.

    ``primal_norm_sq`` / ``dual_norm_sq`` are the largest eigenvalues of
    ``C* C`` and ``C C*`` (power iteration refined from random starts);
    equality up to convergence error is the duality being tested.
    ``sampled_*_max`` are the best Rayleigh quotients among the raw random
    unit starts, and ``harness_max_relative_gap`` is the worst relative
    disagreement between the bilinear harness evaluated on a random
    coefficient vector and ``||C a||^2`` from the explicit matrix.
    """

    rows: int
    cols: int
    trials: int
    seed: int
    primal_norm_sq: float
    dual_norm_sq: float
    sampled_primal_max: float
    sampled_dual_max: float
    harness_max_relative_gap: float

    @property
    def norm_relative_gap(self) -> float:
        scale = max(self.primal_norm_sq, self.dual_norm_sq, 1e-300)
        return abs(self.primal_norm_sq - self.dual_norm_sq) / scale


# ---------------------------------------------------------------------------
# spacing parameter and zero selection
# ---------------------------------------------------------------------------


def eta(q: float, T: float, c: float) -> float:
    """Strip height ``(c/6) / log(qT)`` for the well-spaced zero selection.

    Requires ``qT > 1`` (so the logarithm is positive) and ``c > 0``.
    """
    if c <= 0.0:
        raise DomainError(f"c must be positive, got {c}")
    qt = q * T
    if qt <= 1.0:
        raise DomainError(f"eta needs qT > 1, got qT = {qt}")
    return (c / 6.0) / math.log(qt)


def well_spaced_zeros(
    zeros: Sequence[Zero], rect: Rectangle, eta: float
) -> WellSpacedSelection:
    """Select one zero per height-``eta`` strip, then keep the larger parity class.

    The strip of a zero ``beta + i*gamma`` is ``j = floor(gamma/eta)``; the
    representative of each occupied strip is its lowest-``gamma`` zero (ties
    broken by lowest ``beta``), and of the two parity classes of ``j`` the
    larger is returned (ties go to even).  Same-parity strips are two apart,
    so the chosen imaginary parts are pairwise ``>= eta`` separated by
    construction.  All zeros must lie inside ``rect`` (up to the enclosure
    slack of the contour counter).
    """
    if not eta > 0.0:
        raise DomainError(f"eta must be positive, got {eta}")
    for z in zeros:
        if not (rect.alpha - _RECT_SLACK <= z.beta <= 1.0 + _RECT_SLACK):
            raise DomainError(f"zero {z} lies outside [{rect.alpha}, 1] horizontally")
        if abs(z.gamma) > rect.T + _RECT_SLACK:
            raise DomainError(f"zero {z} lies outside |Im| <= {rect.T}")

    by_strip: dict[int, Zero] = {}
    for z in zeros:
        j = math.floor(z.gamma / eta)
        cur = by_strip.get(j)
        if cur is None or (z.gamma, z.beta) < (cur.gamma, cur.beta):
            by_strip[j] = z

    if not by_strip:
        return WellSpacedSelection(
            eta=eta, rectangles=(0, -1), chosen=(), parity="even",
            representative_count=0,
        )

    evens = sorted(j for j in by_strip if j % 2 == 0)
    odds = sorted(j for j in by_strip if j % 2 != 0)
    parity = "even" if len(evens) >= len(odds) else "odd"
    kept = evens if parity == "even" else odds
    chosen = tuple(by_strip[j] for j in kept)
    return WellSpacedSelection(
        eta=eta,
        rectangles=(min(by_strip), max(by_strip)),
        chosen=chosen,
        parity=parity,
        representative_count=len(by_strip),
    )


def rectangle_count_envelope(
    alpha: float, q: int, j: int, eta: float, kappa1: float = 1.0, kappa2: float = 1.0
) -> int:
    """Calibrated ceiling for the number of zeros in strip ``R_j``.

    Evaluates ``ceil(kappa1 * (1 - alpha) * log(q * (|t_j| + 3)) + kappa2)``
    at the strip midpoint ``t_j = (2j+1) * eta / 2``.  The constants
    ``kappa1, kappa2`` are calibration inputs, regression-pinned by tests,
    not derived values.
    """
    if q < 1:
        raise DomainError(f"q must be >= 1, got {q}")
    if not eta > 0.0:
        raise DomainError(f"eta must be positive, got {eta}")
    if not 0.0 <= alpha < 1.0:
        raise DomainError(f"alpha must lie in [0, 1), got {alpha}")
    t_j = (2 * j + 1) * eta / 2.0
    return math.ceil(kappa1 * (1.0 - alpha) * math.log(q * (abs(t_j) + 3.0)) + kappa2)


# ---------------------------------------------------------------------------
# zero-sum side and density side
# ---------------------------------------------------------------------------


def _sorted_support(coeffs: Mapping[int, complex]) -> tuple[np.ndarray, np.ndarray]:
    """Sorted integer support and matching coefficient array (zeros dropped)."""
    items = sorted((n, a) for n, a in coeffs.items() if a != 0)
    for n, _ in items:
        if n < 1:
            raise DomainError(f"coefficient index must be >= 1, got {n}")
    ns = np.array([n for n, _ in items], dtype=np.int64)
    an = np.array([complex(a) for _, a in items], dtype=np.complex128)
    return ns, an


def _check_support_floor(
    coeffs: Mapping[int, complex], support_floor: float | None, mode: str
) -> None:
    """Enforce the support hypothesis ``a_n = 0 for n < M`` in paper mode."""
    if mode not in ("paper", "desk"):
        raise DomainError(f"mode must be 'paper' or 'desk', got {mode!r}")
    if mode == "desk":
        return
    if support_floor is None:
        raise ContractError(
            "paper mode requires an explicit support floor M; "
            "pass support_floor=... or use mode='desk'"
        )
    bad = sorted(n for n, a in coeffs.items() if a != 0 and n < support_floor)
    if bad:
        raise ContractError(
            f"coefficient support violates n >= M = {support_floor}: "
            f"first offending index {bad[0]} (use mode='desk' to relax)"
        )


def _twisted_values(
    ctx: PseudoCharacterContext, r: int, ns: np.ndarray
) -> np.ndarray:
    """``psi_{f,r}(n) * chi(n)`` over the support array, in support order."""
    chi = ctx.character
    return np.array(
        [psi_fr(ctx, r, int(n)) * chi(int(n)) for n in ns], dtype=np.complex128
    )


def zero_sum_breakdown(
    family: CharacterFamily,
    selections: Mapping[str, WellSpacedSelection],
    coeffs: Mapping[int, complex],
    r_cap: int,
    *,
    delta: float = 0.1,
    z: float = 4.0,
    support_floor: float | None = None,
    mode: str = "paper",
) -> list[tuple[str, int, float]]:
    """Per-``(f, r)`` contributions to the zero-sum side, as (label, r, value).

    Rows cover every primitive family member and every admissible ``r <=
    r_cap`` in deterministic order; characters without a selection (or with
    an empty one) contribute 0.  The zero-sum side itself is the plain sum of
    the third column, which :func:`zero_sum_lhs` performs.
    """
    _check_support_floor(coeffs, support_floor, mode)
    ns, an = _sorted_support(coeffs)
    nf = ns.astype(np.float64)
    rows: list[tuple[str, int, float]] = []
    for chi in family.primitive():
        sel = selections.get(chi.label)
        zeros = sel.chosen if sel is not None else ()
        weight_f = 1.0 / rankin_selberg_residue(chi).residue_float
        ctx = PseudoCharacterContext(
            character=chi, delta=delta, z=z, r_cap=r_cap
        )
        for r in admissible_r_set(ctx):
            if not zeros or ns.size == 0:
                rows.append((chi.label, r, 0.0))
                continue
            twisted = an * _twisted_values(ctx, r, ns)
            squares = np.empty(len(zeros))
            for i, rho in enumerate(zeros):
                inner = np.sum(twisted * nf ** complex(-rho.beta, -rho.gamma))
                squares[i] = abs(inner) ** 2
            contrib = weight_f / abs(psi_f(ctx, r)) * float(np.sum(squares))
            rows.append((chi.label, r, contrib))
    return rows


def zero_sum_lhs(
    family: CharacterFamily,
    selections: Mapping[str, WellSpacedSelection],
    coeffs: Mapping[int, complex],
    r_cap: int,
    *,
    delta: float = 0.1,
    z: float = 4.0,
    support_floor: float | None = None,
    mode: str = "paper",
) -> float:
    """Triple-weighted square sum of the twisted polynomial over chosen zeros.

    Evaluates ``sum_f (1/s(f)) sum_{rho} sum_{r <= r_cap} (1/|psi_f(r)|)
    |sum_n a_n psi_{f,r}(n) chi_f(n) n^{-rho}|^2`` with ``f`` running over
    the primitive members of ``family``, ``rho`` over ``selections[f.label]``
    and ``r`` over the admissible pseudo-moduli.  In the default
    ``mode="paper"`` the support hypothesis ``a_n = 0 for n < M`` is enforced
    against the caller-supplied ``support_floor`` (raising
    :class:`~charsieve.errors.ContractError` when absent or violated);
    ``mode="desk"`` relaxes it for small-parameter experiments.
    """
    rows = zero_sum_breakdown(
        family, selections, coeffs, r_cap,
        delta=delta, z=z, support_floor=support_floor, mode=mode,
    )
    return float(np.sum(np.array([c for _, _, c in rows])))


def density_rhs(
    coeffs: Mapping[int, complex], q: float, T: float, N: float, R: float, alpha: float
) -> float:
    """Density-weighted majorant for the zero-sum side.

    Evaluates ``log(qTN) * (1 + log(log N / log qTR)) * sum_{n <= N} |a_n|^2
    n^{1-2*alpha}``, requiring ``N > max(qTR, e)`` and ``qTR > 1`` so both
    logarithms are positive.  The implied absolute constant is taken as 1;
    consumers report ratios against this value rather than asserting an
    inequality.
    """
    qtr = q * T * R
    if qtr <= 1.0:
        raise DomainError(f"density majorant needs qTR > 1, got {qtr}")
    if N <= max(qtr, math.e):
        raise DomainError(f"density majorant needs N > max(qTR, e), got N = {N}")
    ns, an = _sorted_support(coeffs)
    keep = ns <= N
    ns, an = ns[keep], an[keep]
    if ns.size == 0:
        return 0.0
    weighted = np.abs(an) ** 2 * ns.astype(np.float64) ** (1.0 - 2.0 * alpha)
    prefactor = math.log(q * T * N) * (1.0 + math.log(math.log(N) / math.log(qtr)))
    return prefactor * float(np.sum(weighted))


# ---------------------------------------------------------------------------
# dyadic bilinear harness and duality
# ---------------------------------------------------------------------------


def bilinear_breakdown(
    family: CharacterFamily,
    coeffs: Mapping[int, complex],
    r_cap: int,
    *,
    delta: float = 0.1,
    z: float = 4.0,
) -> list[tuple[str, int, float]]:
    """Per-``(f, r)`` contributions to the plain bilinear form.

    Same triple weighting as the zero-sum side but with no zero evaluation:
    each row is ``(label, r, (1/s(f)) (1/|psi_f(r)|) |sum_n a_n psi_{f,r}(n)
    chi(n)|^2)``, and the rows sum to the left side of the dyadic harness.
    """
    ns, an = _sorted_support(coeffs)
    rows: list[tuple[str, int, float]] = []
    for chi in family.primitive():
        weight_f = 1.0 / rankin_selberg_residue(chi).residue_float
        ctx = PseudoCharacterContext(character=chi, delta=delta, z=z, r_cap=r_cap)
        for r in admissible_r_set(ctx):
            if ns.size == 0:
                rows.append((chi.label, r, 0.0))
                continue
            inner = np.sum(an * _twisted_values(ctx, r, ns))
            rows.append(
                (chi.label, r, float(weight_f / abs(psi_f(ctx, r)) * abs(inner) ** 2))
            )
    return rows


def _bilinear_lhs(
    family: CharacterFamily,
    coeffs: Mapping[int, complex],
    r_cap: int,
    delta: float,
    z: float,
) -> float:
    rows = bilinear_breakdown(family, coeffs, r_cap, delta=delta, z=z)
    return float(np.sum(np.array([value for _, _, value in rows])))


def m_prime_threshold(
    q: float, d: float, n: float, A: float, tau: float, R: float,
    delta: float, eps0: float,
) -> float:
    """Dyadic support threshold ``(q^{d+nA/2} (tau-1)^{-1} R^{1+3d} log R)^{1/(1/2-e0)}``."""
    if not 1.0 < tau <= 2.0:
        raise DomainError(f"tau must lie in (1, 2], got {tau}")
    if not 0.0 < eps0 < 0.5:
        raise DomainError(f"eps0 must lie in (0, 1/2), got {eps0}")
    if R <= 1.0:
        raise DomainError(f"threshold needs R > 1, got {R}")
    base = q ** (d + n * A / 2.0) / (tau - 1.0) * R ** (1.0 + 3.0 * delta) * math.log(R)
    try:
        return base ** (1.0 / (0.5 - eps0))
    except OverflowError:
        return math.inf


def dyadic_harness(
    family: CharacterFamily,
    coeffs: Mapping[int, complex],
    tau: float,
    r_cap: int,
    n_prime: float,
    *,
    delta: float = 0.1,
    z: float = 4.0,
    eps0: float = 0.25,
    mode: str = "desk",
) -> SieveReport:
    """Dyadic bilinear form against its mean-square majorant.

    The coefficients must be supported on the window ``[n_prime, tau *
    n_prime]`` with ``tau in (1, 2]``.  The left side is the pure
    character/pseudo-modulus square sum (no zero evaluation); the right side
    is ``(tau - 1) * n_prime * sum |a_n|^2``.  The report carries the
    threshold ``M'`` for the family's exponents and flags whether the window
    actually sits above it (``support_exceeds_m_prime``); at desk scale it
    essentially never does, which is why the ratio is reported rather than
    asserted.
    """
    if not 1.0 < tau <= 2.0:
        raise DomainError(f"tau must lie in (1, 2], got {tau}")
    if n_prime <= 0.0:
        raise DomainError(f"n_prime must be positive, got {n_prime}")
    if mode not in ("paper", "desk"):
        raise DomainError(f"mode must be 'paper' or 'desk', got {mode!r}")
    for n, a in coeffs.items():
        if a != 0 and not n_prime <= n <= tau * n_prime:
            raise DomainError(
                f"coefficient at n = {n} lies outside the dyadic window "
                f"[{n_prime}, {tau * n_prime}]"
            )

    lhs = _bilinear_lhs(family, coeffs, r_cap, delta, z)
    ns, an = _sorted_support(coeffs)
    rhs = (tau - 1.0) * n_prime * float(np.sum(np.abs(an) ** 2))
    ratio = lhs / rhs if rhs > 0.0 else 0.0
    m_prime = m_prime_threshold(
        family.q, family.d, 1.0, family.A, tau, float(r_cap), delta, eps0
    )
    report = SieveReport(
        lhs=lhs,
        rhs=rhs,
        ratio=ratio,
        params={
            "q": family.q,
            "R": r_cap,
            "n_prime": n_prime,
            "tau": tau,
            "m_prime": m_prime,
            "delta": delta,
            "eps0": eps0,
            "z": z,
            "mode": mode,
            "support_exceeds_m_prime": n_prime > m_prime,
        },
    )
    logger.debug(
        "dyadic harness q=%d R=%d N'=%g tau=%g: lhs=%.6g rhs=%.6g ratio=%.6g",
        family.q, r_cap, n_prime, tau, lhs, rhs, ratio,
    )
    return report


def coefficient_matrix(
    family: CharacterFamily,
    r_cap: int,
    n_lo: int,
    n_hi: int,
    *,
    delta: float = 0.1,
    z: float = 4.0,
) -> tuple[np.ndarray, list[tuple[str, int]], list[int]]:
    """Explicit matrix of the bilinear form, with its row and column keys.

    Rows run over ``(primitive f, admissible r <= r_cap)`` in family-then-``r``
    order, columns over every integer ``n in [n_lo, n_hi]`` (columns where
    ``psi_{f,r}(n) chi(n)`` vanishes identically are kept, so the matrix shape
    is predictable).  The entry is ``psi_{f,r}(n) chi(n) / sqrt(s(f)
    |psi_f(r)|)``, making ``||C a||^2`` exactly the bilinear left side.
    """
    if n_lo < 1 or n_hi < n_lo:
        raise DomainError(f"need 1 <= n_lo <= n_hi, got [{n_lo}, {n_hi}]")
    cols = list(range(n_lo, n_hi + 1))
    row_keys: list[tuple[str, int]] = []
    rows: list[np.ndarray] = []
    ns = np.array(cols, dtype=np.int64)
    for chi in family.primitive():
        s_f = rankin_selberg_residue(chi).residue_float
        ctx = PseudoCharacterContext(character=chi, delta=delta, z=z, r_cap=r_cap)
        for r in admissible_r_set(ctx):
            scale = 1.0 / math.sqrt(s_f * abs(psi_f(ctx, r)))
            rows.append(scale * _twisted_values(ctx, r, ns))
            row_keys.append((chi.label, r))
    matrix = np.array(rows, dtype=np.complex128)
    return matrix, row_keys, cols


def _power_iteration(mat: np.ndarray, start: np.ndarray) -> float:
    """Top eigenvalue of a Hermitian PSD matrix, refined from ``start``."""
    v = start.astype(np.complex128)
    norm = float(np.linalg.norm(v))
    if norm == 0.0 or mat.shape[0] == 0:
        return 0.0
    v = v / norm
    lam = float(np.real(np.vdot(v, mat @ v)))
    for _ in range(_POWER_MAX_ITER):
        w = mat @ v
        wn = float(np.linalg.norm(w))
        if wn == 0.0:
            return 0.0
        v = w / wn
        lam_new = float(np.real(np.vdot(v, mat @ v)))
        if abs(lam_new - lam) <= _POWER_TOL * max(abs(lam_new), 1.0):
            return lam_new
        lam = lam_new
    return lam


def random_complex_unit(rng: SplitMix64, dim: int) -> np.ndarray:
    """A unit vector in C^dim drawn from the project PRNG stream."""
    v = rng.unit_vector(dim) + 1j * rng.unit_vector(dim)
    return v / np.linalg.norm(v)


def duality_check(
    family: CharacterFamily,
    r_cap: int,
    n_lo: int,
    n_hi: int,
    *,
    delta: float = 0.1,
    z: float = 4.0,
    trials: int = 20,
    seed: int = 1,
) -> DualityReport:
    """Operator-norm symmetry of the bilinear form, via the explicit matrix.

    Builds the coefficient matrix ``C`` of :func:`coefficient_matrix`, then
    runs power iteration on ``C* C`` (primal: coefficient vectors) and
    ``C C*`` (dual: per-``(f, r)`` vectors) from ``trials`` random unit
    starts each, drawn from a seeded SplitMix64 stream.  The refined top
    eigenvalues must agree — that is the duality — while the raw Rayleigh
    quotients of the starts are reported as sampled lower bounds.  Each
    primal start is also fed through the bilinear harness to confirm the
    sieve-side evaluation matches ``||C a||^2`` from the matrix.
    """
    if trials < 1:
        raise DomainError(f"trials must be >= 1, got {trials}")
    matrix, row_keys, cols = coefficient_matrix(
        family, r_cap, n_lo, n_hi, delta=delta, z=z
    )
    gram_primal = matrix.conj().T @ matrix
    gram_dual = matrix @ matrix.conj().T
    rng = SplitMix64(seed)

    primal_best = 0.0
    dual_best = 0.0
    sampled_primal = 0.0
    sampled_dual = 0.0
    harness_gap = 0.0
    for _ in range(trials):
        a = random_complex_unit(rng, len(cols))
        b = random_complex_unit(rng, len(row_keys))
        rayleigh_a = float(np.real(np.vdot(a, gram_primal @ a)))
        rayleigh_b = float(np.real(np.vdot(b, gram_dual @ b)))
        sampled_primal = max(sampled_primal, rayleigh_a)
        sampled_dual = max(sampled_dual, rayleigh_b)
        primal_best = max(primal_best, _power_iteration(gram_primal, a))
        dual_best = max(dual_best, _power_iteration(gram_dual, b))

        coeffs = {n: a[i] for i, n in enumerate(cols)}
        harness = _bilinear_lhs(family, coeffs, r_cap, delta, z)
        matrix_value = float(np.linalg.norm(matrix @ a) ** 2)
        if matrix_value > 0.0:
            harness_gap = max(
                harness_gap, abs(harness - matrix_value) / matrix_value
            )

    logger.debug(
        "duality q=%d R=%d n in [%d, %d]: %dx%d matrix, primal=%.12g dual=%.12g",
        family.q, r_cap, n_lo, n_hi, len(row_keys), len(cols),
        primal_best, dual_best,
    )
    return DualityReport(
        rows=len(row_keys),
        cols=len(cols),
        trials=trials,
        seed=seed,
        primal_norm_sq=primal_best,
        dual_norm_sq=dual_best,
        sampled_primal_max=sampled_primal,
        sampled_dual_max=sampled_dual,
        harness_max_relative_gap=harness_gap,
    )


# ---------------------------------------------------------------------------
# parameter calculator
# ---------------------------------------------------------------------------


def _pow_or_inf(base: float, exponent: float) -> float:
    try:
        return base ** exponent
    except OverflowError:
        return math.inf


def constants(
    n: float,
    n_k: float,
    A: float,
    d: float,
    *,
    q: float | None = None,
    T: float | None = None,
    R: float | None = None,
    c: float | None = None,
    delta: float | None = None,
    alpha: float | None = None,
    tau: float | None = None,
    eps0: float = 0.25,
    eps2: float | None = None,
    eps3: float | None = None,
    eps4: float | None = None,
) -> ConstantsRecord:
    """Exponent constants and parameter chain for a degree-``n`` family.

    Always computes the exponent pair ``c1 = 2d + 4nA + A/2 + 1`` and
    ``c2 = n*n_k/2 + 3`` and the sieve cutoff ``z = 4 n^4 n_k^4``.  The
    remaining fields are filled exactly when their inputs determine them:

    * ``eta = (c/6)/log(qT)``            needs ``q, T, c``;
    * ``R = q^{nA} (qT)^{eps2}``         when not given, needs ``q, T, eps2``;
    * ``M = 2 (q^{d+nA/2} T R^{1+3*delta} log R)^{1/(1/2-eps0)}``
                                         needs ``q, T, R > 1, delta``;
    * ``M' = (q^{d+nA/2} (tau-1)^{-1} R^{1+3*delta} log R)^{1/(1/2-eps0)}``
                                         needs ``q, R > 1, delta, tau``;
    * ``w = M`` and ``y = w (qT)^{eps3}``   needs additionally ``eps3``;
    * ``x = [y q^{A/2} T^{n*n_k/2} R^{1+4*delta}]^{1/(2*alpha-1)+eps4}``
                                         needs additionally ``alpha, eps4``.

    Undetermined fields are ``None``; overflowing powers become ``inf``.
    Requesting ``x`` with ``alpha`` outside ``[3/4, 1)`` is a domain error.
    """
    if min(n, n_k, A, d) <= 0:
        raise DomainError("exponent inputs n, n_k, A, d must be positive")
    if not 0.0 < eps0 < 0.5:
        raise DomainError(f"eps0 must lie in (0, 1/2), got {eps0}")

    c1 = 2.0 * d + 4.0 * n * A + A / 2.0 + 1.0
    c2 = n * n_k / 2.0 + 3.0
    z = 4.0 * n**4 * n_k**4

    eta_val: float | None = None
    if q is not None and T is not None and c is not None:
        eta_val = eta(q, T, c)

    R_val: float | None = R
    if R_val is None and q is not None and T is not None and eps2 is not None:
        R_val = _pow_or_inf(q, n * A) * _pow_or_inf(q * T, eps2)

    exponent = 1.0 / (0.5 - eps0)
    M_val: float | None = None
    if q is not None and T is not None and R_val is not None and delta is not None:
        if R_val > 1.0 and math.isfinite(R_val):
            base = (
                _pow_or_inf(q, d + n * A / 2.0)
                * T
                * _pow_or_inf(R_val, 1.0 + 3.0 * delta)
                * math.log(R_val)
            )
            M_val = 2.0 * _pow_or_inf(base, exponent)
        elif math.isinf(R_val):
            M_val = math.inf

    M_prime_val: float | None = None
    if (
        q is not None
        and R_val is not None
        and delta is not None
        and tau is not None
        and 1.0 < tau <= 2.0
        and R_val > 1.0
        and math.isfinite(R_val)
    ):
        M_prime_val = m_prime_threshold(q, d, n, A, tau, R_val, delta, eps0)

    w_val = M_val
    y_val: float | None = None
    if w_val is not None and q is not None and T is not None and eps3 is not None:
        y_val = w_val * _pow_or_inf(q * T, eps3)

    x_val: float | None = None
    if (
        y_val is not None
        and q is not None
        and T is not None
        and R_val is not None
        and delta is not None
        and alpha is not None
        and eps4 is not None
    ):
        if not 0.75 <= alpha < 1.0:
            raise DomainError(f"x requires 3/4 <= alpha < 1, got {alpha}")
        base = (
            y_val
            * _pow_or_inf(q, A / 2.0)
            * _pow_or_inf(T, n * n_k / 2.0)
            * _pow_or_inf(R_val, 1.0 + 4.0 * delta)
        )
        x_val = _pow_or_inf(base, 1.0 / (2.0 * alpha - 1.0) + eps4)

    return ConstantsRecord(
        n=n, n_k=n_k, A=A, d=d, q=q, T=T, c=c, delta=delta, alpha=alpha,
        tau=tau, eps0=eps0, eps2=eps2, eps3=eps3, eps4=eps4,
        c1=c1, c2=c2, z=z, eta=eta_val, R=R_val, M=M_val,
        M_prime=M_prime_val, w=w_val, y=y_val, x=x_val,
    )
