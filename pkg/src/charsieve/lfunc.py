"""Dirichlet L-functions: certified evaluation, zero counting, zero location.

Evaluation backbone: L(s,χ) = q^{-s} Σ_{a=1..q} χ(a) ζ(s, a/q), with the
Hurwitz zeta computed by Euler-Maclaurin of order 16 and the classical
certified remainder |R| ≤ |first omitted term|·|(s+2m+1)/(σ+2m+1)| (valid for
σ > −(2m+1); see [Joh15] for the explicit Hurwitz form).  All tolerances are
absolute; a tolerance that cannot be certified raises ``PrecisionError``
rather than returning a best effort.

Zero counting uses the argument principle on the rectangle
M(α,T) = {α ≤ Re ≤ 1, |Im| ≤ T}, two-sided in the imaginary direction, so
conjugate zeros are counted.  Framework conventions:

* The vertical contour edges are pushed *outward* by ``EDGE_OFFSET`` (left
  edge at α − 5·10⁻⁴, right edge at 1 + 5·10⁻⁴) so that zeros lying exactly
  on Re = α — the generic situation at α = 1/2 — are enclosed, and counting
  realizes the closed rectangle.  No zeros live in the added right sliver
  (the Euler-product region is zero-free).
* If the winding fails to stabilize (a zero within ~10⁻⁴ of a horizontal
  edge), T is nudged upward by multiples of 10⁻³, at most ``MAX_NUDGES``
  times; then ``ContourError``.
* For principal χ the integrand is (s−1)·L(s,χ), removing the pole at s = 1
  that the offset right edge would otherwise enclose.

A discretized winding number is trusted only when every sampled phase step
is below ``PHASE_STEP_MAX`` (< π with margin, so the wrapped sum telescopes
to the true winding) and the total lands within ``WINDING_INT_TOL`` of an
integer.

References
----------
[Joh15] Johansson, "Rigorous high-precision computation of the Hurwitz zeta
        function and its derivatives", Num. Alg. 69 (2015).
[Dav80] Davenport, "Multiplicative Number Theory", 2nd ed., ch. 9-16.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.special import loggamma

from .arith import euler_phi, factorize
from .characters import DirichletCharacter, product_character
from .errors import ContourError, DomainError, PoleError, PrecisionError

__all__ = [
    "Rectangle",
    "Zero",
    "RankinSelbergData",
    "hurwitz_zeta",
    "l_value",
    "l_ur_value",
    "l_sharp_value",
    "l_flat_value",
    "completed_l_value",
    "count_zeros_rectangle",
    "count_zeros_family",
    "locate_zeros",
    "rankin_selberg_residue",
    "convexity_ratio",
]

# Contour conventions (see module docstring).
EDGE_OFFSET = 5e-4
T_NUDGE = 1e-3
MAX_NUDGES = 10
PHASE_STEP_MAX = 0.8
WINDING_INT_TOL = 0.01
_MIN_PARAM_GAP = 1e-9
_MAX_REFINE_ROUNDS = 64

# B_2, B_4, ..., B_18 (B_18 only feeds the remainder bound).
_BERNOULLI = (
    Fraction(1, 6),
    Fraction(-1, 30),
    Fraction(1, 42),
    Fraction(-1, 30),
    Fraction(5, 66),
    Fraction(-691, 2730),
    Fraction(7, 6),
    Fraction(-3617, 510),
    Fraction(43867, 798),
)
_EM_TERMS = 8  # B_2..B_16 in the expansion


def _em_tail_bound(abs_s: float, sigma: float, a_min: float, n_terms: int) -> float:
    """Certified bound on the Euler-Maclaurin remainder after B_16."""
    r = _EM_TERMS + 1
    coeff = abs(float(_BERNOULLI[r - 1])) / math.factorial(2 * r)
    rising = 1.0
    for j in range(2 * r - 1):
        rising *= abs_s + j
    base = n_terms + a_min
    safety = (abs_s + 2 * r - 1) / (sigma + 2 * r - 1)
    return coeff * rising * base ** (-(sigma + 2 * r - 1)) * safety


def _hurwitz_block(s: np.ndarray, a: np.ndarray, tol: float) -> np.ndarray:
    """ζ(s_i, a_j) − 1/(s_i − 1) as an (len(s), len(a)) matrix, within ``tol``.

    The pole is subtracted so the block is entire in s and well conditioned
    at s = 1 (needed on counting contours and for L(1,χ), where the poles of
    the individual ζ(s, a/q) cancel).  Internal: inputs are assumed
    validated (a ∈ (0,1], σ > −2).  A single truncation point N is certified
    against the worst (σ, |s|, a) in the block.
    """
    sigma_min = float(np.min(s.real))
    abs_s_max = float(np.max(np.abs(s)))
    a_min = float(np.min(a))
    n = max(16, int(abs_s_max / 4) + 1)
    doublings = 0
    while _em_tail_bound(abs_s_max, sigma_min, a_min, n) > tol / 4:
        n *= 2
        doublings += 1
        if doublings > 24:
            raise PrecisionError(
                f"Euler-Maclaurin tolerance {tol} unreachable at |s|≤{abs_s_max}"
            )
    out = np.zeros((len(s), len(a)), dtype=np.complex128)
    for k in range(n):
        out += np.exp(np.multiply.outer(-s, np.log(k + a)))
    u = n + a
    logu = np.log(u)
    # (u^{1-s} − 1)/(s−1) = −log(u)·g(x), g(x) = (e^x − 1)/x, x = (1−s)log u;
    # the series branch keeps g well conditioned through x = 0.
    x = np.multiply.outer(1.0 - s, logu)
    small = np.abs(x) < 1e-4
    xs = np.where(small, x, 0.0)
    g = np.where(
        small,
        1.0 + xs / 2 + xs * xs / 6 + xs * xs * xs / 24,
        (np.exp(np.where(small, 0.0, x)) - 1.0) / np.where(small, 1.0, x),
    )
    out += -logu[None, :] * g
    pw = np.exp(np.multiply.outer(-s, logu))
    out += 0.5 * pw
    # B_{2r}/(2r)! · s(s+1)···(s+2r−2) · u^{−s−2r+1}
    rising = np.ones_like(s)
    u2 = u * u
    pw = pw / u[None, :] * u2[None, :]  # will be divided by u² per step
    for r in range(1, _EM_TERMS + 1):
        rising = rising * (s + (2 * r - 2))
        if r > 1:
            rising = rising * (s + (2 * r - 3))
        pw = pw / u2[None, :]
        out += (float(_BERNOULLI[r - 1]) / math.factorial(2 * r)) * rising[
            :, None
        ] * pw
    return out


def hurwitz_zeta(s: complex, a: float, target_abs_error: float = 1e-12) -> complex:
    """ζ(s, a) with certified absolute error ≤ ``target_abs_error``.

    Domain: 0 < a ≤ 1, Re(s) > −2, |Im(s)| ≤ 10³, target ≥ 10⁻¹⁴, s ≠ 1.
    """
    s = complex(s)
    if not 0.0 < a <= 1.0:
        raise DomainError(f"hurwitz_zeta needs a in (0,1], got {a}")
    if s.real <= -2.0 or abs(s.imag) > 1e3:
        raise DomainError(f"hurwitz_zeta domain is Re(s)>-2, |Im(s)|<=1e3; got {s}")
    if target_abs_error < 1e-14:
        raise DomainError(f"target_abs_error must be >= 1e-14, got {target_abs_error}")
    if abs(s - 1.0) < 1e-14:
        raise PoleError("hurwitz_zeta has a pole at s=1")
    z = _hurwitz_block(np.array([s]), np.array([float(a)]), target_abs_error)
    val = complex(z[0, 0]) + 1.0 / (s - 1.0)
    # Truncation is certified inside the block; rounding noise scales with
    # |ζ| itself and can dominate near the pole.  Refuse rather than lie.
    if 4e-16 * (abs(val) + 1.0) > target_abs_error:
        raise PrecisionError(
            f"rounding noise exceeds target {target_abs_error} (|zeta| ~ {abs(val):.3g})"
        )
    return val


def _l_block(
    chars: list[DirichletCharacter], s: np.ndarray, tol: float
) -> np.ndarray:
    """L(s_i, χ_c) as an (len(s), len(chars)) matrix; shared Hurwitz core.

    Works through the pole-subtracted Hurwitz block: Σ_a χ(a) kills the
    a-independent pole exactly for non-principal columns, so those are well
    defined even at s = 1; principal columns get φ(q)/(s−1) restored (their
    callers exclude s = 1).
    """
    q = chars[0].modulus
    idx = np.arange(1, q + 1)
    coeff = np.stack([chi.value_table()[idx % q] for chi in chars], axis=1)
    units = np.flatnonzero(np.any(coeff != 0, axis=1))
    coeff = coeff[units]
    a_vals = (idx[units]) / q
    sigma_min = float(np.min(s.real))
    tol_h = tol * min(q**sigma_min, 1.0) / (2 * max(len(units), 1))
    z = _hurwitz_block(s, a_vals, max(tol_h, 1e-14))
    vals = z @ coeff
    phi_q = euler_phi(q)
    for c, chi in enumerate(chars):
        if chi.is_principal:
            vals[:, c] += phi_q / (s - 1.0)
    return np.exp(-s * math.log(q))[:, None] * vals


def l_value(chi: DirichletCharacter, s: complex, tol: float = 1e-11) -> complex:
    """L(s, χ) by Hurwitz decomposition; absolute error ≤ ``tol``.

    For principal χ (any modulus, including ζ itself) s = 1 is a pole.
    """
    s = complex(s)
    if chi.is_principal and abs(s - 1.0) < 1e-12:
        raise PoleError(f"L(s, principal character mod {chi.modulus}) has a pole at s=1")
    if abs(s - 1.0) < 1e-12 and chi.modulus == 1:
        raise PoleError("zeta has a pole at s=1")
    vals = _l_block([chi], np.array([s]), tol)
    return complex(vals[0, 0])


def l_ur_value(chi: DirichletCharacter, s: complex, tol: float = 1e-11) -> complex:
    """The Dirichlet series Σ_{(n,q)=1} χ(n) n^{-s} (= L(s,χ) as stored)."""
    return l_value(chi, s, tol)


def l_sharp_value(
    chi: DirichletCharacter, s: complex, z: float, tol: float = 1e-11
) -> complex:
    """The complementary Euler factor ∏_{p<z,p∤q}(1−χ(p)p^{−s})^{−1} ∏_{p≥z,p∤q}(1−χ²(p)p^{−2s})^{−1}.

    Evaluated exactly through L(2s, χ²), never by truncating the p ≥ z
    product, so the certified tolerance holds down to Re(s) > 0.55.
    """
    s = complex(s)
    if s.real <= 0.55:
        raise DomainError(f"l_sharp_value needs Re(s) > 0.55, got {s}")
    if z < 2:
        raise DomainError(f"l_sharp_value needs z >= 2, got {z}")
    chi2 = chi.power(2)
    out = l_value(chi2, 2 * s, tol)
    for p in range(2, math.ceil(z)):
        if p >= z or not _is_small_prime(p) or chi.modulus % p == 0:
            continue
        cp = chi(p)
        out *= (1 - cp * cp * p ** (-2 * s)) / (1 - cp * p**-s)
    return out


def l_flat_value(
    chi: DirichletCharacter, s: complex, z: float, tol: float = 1e-11
) -> complex:
    """L♭ = Σ♭_{(n,P)=1} χ(n) n^{−s} (squarefree support, p ≥ z only).

    Computed as L(s,χ)/L♯(s) — the analytic continuation of the squarefree
    series — valid for Re(s) > 0.55 where L♯ is nonvanishing.
    """
    s = complex(s)
    if s.real <= 0.55:
        raise DomainError(f"l_flat_value needs Re(s) > 0.55, got {s}")
    return l_value(chi, s, tol) / l_sharp_value(chi, s, z, tol)


def _is_small_prime(p: int) -> bool:
    if p < 2:
        return False
    for d in range(2, int(math.isqrt(p)) + 1):
        if p % d == 0:
            return False
    return True


def completed_l_value(chi: DirichletCharacter, s: complex, tol: float = 1e-11) -> complex:
    """Λ(s,χ) = (q/π)^{(s+κ)/2} Γ((s+κ)/2) L(s,χ) for primitive χ (κ = parity).

    Satisfies |Λ(s)| = |Λ(1−s̄)| [Dav80, §9]; used as an evaluation sanity
    check, not in the counting machinery.
    """
    if not chi.is_primitive:
        raise DomainError("completed L requires a primitive character")
    kappa = chi.parity
    w = (s + kappa) / 2
    pref = w * math.log(chi.modulus / math.pi) + loggamma(w)
    return complex(np.exp(pref)) * l_value(chi, s, tol)


@dataclass(frozen=True)
class Rectangle:
    """The closed region M(α,T) = {α ≤ Re ≤ 1, |Im| ≤ T}."""

    alpha: float
    T: float

    def __post_init__(self) -> None:
        if not 0.5 <= self.alpha < 1.0:
            raise DomainError(f"alpha must be in [1/2, 1), got {self.alpha}")
        if self.T < 0:
            raise DomainError(f"T must be >= 0, got {self.T}")


@dataclass(frozen=True)
class Zero:
    """A located zero β+iγ with a validated rectangular enclosure radius."""

    beta: float
    gamma: float
    character_id: str
    refinement_radius: float


@dataclass(frozen=True)
class RankinSelbergData:
    """Degree-1 Rankin-Selberg data for a primitive χ: residue φ(q)/q at s=1.

    The unramified pair L-function of (χ, χ̄) is ζ(s)·∏_{p|q}(1−p^{−s}); its
    residue at s = 1 is the family weight used throughout the sieve sums.
    """

    modulus: int
    residue: Fraction

    @property
    def residue_float(self) -> float:
        return float(self.residue)

    def unramified_pair_value(self, s: complex, tol: float = 1e-11) -> complex:
        s = complex(s)
        val = complex(hurwitz_zeta(s, 1.0, tol))
        for p, _ in factorize(self.modulus).factors:
            val *= 1 - p**-s
        return val


def rankin_selberg_residue(chi: DirichletCharacter) -> RankinSelbergData:
    """s(f) = Res_{s=1} L^{ur}(χ×χ̄, s) = φ(q)/q, exact."""
    if not chi.is_primitive:
        raise DomainError("rankin_selberg_residue requires a primitive character")
    q = chi.modulus
    return RankinSelbergData(q, Fraction(euler_phi(q), q))


def convexity_ratio(
    chi: DirichletCharacter,
    s: complex,
    epsilon: float,
    *,
    partner: DirichletCharacter | None = None,
    n: int = 1,
    n_k: int = 1,
    tol: float = 1e-11,
) -> float:
    """|L(s)| divided by the convexity envelope (Cond·(|t|+2)^{nn_k})^{(1−σ)/2+ε}.

    With ``partner`` the pair L-function is used and the envelope conductor
    is bounded by (Cond(χ)·Cond(ψ))^n, with (|t|+2) exponent n²n_k².
    """
    s = complex(s)
    if not 0.0 <= s.real <= 1.0:
        raise DomainError(f"convexity ratio is defined for 0 <= Re(s) <= 1, got {s}")
    t = abs(s.imag)
    sigma = s.real
    if partner is None:
        value = abs(l_value(chi, s, tol))
        env = (chi.conductor * (t + 2) ** (n * n_k)) ** ((1 - sigma) / 2 + epsilon)
    else:
        pair = product_character(chi, partner)
        value = abs(l_value(pair, s, tol))
        cond_bound = (chi.conductor * partner.conductor) ** n
        degree_exp = (n * n_k) ** 2
        env = (cond_bound * (t + 2) ** degree_exp) ** ((1 - sigma) / 2 + epsilon)
    return value / env


# ---------------------------------------------------------------------------
# Argument-principle machinery


def _boundary_map(x0: float, x1: float, y0: float, y1: float):
    """Map parameters t ∈ [0,4) to the rectangle boundary, counterclockwise."""

    def to_points(ts: np.ndarray) -> np.ndarray:
        e = np.floor(ts).astype(int) % 4
        f = ts - np.floor(ts)
        pts = np.empty(len(ts), dtype=np.complex128)
        m = e == 0
        pts[m] = (x0 + (x1 - x0) * f[m]) + 1j * y0
        m = e == 1
        pts[m] = x1 + 1j * (y0 + (y1 - y0) * f[m])
        m = e == 2
        pts[m] = (x1 - (x1 - x0) * f[m]) + 1j * y1
        m = e == 3
        pts[m] = x0 + 1j * (y1 - (y1 - y0) * f[m])
        return pts

    return to_points


def _initial_params(x0: float, x1: float, y0: float, y1: float) -> np.ndarray:
    w, h = x1 - x0, y1 - y0
    nh = max(8, int(math.ceil(w / 0.1)))
    nv = max(8, int(math.ceil(h / 0.2)))
    ts = []
    for e, cnt in enumerate((nh, nv, nh, nv)):
        ts.append(e + np.arange(cnt) / cnt)
    return np.concatenate(ts)


def _windings_on_grid(
    chars: list[DirichletCharacter],
    x0: float,
    x1: float,
    y0: float,
    y1: float,
    tol: float,
) -> list[int]:
    """Winding numbers of G(s) (pole-corrected L) for each character.

    All characters share the modulus and the (adaptively refined) grid; the
    Hurwitz matrix for new points is computed once per refinement round.
    """
    to_points = _boundary_map(x0, x1, y0, y1)
    ts = _initial_params(x0, x1, y0, y1)
    pts = to_points(ts)
    principal = np.array([chi.is_principal for chi in chars])

    def g_values(p: np.ndarray) -> np.ndarray:
        vals = _l_block(chars, p, tol)
        if principal.any():
            vals[:, principal] *= (p - 1.0)[:, None]
        return vals

    vals = g_values(pts)
    for _ in range(_MAX_REFINE_ROUNDS):
        if np.any(np.abs(vals) < 1e-280):
            raise ContourError("L vanishes on the contour")
        ph = np.angle(vals)
        d = np.diff(ph, axis=0, append=ph[:1])
        d = (d + np.pi) % (2 * np.pi) - np.pi
        bad = np.any(np.abs(d) > PHASE_STEP_MAX, axis=1)
        if not bad.any():
            w = d.sum(axis=0) / (2 * np.pi)
            out = []
            for wv in w:
                k = round(float(wv))
                if abs(wv - k) > WINDING_INT_TOL:
                    raise ContourError(f"winding {wv:.6f} not near an integer")
                out.append(int(k))
            return out
        t_next = np.concatenate([ts[1:], ts[:1] + 4.0])
        gaps = t_next - ts
        if np.min(gaps[bad]) < _MIN_PARAM_GAP:
            raise ContourError("phase step will not settle; zero near contour")
        new_ts = (ts[bad] + gaps[bad] / 2) % 4.0
        new_vals = g_values(to_points(new_ts))
        order = np.argsort(np.concatenate([ts, new_ts]), kind="stable")
        ts = np.concatenate([ts, new_ts])[order]
        vals = np.concatenate([vals, new_vals], axis=0)[order]
    raise ContourError("contour refinement did not converge")


def _count_with_nudge(
    chars: list[DirichletCharacter], rect: Rectangle, tol: float
) -> tuple[list[int], float]:
    """Counts for all characters on a shared contour; returns (counts, T_used)."""
    if rect.T == 0:
        return [0] * len(chars), 0.0
    x0 = rect.alpha - EDGE_OFFSET
    x1 = 1.0 + EDGE_OFFSET
    last: Exception | None = None
    for k in range(MAX_NUDGES + 1):
        t_used = rect.T + k * T_NUDGE
        try:
            counts = _windings_on_grid(chars, x0, x1, -t_used, t_used, tol)
            return counts, t_used
        except ContourError as exc:
            last = exc
    raise ContourError(
        f"no admissible contour for T={rect.T} after {MAX_NUDGES} nudges: {last}"
    )


def count_zeros_rectangle(
    chi: DirichletCharacter, rect: Rectangle, tol: float = 1e-10
) -> int:
    """N(χ; α, T): zeros of L(s,χ) in the closed rectangle, by winding number."""
    if chi.modulus > 500:
        raise DomainError("zero counting supports modulus <= 500")
    if rect.T > 60:
        raise DomainError("zero counting supports T <= 60")
    counts, _ = _count_with_nudge([chi], rect, tol)
    return counts[0]


def count_zeros_family(
    chars: list[DirichletCharacter], rect: Rectangle, tol: float = 1e-10
) -> dict[str, int]:
    """Zero counts for several characters mod the same q on one shared contour.

    Falls back to per-character contours when the shared one fails for the
    group as a whole.
    """
    if not chars:
        return {}
    if len({c.modulus for c in chars}) != 1:
        raise DomainError("count_zeros_family needs a single shared modulus")
    try:
        counts, _ = _count_with_nudge(list(chars), rect, tol)
        return {chi.label: c for chi, c in zip(chars, counts)}
    except ContourError:
        return {
            chi.label: count_zeros_rectangle(chi, rect, tol) for chi in chars
        }


_SPLIT_LADDER = (0.5, 0.55, 0.45, 0.6, 0.4, 0.65, 0.35, 0.52, 0.48)


def _winding_box(
    chi: DirichletCharacter, x0: float, x1: float, y0: float, y1: float, tol: float
) -> int:
    return _windings_on_grid([chi], x0, x1, y0, y1, tol)[0]


def _refine_box(
    chi: DirichletCharacter,
    box: tuple[float, float, float, float],
    count: int,
    enclosure: float,
    out: list[Zero],
) -> None:
    x0, x1, y0, y1 = box
    half_diag = 0.5 * math.hypot(x1 - x0, y1 - y0)
    if half_diag <= enclosure:
        cx, cy = (x0 + x1) / 2, (y0 + y1) / 2
        for _ in range(count):
            out.append(Zero(cx, cy, chi.label, half_diag))
        return
    # Evaluation noise must stay below |L| on the sub-box boundary, which
    # shrinks with the box for a box hugging a zero.
    tol = min(1e-10, max(1e-13, half_diag * 1e-4))
    vertical = (y1 - y0) >= (x1 - x0)
    for frac in _SPLIT_LADDER:
        if vertical:
            ym = y0 + frac * (y1 - y0)
            a_box, b_box = (x0, x1, y0, ym), (x0, x1, ym, y1)
        else:
            xm = x0 + frac * (x1 - x0)
            a_box, b_box = (x0, xm, y0, y1), (xm, x1, y0, y1)
        try:
            ca = _winding_box(chi, *a_box, tol)
            cb = _winding_box(chi, *b_box, tol)
        except ContourError:
            continue
        if ca + cb != count:
            continue
        if ca:
            _refine_box(chi, a_box, ca, enclosure, out)
        if cb:
            _refine_box(chi, b_box, cb, enclosure, out)
        return
    raise ContourError("zero refinement could not find an admissible split")


def locate_zeros(
    chi: DirichletCharacter,
    rect: Rectangle,
    enclosure: float = 1e-8,
    tol: float = 1e-10,
) -> list[Zero]:
    """All zeros in the rectangle, each enclosed within ``enclosure``.

    Subdivision bisects on winding numbers; children are re-split along the
    deterministic offset ladder when a zero sits on a proposed cut.  Output
    is sorted by (γ, β).
    """
    if chi.modulus > 500:
        raise DomainError("zero location supports modulus <= 500")
    if rect.T > 60:
        raise DomainError("zero location supports T <= 60")
    if rect.T == 0:
        return []
    counts, t_used = _count_with_nudge([chi], rect, tol)
    total = counts[0]
    if total == 0:
        return []
    box = (rect.alpha - EDGE_OFFSET, 1.0 + EDGE_OFFSET, -t_used, t_used)
    out: list[Zero] = []
    _refine_box(chi, box, total, enclosure, out)
    out.sort(key=lambda z: (z.gamma, z.beta))
    assert len(out) == total
    return out
