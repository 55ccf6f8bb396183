"""Prime-splitting statistics for cyclic fields, with effective error envelopes.

Counts primes by Frobenius class against the equidistribution prediction
(each of the ``n`` classes of a cyclic degree-``n`` field receives ``pi(x)/n``
unramified primes, by the Chebotarev density theorem [IK04, ch. 5]) and
evaluates the two effective error envelopes the zero-density pipeline
produces: a power-saving bound ``x^(1-kappa)`` valid below an
``x``-threshold growing with the discriminant, and a
``x/exp(c3*sqrt(log x / n))`` bound above it.  The exponent ``kappa`` comes
from an explicit constant chain; at desk scale it is tiny (``eps/744`` for
cubic fields), so the envelopes are reported side by side with the measured
errors rather than asserted — the implied constants are not effective.

Conventions
-----------
* Counts are exact: primes are sieved, each prime classified through the
  conductor-periodic class table of its field, and the per-class counts,
  the ramified count, and ``pi(x)`` always satisfy the partition identity
  ``sum_C pi_C + ramified = pi(x)``.
* ``normalized_error`` is ``|pi_C - pi/n| / (pi/n)`` (0 when ``pi = 0``).
* The per-class share ``|C|/|G|`` is ``1/n`` throughout: conjugacy classes
  of a cyclic group are singletons.

References
----------
[IK04] Iwaniec & Kowalski, "Analytic Number Theory", ch. 5 (primes in
       arithmetic progressions, effective Chebotarev).
[Dav80] Davenport, "Multiplicative Number Theory", 2nd ed., ch. 20-22.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .arith import prime_array
from .errors import DomainError
from .fields import RAMIFIED, CyclicField, residue_class_table

logger = logging.getLogger(__name__)

_X_CAP = 1.0e9


@dataclass(frozen=True)
class KappaRecord:
    """The constant chain from a target epsilon to the error exponent kappa.

    ``A`` bounds the conductor exponent of the attached character family,
    ``d`` its size exponent; ``c_j1``/``c_j2`` are the resulting envelope
    exponents, ``alpha_j`` the detector strip edge, ``delta`` the zero-free
    parameter, and ``kappa = delta/8`` the final saving.
    """

    n: float
    n_k: float
    G_order: float
    eps: float
    A: float
    d: float
    c_j1: float
    c_j2: float
    alpha_j: float
    delta: float
    kappa: float


@dataclass(frozen=True)
class ChebotarevReport:
    """Per-class prime count against the equidistribution prediction.

    ``bound_small_regime`` and ``bound_large_regime`` are the two effective
    envelopes ``(1/n) x^(1-kappa)`` and ``(1/n) x / exp(c3 sqrt(log x / n))``;
    ``regime`` records which side of the threshold ``D^(1/(24 kappa))`` the
    given ``x`` falls on.  Both envelope values are always reported.
    """

    field_label: str
    x: float
    class_index: int
    pi_x: int
    pi_C: int
    ramified_count: int
    normalized_error: float
    regime: str
    bound_small_regime: float
    bound_large_regime: float
    kappa_value: float
    c3: float


def kappa(n: float, n_k: float, G_order: float, eps: float) -> KappaRecord:
    """Constant chain ``eps -> (A, d, c_j1, c_j2, alpha_j, delta, kappa)``.

    ``A = |G|/2`` and ``d = n|G| + 1`` bound the conductor and count of the
    character family attached to a degree-``n`` resolvent with group order
    ``|G|``; then ``c_j1 = 2d + 4nA + A/2 + 1 + eps``, ``c_j2 = n*n_k/2 + 3
    + eps``, the strip edge solves ``(c_j1 + (|G|/2) c_j2)(1 - alpha_j) =
    eps/2``, ``delta = 1 - alpha_j`` and ``kappa = delta/8``.  For cubic
    fields (``n = |G| = 3``, ``n_k = 1``) this gives ``kappa = eps/744`` to
    leading order.  Requires ``0 < eps < 1`` (which also forces
    ``alpha_j >= 3/4``).
    """
    if not 0.0 < eps < 1.0:
        raise DomainError(f"eps must lie in (0, 1), got {eps}")
    if min(n, n_k, G_order) <= 0:
        raise DomainError("n, n_k, G_order must be positive")
    A = G_order / 2.0
    d = n * G_order + 1.0
    c_j1 = 2.0 * d + 4.0 * n * A + A / 2.0 + 1.0 + eps
    c_j2 = n * n_k / 2.0 + 3.0 + eps
    denom = c_j1 + (G_order / 2.0) * c_j2
    delta = eps / (2.0 * denom)
    alpha_j = 1.0 - delta
    return KappaRecord(
        n=n, n_k=n_k, G_order=G_order, eps=eps, A=A, d=d,
        c_j1=c_j1, c_j2=c_j2, alpha_j=alpha_j, delta=delta, kappa=delta / 8.0,
    )


def pi_counts(
    K: CyclicField,
    x: float,
    *,
    kappa_value: float | None = None,
    c3: float = 1.0,
    eps: float = 0.1,
    primes: np.ndarray | None = None,
) -> list[ChebotarevReport]:
    """Exact per-class prime counts up to ``x``, one report per class.

    Sieves primes (or reuses a caller-supplied sorted ``primes`` array,
    truncated to ``x`` — the shared-sieve path for corpus scans), classifies
    them through the field's residue class table, and attaches both
    effective envelopes for the supplied ``(kappa_value, c3)``.  When
    ``kappa_value`` is omitted it is derived from the :func:`kappa` chain at
    the given ``eps`` with ``n = |G| =`` the field degree.  ``x`` is capped
    at 10^9.
    """
    if x > _X_CAP:
        raise DomainError(f"x must be <= {_X_CAP:g}, got {x}")
    n = K.degree
    if kappa_value is None:
        kappa_value = kappa(n, 1.0, n, eps).kappa
    if primes is None:
        ps = prime_array(int(x)) if x >= 2 else np.empty(0, dtype=np.int64)
    else:
        ps = primes[primes <= x]
    pi_x = int(ps.size)

    if pi_x:
        classes = residue_class_table(K)[ps % K.conductor]
        ramified = int(np.count_nonzero(classes == RAMIFIED))
        per_class = np.bincount(classes[classes >= 0], minlength=n)
    else:
        ramified = 0
        per_class = np.zeros(n, dtype=np.int64)

    if x >= 2.0:
        log_x = math.log(x)
        threshold_log_x = math.log(K.discriminant) / (24.0 * kappa_value)
        regime = "large" if log_x >= threshold_log_x else "small"
        bound_small = (1.0 / n) * x ** (1.0 - kappa_value)
        bound_large = (1.0 / n) * x / math.exp(c3 * math.sqrt(log_x / n))
    else:
        regime = "small"
        bound_small = bound_large = 0.0

    expected = pi_x / n
    reports = []
    for j in range(n):
        err = abs(int(per_class[j]) - expected) / expected if pi_x else 0.0
        reports.append(
            ChebotarevReport(
                field_label=K.label,
                x=x,
                class_index=j,
                pi_x=pi_x,
                pi_C=int(per_class[j]),
                ramified_count=ramified,
                normalized_error=err,
                regime=regime,
                bound_small_regime=bound_small,
                bound_large_regime=bound_large,
                kappa_value=kappa_value,
                c3=c3,
            )
        )
    logger.debug(
        "pi_counts %s x=%g: pi=%d classes=%s ramified=%d",
        K.label, x, pi_x, per_class.tolist(), ramified,
    )
    return reports


def error_bound_validity_threshold(D_L: float, delta: float) -> float:
    """Smallest ``x`` where the conditional error bound applies: ``(log D_L)^(16/delta)``."""
    if D_L <= 1.0:
        raise DomainError(f"D_L must exceed 1, got {D_L}")
    if not 0.0 < delta <= 0.5:
        raise DomainError(f"delta must lie in (0, 1/2], got {delta}")
    try:
        return math.log(D_L) ** (16.0 / delta)
    except OverflowError:
        return math.inf


def chebotarev_error_bound(
    D_L: float,
    n_L: float,
    delta: float,
    T: float,
    x: float,
    c4: float = 1.0,
    class_fraction: float = 1.0,
) -> float:
    """Three-term Chebotarev error bound under a rectangular zero-free region.

    For a Galois extension with discriminant ``D_L`` and degree ``n_L``
    whose Dedekind quotient is zero-free on ``[1-delta, 1] x [-T, T]``,
    the bound is ``class_fraction * (x/log x) * (x^(-delta/8)
    + T^(-1/24) exp(-(1/24) sqrt(c4 log x / n_L))
    + T^(-1/24) exp(-(1/24) c4 log x / log D_L))``.

    ``c4`` is an absolute constant with no pinned value (config input).
    Values of ``x`` below :func:`error_bound_validity_threshold` are flagged
    via a log warning but still evaluated.
    """
    if D_L <= 1.0:
        raise DomainError(f"D_L must exceed 1, got {D_L}")
    if n_L < 1:
        raise DomainError(f"n_L must be >= 1, got {n_L}")
    if not 0.0 < delta <= 0.5:
        raise DomainError(f"delta must lie in (0, 1/2], got {delta}")
    if T <= 0.0 or x <= 1.0 or c4 <= 0.0 or class_fraction <= 0.0:
        raise DomainError("T, c4, class_fraction must be positive and x > 1")
    threshold = error_bound_validity_threshold(D_L, delta)
    if x < threshold:
        logger.warning(
            "error bound evaluated below its validity threshold: "
            "x=%g < (log D_L)^(16/delta)=%g", x, threshold,
        )
    log_x = math.log(x)
    t_factor = T ** (-1.0 / 24.0)
    terms = (
        x ** (-delta / 8.0)
        + t_factor * math.exp(-math.sqrt(c4 * log_x / n_L) / 24.0)
        + t_factor * math.exp(-(c4 * log_x / math.log(D_L)) / 24.0)
    )
    return class_fraction * (x / log_x) * terms
