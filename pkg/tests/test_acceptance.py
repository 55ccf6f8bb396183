"""End-to-end acceptance gate: twelve pinned criteria, one verdict line each.

Each test exercises one externally checkable contract of the package at its
stated tolerance and prints a single ``[criterion NN] PASS/FAIL`` line so a
plain ``pytest -v -s tests/test_acceptance.py`` run doubles as a sign-off
sheet.  The criteria deliberately re-derive their reference values through
routes independent of the library internals (exact rational arithmetic,
classical special values, brute-force counts), so a regression anywhere in
the chain surfaces here even if the unit suite was edited in tandem.

Budgeted criteria (1, 2, 8) also assert their wall-clock ceilings; the
corpus sizes are chosen so a cold run of this file stays near a minute.

Conventions
-----------
* Verdict lines go to stdout; run with ``-s`` to see them on success.
* All frozen constants were measured with the oracles named next to them;
  tolerances are stated inline and never loosened to fit.

References
----------
[IK04]  Iwaniec & Kowalski, "Analytic Number Theory", ch. 5, 7, 18.
[MV07]  Montgomery & Vaughan, "Multiplicative Number Theory I", ch. 9.
[Dav80] Davenport, "Multiplicative Number Theory", 2nd ed., ch. 9, 12, 16.
[Was97] Washington, "Introduction to Cyclotomic Fields", ch. 3, 4.
"""

from __future__ import annotations

import math
import time
from fractions import Fraction
from pathlib import Path

from charsieve.arith import prime_array
from charsieve.characters import character_group
from charsieve.chebotarev import kappa, pi_counts
from charsieve.fields import count_slope, enumerate_cyclic
from charsieve.largesieve import (
    constants,
    duality_check,
    rectangle_count_envelope,
)
from charsieve.lfunc import (
    Rectangle,
    count_zeros_family,
    count_zeros_rectangle,
    l_flat_value,
    l_sharp_value,
    l_ur_value,
    l_value,
    locate_zeros,
    rankin_selberg_residue,
)
from charsieve.sievekit import (
    PseudoCharacterContext,
    SelbergWeightScheme,
    admissible_r_set,
    admissible_weight_sum,
    detector_identity_check,
    orthogonality_check,
)
from charsieve.torsion import compare_with_table, load_class_table, torsion_report

DATA_TABLE = Path(__file__).resolve().parents[1] / "data" / "cubic_class_groups.csv"


def _verdict(num: int, ok: bool, detail: str) -> None:
    line = f"[criterion {num:02d}] {'PASS' if ok else 'FAIL'} — {detail}"
    print(line)
    assert ok, line


def _primitive(q: int):
    return next(
        c for c in character_group(q).members if c.is_primitive and not c.is_principal
    )


# ---------------------------------------------------------------------------
# 1. Pseudo-character orthogonality, exact, across three moduli.
# ---------------------------------------------------------------------------


def test_criterion_01_orthogonality_exact() -> None:
    t0 = time.perf_counter()
    pairs = 0
    failures = []
    for q in (5, 7, 11):
        ctx = PseudoCharacterContext(_primitive(q), r_cap=200)
        admissible = admissible_r_set(ctx)
        for r in admissible:
            for t in admissible:
                rep = orthogonality_check(ctx, r, t, 10000)
                pairs += 1
                expected = Fraction(r) if r == t else Fraction(0)
                if (
                    not rep.pointwise_ok
                    or rep.first_counterexample is not None
                    or rep.weighted_sum != expected
                    or rep.weighted_expected != expected
                ):
                    failures.append((q, r, t))
    elapsed = time.perf_counter() - t0
    ok = not failures and pairs == 8653 and elapsed < 60.0
    _verdict(
        1,
        ok,
        f"orthogonality exact on {pairs} admissible (r,t) pairs, "
        f"{len(failures)} failures, {elapsed:.1f}s (< 60s)",
    )


# ---------------------------------------------------------------------------
# 2. Contour-integral detector identity on a ten-case grid.
# ---------------------------------------------------------------------------


def test_criterion_02_detector_identity_grid() -> None:
    t0 = time.perf_counter()
    scheme_a = SelbergWeightScheme(10.0, 30.0, 100.0, 20.0)
    scheme_b = SelbergWeightScheme(20.0, 60.0, 880.0, 20.0)
    assert scheme_a.X <= 100.0 and scheme_b.X <= 100.0
    cases = [
        (5, 1, scheme_a, 0.75 + 1.0j),
        (5, 7, scheme_a, 0.75 + 1.0j),
        (5, 11, scheme_a, 0.75 + 1.0j),
        (7, 1, scheme_a, 0.75 + 1.0j),
        (7, 5, scheme_a, 0.75 + 1.0j),
        (7, 11, scheme_a, 0.75 + 1.0j),
        (5, 7, scheme_b, 0.9 + 2.0j),
        (5, 11, scheme_b, 0.6 + 0.5j),
        (7, 5, scheme_b, 0.9 + 2.0j),
        (7, 11, scheme_b, 0.6 + 0.5j),
    ]
    worst = 0.0
    for q, r, scheme, rho in cases:
        ctx = PseudoCharacterContext(_primitive(q), r_cap=100)
        rep = detector_identity_check(ctx, r, rho, scheme, 40.0)
        worst = max(worst, rep.residual)
    elapsed = time.perf_counter() - t0
    ok = worst < 1e-6 and elapsed < 120.0
    _verdict(
        2,
        ok,
        f"detector identity on {len(cases)} cases (q<=7, r<=11, X<=100): "
        f"max residual {worst:.3e} (< 1e-6), {elapsed:.1f}s (< 120s)",
    )


# ---------------------------------------------------------------------------
# 3. Sharp/flat factorization of the unramified pair L-value.
# ---------------------------------------------------------------------------


def test_criterion_03_sharp_flat_factorization() -> None:
    points = [
        0.6 + 0.0j,
        0.8 + 2.0j,
        1.5 - 7.0j,
        2.5 + 11.0j,
        0.7 - 1.0j,
        0.65 + 5.0j,
        1.0 + 0.5j,
        2.0 + 0.0j,
        0.9 - 3.0j,
        1.2 + 8.0j,
    ]
    worst = 0.0
    count = 0
    for q in (5, 7):
        chi = _primitive(q)
        for s in points:
            gap = abs(
                l_flat_value(chi, s, 4.0) * l_sharp_value(chi, s, 4.0)
                - l_ur_value(chi, s)
            )
            worst = max(worst, gap)
            count += 1
    ok = worst < 1e-8 and count == 20
    _verdict(
        3,
        ok,
        f"|L_flat*L_sharp - L_ur| on {count} points with Re(s)>=0.6: "
        f"max gap {worst:.3e} (< 1e-8)",
    )


# ---------------------------------------------------------------------------
# 4. Rankin-Selberg residue of the chi x conj(chi) pair against phi(q)/q.
# ---------------------------------------------------------------------------


def test_criterion_04_rankin_selberg_residue() -> None:
    worst = 0.0
    for q in (5, 7, 12):
        chi = _primitive(q)
        data = rankin_selberg_residue(chi)
        s = 1.0 + 1e-4
        approx = (s - 1.0) * data.unramified_pair_value(s)
        gap = abs(approx - data.residue_float)
        worst = max(worst, gap)
    ok = worst < 1e-3
    _verdict(
        4,
        ok,
        f"(s-1)*L_ur(chi x conj chi, 1+1e-4) vs phi(q)/q for q in (5,7,12): "
        f"max gap {worst:.2e} (< 1e-3)",
    )


# ---------------------------------------------------------------------------
# 5. Zero counts: exact zeta count, certified locations, strip envelopes.
# ---------------------------------------------------------------------------


def test_criterion_05_zero_counts_and_envelopes() -> None:
    zeta_chi = character_group(1).members[0]
    rect = Rectangle(0.5, 30.0)
    n_zeta = count_zeros_rectangle(zeta_chi, rect)
    located = locate_zeros(zeta_chi, rect, enclosure=1e-8)
    worst_value = max(
        abs(l_value(zeta_chi, complex(z.beta, z.gamma))) for z in located
    )

    # Corpus sweep: two-sided strip counts of height 5 for every primitive
    # character of modulus <= 50 must sit below the logarithmic envelope.
    strips = 0
    violations = 0
    for q in range(3, 51):
        family = character_group(q)
        if not any(c.is_primitive for c in family.members):
            continue
        sub = family.primitive()
        cumulative = [
            count_zeros_family(sub, Rectangle(0.5, 5.0 * j)) for j in range(1, 7)
        ]
        for chi in sub.members:
            prev = 0
            for j in range(6):
                strip = cumulative[j][chi.label] - prev
                prev = cumulative[j][chi.label]
                envelope = rectangle_count_envelope(0.5, q, j, 5.0, 2.5, 2.0)
                strips += 1
                if strip > envelope:
                    violations += 1
    ok = (
        n_zeta == 6
        and len(located) == 6
        and worst_value < 1e-6
        and strips == 2820
        and violations == 0
    )
    _verdict(
        5,
        ok,
        f"zeta zeros in (0.5,30): counted {n_zeta} == located {len(located)} "
        f"(max |zeta(rho)| {worst_value:.1e} < 1e-6); strip envelope held on "
        f"{strips} strips with {violations} violations",
    )


# ---------------------------------------------------------------------------
# 6. Exponent bookkeeping: closed-form c1, c2, z on a ten-point grid.
# ---------------------------------------------------------------------------


def test_criterion_06_constants_closed_forms() -> None:
    grid = [
        (1, 1, 1.0, 1.0),
        (1, 1, 1.0, 2.0),
        (2, 1, 1.0, 1.0),
        (3, 1, 2.0, 1.0),
        (2, 2, 1.0, 3.0),
        (1, 2, 0.5, 1.0),
        (3, 1, 1.0, 6.0),
        (2, 3, 1.5, 2.0),
        (5, 1, 1.0, 1.0),
        (4, 2, 0.25, 5.0),
    ]
    mismatches = 0
    for n, n_k, A, d in grid:
        rec = constants(n, n_k, A, d)
        if rec.c1 != 2 * d + 4 * n * A + A / 2 + 1:
            mismatches += 1
        if rec.c2 != n * n_k / 2 + 3:
            mismatches += 1
        if rec.z != 4.0 * n**4 * n_k**4:
            mismatches += 1
    # Self-dual case d = 2nA collapses c1 to 8nA + A/2 + 1.
    collapsed = 0
    for n, n_k, A in [(1, 1, 1.0), (2, 1, 1.0), (1, 1, 2.0)]:
        rec = constants(n, n_k, A, 2 * n * A)
        if rec.c1 != 8 * n * A + A / 2 + 1:
            collapsed += 1
    ok = mismatches == 0 and collapsed == 0
    _verdict(
        6,
        ok,
        f"c1/c2/z closed forms exact on {len(grid)} tuples "
        f"({mismatches} mismatches) and 3 self-dual collapses "
        f"({collapsed} mismatches)",
    )


# ---------------------------------------------------------------------------
# 7. Primal/dual norm agreement of the bilinear sieve form.
# ---------------------------------------------------------------------------


def test_criterion_07_duality_norms() -> None:
    rep = duality_check(character_group(5), 15, 50, 75, trials=20, seed=1)
    gap = rep.norm_relative_gap
    ok = gap < 0.05
    _verdict(
        7,
        ok,
        f"primal vs dual operator norm (q=5, r<=15, n in [50,75]): "
        f"relative gap {gap:.2e} (< 0.05)",
    )


# ---------------------------------------------------------------------------
# 8. Field census: exact small count plus the asymptotic counting slope.
# ---------------------------------------------------------------------------


def test_criterion_08_field_census_and_slope() -> None:
    t0 = time.perf_counter()
    fields = enumerate_cyclic(3, 1.0e4)
    record = count_slope(3, [1.0e4, 1.0e5, 1.0e6, 1.0e7, 1.0e8])
    elapsed = time.perf_counter() - t0
    ok = (
        len(fields) == 16
        and 0.45 <= record.slope <= 0.55
        and not record.degenerate
        and elapsed < 300.0
    )
    _verdict(
        8,
        ok,
        f"cyclic cubic census: {len(fields)} fields with |disc| <= 1e4 "
        f"(expect 16), log-log slope {record.slope:.3f} in [0.45,0.55], "
        f"{elapsed:.1f}s (< 300s)",
    )


# ---------------------------------------------------------------------------
# 9. Per-class prime counts across the conductor <= 2000 cubic corpus.
# ---------------------------------------------------------------------------


def test_criterion_09_class_counts_corpus() -> None:
    fields = enumerate_cyclic(3, 4.0e6)  # discriminant f^2 <= (2000)^2
    primes = prime_array(10**6)
    within = 0
    total = 0
    partition_failures = 0
    for K in fields:
        reports = pi_counts(K, 1.0e6, primes=primes)
        if sum(r.pi_C for r in reports) + reports[0].ramified_count != reports[0].pi_x:
            partition_failures += 1
        for r in reports:
            total += 1
            if abs(r.normalized_error) <= 0.05:
                within += 1
    fraction = within / total
    ok = fraction >= 0.96 and partition_failures == 0 and total == 951
    _verdict(
        9,
        ok,
        f"per-class counts at x=1e6 over {len(fields)} fields (f<=2000): "
        f"{fraction:.2%} of {total} class counts within 5% (need >= 96%), "
        f"{partition_failures} partition failures",
    )


# ---------------------------------------------------------------------------
# 10. Zero-density exponent chain against an exact rational re-derivation.
# ---------------------------------------------------------------------------


def test_criterion_10_exponent_chain_exact() -> None:
    worst = 0.0
    for eps in (0.001, 0.01, 0.1, 0.25, 0.5, 0.9):
        rec = kappa(3, 1.0, 3.0, eps)
        e = Fraction(eps)
        exact = e / (744 + 40 * e)
        worst = max(worst, abs(rec.kappa - float(exact)))
    pin_gap = abs(kappa(3, 1.0, 3.0, 0.1).kappa - 0.00013368983957219252)
    ok = worst < 1e-12 and pin_gap < 1e-18
    _verdict(
        10,
        ok,
        f"kappa(3,1,3,eps) vs exact eps/(744+40eps) on 6 eps values: "
        f"max gap {worst:.1e} (< 1e-12), pinned value gap {pin_gap:.1e}",
    )


# ---------------------------------------------------------------------------
# 11. Split-prime torsion bounds over the |disc| <= 1e8 cubic corpus.
# ---------------------------------------------------------------------------


def test_criterion_11_torsion_corpus() -> None:
    corpus = enumerate_cyclic(3, 1.0e8)
    primes = prime_array(10)  # threshold D^0.12 <= (1e8)^0.12 < 10
    reports = [torsion_report(K, 2, 0.12, 0.01, primes=primes) for K in corpus]
    histogram: dict[int, int] = {}
    violations = 0
    for r in reports:
        histogram[r.M] = histogram.get(r.M, 0) + 1
        if r.M >= 2 and not (r.bound < r.trivial_bound):
            violations += 1
    table = load_class_table(DATA_TABLE)
    comparison = compare_with_table(reports, table)
    ok = (
        len(corpus) == 1592
        and histogram == {0: 463, 1: 622, 2: 425, 3: 76, 4: 6}
        and violations == 0
        and len(comparison.rows) == 21
        and comparison.corpus_max_ratio <= 0.5
    )
    _verdict(
        11,
        ok,
        f"2-torsion bounds on {len(corpus)} fields (|disc| <= 1e8): "
        f"M histogram {dict(sorted(histogram.items()))}, {violations} "
        f"non-improving M>=2 bounds; table join {len(comparison.rows)} rows, "
        f"max log_D |Cl[2]| = {comparison.corpus_max_ratio:.4f} (<= 0.5)",
    )


# ---------------------------------------------------------------------------
# 12. Admissible-weight calibration bracket across moduli and ranges.
# ---------------------------------------------------------------------------


def test_criterion_12_weight_sum_bracket() -> None:
    ratios = []
    for q in (5, 7, 11):
        ctx = PseudoCharacterContext(_primitive(q), r_cap=30)
        density = (q - 1) / q
        for r_limit in (100, 1000, 10000):
            ratio = float(admissible_weight_sum(ctx, r_limit)) / (
                density * math.log(r_limit)
            )
            ratios.append(ratio)
    pin_gap = abs(ratios[0] - 0.4868060840477805)
    ok = (
        all(0.30 <= r <= 0.55 for r in ratios)
        and len(ratios) == 9
        and pin_gap < 1e-12
    )
    _verdict(
        12,
        ok,
        f"normalized admissible weight sums, 9 cases (q in (5,7,11), "
        f"R up to 1e4): min {min(ratios):.4f}, max {max(ratios):.4f}, "
        f"all in [0.30, 0.55]",
    )
