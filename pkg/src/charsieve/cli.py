"""Command-line front end for the character-sieve pipelines.

Eight subcommands map onto the library layers: ``verify-identities`` (exact
pseudo-character orthogonality sweeps), ``zeros`` (rectangle counts and
located zeros), ``sieve`` (dyadic mean-value harness plus operator-norm
duality), ``detector`` (Mellin identity residual), ``constants`` (the
exponent/parameter chain), ``fields-enumerate`` (cyclic fields by
discriminant), ``chebotarev`` (split-prime statistics against effective
envelopes), and ``torsion`` (class-group ell-torsion bounds with optional
table comparison).

Conventions
-----------
* Artifacts are written once, atomically, at the end of a run: a CSV table
  and a JSON report per subcommand, plus a PNG chart unless ``--no-figures``.
  Every JSON report echoes the full configuration and the subset of keys
  that were explicitly overridden.
* Exit codes: 0 on success, 1 when a verification assertion fails (or a
  pipeline raises a domain/precision error), 2 on usage or configuration
  errors.
* Global flags come before the subcommand: ``--config``, ``--out``,
  ``--threads``, ``--seed``, ``--mode``, ``--no-figures``, ``--verbose``.
  Data-parallel stages fan out over a thread pool and merge in label order,
  so thread count never changes output bytes.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any, Callable, Sequence

from charsieve.arith import SplitMix64, prime_array
from charsieve.characters import character_group
from charsieve.chebotarev import kappa, pi_counts
from charsieve.config import RunConfig, parse_config
from charsieve.errors import CharsieveError, ConfigError
from charsieve.fields import count_slope, enumerate_cyclic
from charsieve.largesieve import (
    bilinear_breakdown,
    constants,
    duality_check,
    dyadic_harness,
    random_complex_unit,
)
from charsieve.lfunc import Rectangle, count_zeros_family, locate_zeros
from charsieve.reporting import save_figure, write_csv, write_json
from charsieve.sievekit import (
    PseudoCharacterContext,
    SelbergWeightScheme,
    admissible_r_set,
    detector_identity_check,
    orthogonality_check,
)
from charsieve.torsion import compare_with_table, load_class_table, torsion_report

logger = logging.getLogger(__name__)


def _label_key(label: str) -> tuple[int, ...]:
    return tuple(int(part) for part in label.split("."))


def _payload(
    command: str, cfg: RunConfig, params: dict[str, Any], results: dict[str, Any]
) -> dict[str, Any]:
    return {
        "command": command,
        "config": cfg.as_mapping(),
        "overrides": cfg.overrides(),
        "params": params,
        "results": results,
    }


def _maybe_figure(args: argparse.Namespace, cfg: RunConfig, name: str, draw) -> None:
    if args.no_figures:
        return
    import matplotlib

    matplotlib.use("Agg", force=True)
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    try:
        draw(ax)
        fig.tight_layout()
        save_figure(Path(cfg.out_dir) / name, fig)
    finally:
        plt.close(fig)


def _first_primitive(q: int):
    group = character_group(q)
    for chi in group.primitive():
        return chi
    return group.principal()


# ---------------------------------------------------------------------------
# subcommand handlers
# ---------------------------------------------------------------------------


def _cmd_verify_identities(args: argparse.Namespace, cfg: RunConfig) -> int:
    out = Path(cfg.out_dir)
    ctx = PseudoCharacterContext(
        character=_first_primitive(args.modulus),
        delta=cfg.delta,
        z=cfg.z,
        r_cap=args.r_max,
    )
    rs = admissible_r_set(ctx)
    ts = rs if args.t_max is None else [t for t in rs if t <= args.t_max]
    pairs = [(r, t) for r in rs for t in ts]

    def work(pair: tuple[int, int]):
        r, t = pair
        return orthogonality_check(ctx, r, t, args.n_max)

    with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
        reports = list(pool.map(work, pairs))

    rows = []
    failures = 0
    for rep in reports:
        ok = rep.passed
        failures += not ok
        rows.append(
            (rep.r, rep.t, rep.n_max, "pass" if ok else "fail", rep.first_counterexample)
        )
    write_csv(
        out / "identities.csv",
        ["r", "t", "n_max", "status", "first_counterexample"],
        rows,
    )
    write_json(
        out / "identities.json",
        _payload(
            "verify-identities",
            cfg,
            {
                "modulus": args.modulus,
                "r_max": args.r_max,
                "t_max": args.t_max,
                "n_max": args.n_max,
                "admissible_r": rs,
            },
            {"pairs": len(rows), "failures": failures, "all_pass": failures == 0},
        ),
    )

    def draw(ax) -> None:
        good = [(r, t) for r, t, _, s, _ in rows if s == "pass"]
        bad = [(r, t) for r, t, _, s, _ in rows if s == "fail"]
        if good:
            ax.scatter(*zip(*good), s=12, color="tab:green", label="pass")
        if bad:
            ax.scatter(*zip(*bad), s=18, color="tab:red", marker="x", label="fail")
        ax.set_xlabel("r")
        ax.set_ylabel("t")
        ax.set_title(f"orthogonality sweep, modulus {args.modulus}")
        ax.legend(loc="upper right")

    _maybe_figure(args, cfg, "identities.png", draw)
    logger.info("identities: %d pairs, %d failures", len(rows), failures)
    return 0 if failures == 0 else 1


def _cmd_zeros(args: argparse.Namespace, cfg: RunConfig) -> int:
    out = Path(cfg.out_dir)
    rect = Rectangle(alpha=args.alpha, T=args.T)
    chars = sorted(
        character_group(args.modulus).members, key=lambda c: _label_key(c.label)
    )
    counts = count_zeros_family(list(chars), rect, tol=cfg.zero_tol)
    count_rows = [(chi.label, counts[chi.label]) for chi in chars]
    write_csv(out / "zeros_counts.csv", ["character_label", "count"], count_rows)

    zero_rows: list[tuple[str, float, float, float]] = []
    if args.locate:
        def work(chi):
            return locate_zeros(chi, rect, enclosure=args.enclosure, tol=cfg.zero_tol)

        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            located = list(pool.map(work, chars))
        for chi, zs in zip(chars, located):
            for zero in zs:
                zero_rows.append(
                    (chi.label, zero.beta, zero.gamma, zero.refinement_radius)
                )
        write_csv(
            out / "zeros.csv",
            ["character_label", "beta", "gamma", "enclosure"],
            zero_rows,
        )
    write_json(
        out / "zeros.json",
        _payload(
            "zeros",
            cfg,
            {
                "modulus": args.modulus,
                "alpha": args.alpha,
                "T": args.T,
                "locate": args.locate,
                "enclosure": args.enclosure,
            },
            {
                "counts": dict(count_rows),
                "total": sum(counts.values()),
                "located": len(zero_rows),
            },
        ),
    )

    def draw(ax) -> None:
        if zero_rows:
            betas = [row[1] for row in zero_rows]
            gammas = [row[2] for row in zero_rows]
            ax.scatter(betas, gammas, s=14, color="tab:blue")
            ax.axvline(0.5, color="gray", lw=0.8, ls="--")
            ax.set_xlabel("beta")
            ax.set_ylabel("gamma")
            ax.set_title(f"located zeros, modulus {args.modulus}")
        else:
            labels = [row[0] for row in count_rows]
            ax.bar(range(len(labels)), [row[1] for row in count_rows], color="tab:blue")
            ax.set_xticks(range(len(labels)))
            ax.set_xticklabels(labels, rotation=90, fontsize=7)
            ax.set_ylabel("zeros in rectangle")
            ax.set_title(f"zero counts, modulus {args.modulus}, T = {args.T:g}")

    _maybe_figure(args, cfg, "zeros.png", draw)
    return 0


def _cmd_sieve(args: argparse.Namespace, cfg: RunConfig) -> int:
    out = Path(cfg.out_dir)
    family = character_group(args.modulus)
    n_lo = args.n_lo
    n_hi = args.n_hi if args.n_hi is not None else int(math.floor(args.tau * n_lo))
    support = list(range(n_lo, n_hi + 1))
    rng = SplitMix64(cfg.seed)

    trials = []
    first_coeffs: dict[int, complex] | None = None
    for _ in range(args.trials):
        vec = random_complex_unit(rng, len(support))
        coeffs = {n: complex(vec[j]) for j, n in enumerate(support)}
        if first_coeffs is None:
            first_coeffs = coeffs
        trials.append(
            dyadic_harness(
                family,
                coeffs,
                args.tau,
                args.r_cap,
                float(n_lo),
                delta=cfg.delta,
                z=cfg.z,
                eps0=cfg.eps0,
                mode=cfg.mode,
            )
        )
    duality = duality_check(
        family,
        args.r_cap,
        n_lo,
        n_hi,
        delta=cfg.delta,
        z=cfg.z,
        trials=args.trials,
        seed=cfg.seed,
    )
    ratios = sorted(rep.ratio for rep in trials)
    median = ratios[len(ratios) // 2]
    write_json(
        out / "sieve.json",
        _payload(
            "sieve",
            cfg,
            {
                "modulus": args.modulus,
                "r_cap": args.r_cap,
                "n_lo": n_lo,
                "n_hi": n_hi,
                "tau": args.tau,
                "trials": args.trials,
                "harness": trials[0].params if trials else {},
            },
            {
                "ratios": [rep.ratio for rep in trials],
                "ratio_max": max(ratios) if ratios else 0.0,
                "ratio_median": median if ratios else 0.0,
                "duality": duality,
            },
        ),
    )
    if args.breakdown and first_coeffs is not None:
        rows = bilinear_breakdown(
            family, first_coeffs, args.r_cap, delta=cfg.delta, z=cfg.z
        )
        write_csv(
            out / "sieve_breakdown.csv",
            ["character_label", "r", "contribution"],
            rows,
        )

    def draw(ax) -> None:
        ax.plot(range(1, len(ratios) + 1), ratios, "o-", color="tab:blue")
        ax.set_xlabel("trial (sorted)")
        ax.set_ylabel("lhs / rhs")
        ax.set_title(
            f"dyadic harness, q = {args.modulus}, window [{n_lo}, {n_hi}]"
        )

    _maybe_figure(args, cfg, "sieve.png", draw)
    gap = duality.norm_relative_gap
    logger.info("sieve: duality gap %.3g, median ratio %.3g", gap, median)
    return 0 if gap <= 0.05 else 1


def _cmd_detector(args: argparse.Namespace, cfg: RunConfig) -> int:
    out = Path(cfg.out_dir)
    ctx = PseudoCharacterContext(
        character=_first_primitive(args.modulus),
        delta=cfg.delta,
        z=cfg.z,
        r_cap=max(100, args.r),
    )
    scheme = SelbergWeightScheme(w=args.w, y=args.y, x=args.x, qt=args.qt)
    report = detector_identity_check(
        ctx,
        args.r,
        complex(args.rho_re, args.rho_im),
        scheme,
        args.height,
        tol=cfg.tol,
    )
    passed = report.residual <= cfg.tol
    write_json(
        out / "detector.json",
        _payload(
            "detector",
            cfg,
            {
                "modulus": args.modulus,
                "r": args.r,
                "rho": {"re": args.rho_re, "im": args.rho_im},
                "w": args.w,
                "y": args.y,
                "x": args.x,
                "qt": args.qt,
                "contour_height": args.height,
            },
            {"report": report, "residual": report.residual,
             "certified_error": report.certified_error, "passed": passed},
        ),
    )

    def draw(ax) -> None:
        names = ["residual", "certified error", "tolerance"]
        values = [report.residual, report.certified_error, cfg.tol]
        ax.bar(names, values, color=["tab:blue", "tab:orange", "tab:gray"])
        ax.set_yscale("log")
        ax.set_title(f"Mellin identity residual, q = {args.modulus}, r = {args.r}")

    _maybe_figure(args, cfg, "detector.png", draw)
    return 0 if passed else 1


def _cmd_constants(args: argparse.Namespace, cfg: RunConfig) -> int:
    out = Path(cfg.out_dir)
    record = constants(
        args.n,
        args.nk,
        args.A,
        args.d,
        q=args.q,
        T=args.T,
        R=args.R,
        c=cfg.c,
        delta=cfg.delta,
        alpha=args.alpha,
        tau=args.tau,
        eps0=cfg.eps0,
        eps2=cfg.eps2,
        eps3=cfg.eps3,
        eps4=cfg.eps4,
    )
    write_json(
        out / "constants.json",
        _payload(
            "constants",
            cfg,
            {"n": args.n, "nk": args.nk, "A": args.A, "d": args.d,
             "q": args.q, "T": args.T, "R": args.R,
             "alpha": args.alpha, "tau": args.tau},
            {"record": record},
        ),
    )
    return 0


def _cmd_fields_enumerate(args: argparse.Namespace, cfg: RunConfig) -> int:
    out = Path(cfg.out_dir)
    fields = enumerate_cyclic(args.degree, args.x_max)
    rows = [
        (
            K.label,
            K.degree,
            K.conductor,
            K.discriminant,
            ";".join(str(e) for e in K.representative.exponents),
        )
        for K in fields
    ]
    # Validate and fit the slope grid before any artifact is written so a
    # rejected grid leaves the output directory untouched.
    slope = None
    if args.slope_grid:
        grid = [float(part) for part in args.slope_grid.split(",")]
        slope = count_slope(args.degree, grid)
    write_csv(
        out / "fields.csv",
        ["label", "degree", "conductor", "discriminant", "character_exponents"],
        rows,
    )
    write_json(
        out / "fields.json",
        _payload(
            "fields-enumerate",
            cfg,
            {"degree": args.degree, "x_max": args.x_max,
             "slope_grid": args.slope_grid},
            {"count": len(fields), "slope": slope},
        ),
    )

    def draw(ax) -> None:
        if not fields:
            ax.set_title("no fields in range")
            return
        discs = [K.discriminant for K in fields]
        ax.step(discs, range(1, len(discs) + 1), where="post", color="tab:blue")
        ax.set_xscale("log")
        ax.set_yscale("log")
        ax.set_xlabel("discriminant bound X")
        ax.set_ylabel("fields with D <= X")
        ax.set_title(f"cyclic degree-{args.degree} fields by discriminant")

    _maybe_figure(args, cfg, "fields.png", draw)
    return 0


def _cmd_chebotarev(args: argparse.Namespace, cfg: RunConfig) -> int:
    out = Path(cfg.out_dir)
    degree = args.degree
    xs = sorted(
        {float(part) for part in args.grid.split(",")} if args.grid else {args.x}
    )
    fields = enumerate_cyclic(degree, float(args.f_max) ** (degree - 1))
    kappa_value = kappa(degree, 1, degree, cfg.eps).kappa
    primes = prime_array(int(max(xs)))

    def work(K):
        return [
            pi_counts(
                K, x, kappa_value=kappa_value, c3=cfg.c3, eps=cfg.eps, primes=primes
            )
            for x in xs
        ]

    with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
        per_field = list(pool.map(work, fields))

    rows = []
    partition_ok = True
    top_x = xs[-1]
    top_errors: list[float] = []
    for batches in per_field:
        for reports in batches:
            ramified = reports[0].ramified_count
            total = reports[0].pi_x
            if sum(rep.pi_C for rep in reports) + ramified != total:
                partition_ok = False
            for rep in reports:
                if rep.x == top_x:
                    top_errors.append(rep.normalized_error)
                rows.append(
                    (
                        rep.field_label,
                        rep.x,
                        rep.class_index,
                        rep.pi_C,
                        rep.pi_x,
                        rep.normalized_error,
                        rep.bound_small_regime,
                        rep.bound_large_regime,
                    )
                )
    write_csv(
        out / "chebotarev.csv",
        [
            "field_label",
            "x",
            "class",
            "pi_C",
            "pi",
            "normalized_error",
            "bound_small_regime",
            "bound_large_regime",
        ],
        rows,
    )
    within = sum(err <= 0.05 for err in top_errors)
    write_json(
        out / "chebotarev.json",
        _payload(
            "chebotarev",
            cfg,
            {"degree": degree, "f_max": args.f_max, "x_grid": xs,
             "kappa": kappa_value, "c3": cfg.c3, "eps": cfg.eps},
            {
                "fields": len(fields),
                "pairs_at_top_x": len(top_errors),
                "fraction_within_5pct": within / len(top_errors) if top_errors else 1.0,
                "max_normalized_error": max(top_errors, default=0.0),
                "partition_identity_ok": partition_ok,
            },
        ),
    )

    def draw(ax) -> None:
        ax.hist(top_errors, bins=40, color="tab:blue")
        ax.axvline(0.05, color="tab:red", ls="--", label="0.05")
        ax.set_xlabel(f"normalized class error at x = {top_x:g}")
        ax.set_ylabel("(field, class) pairs")
        ax.set_title(f"equidistribution, conductor <= {args.f_max}")
        ax.legend()

    _maybe_figure(args, cfg, "chebotarev.png", draw)
    return 0 if partition_ok else 1


def _cmd_torsion(args: argparse.Namespace, cfg: RunConfig) -> int:
    out = Path(cfg.out_dir)
    fields = enumerate_cyclic(args.degree, args.x_max)
    threshold = int(args.x_max ** args.delta) + 1
    primes = prime_array(max(threshold, 3))
    reports = [
        torsion_report(K, args.ell, args.delta, args.eps, primes=primes)
        for K in fields
    ]
    table = load_class_table(args.table) if args.table else ()
    record = compare_with_table(reports, table)
    joined = {row.field_label: row for row in record.rows}

    rows = []
    for rep in reports:
        match = joined.get(rep.field_label)
        rows.append(
            (
                rep.field_label,
                rep.ell,
                rep.delta,
                rep.M,
                rep.bound,
                rep.trivial_bound,
                match.torsion_size if match else None,
                match.exponent_ratio if match else None,
            )
        )
    write_csv(
        out / "torsion.csv",
        [
            "field_label",
            "ell",
            "delta",
            "M",
            "bound",
            "trivial_bound",
            "table_value",
            "exponent_ratio",
        ],
        rows,
    )
    m_values = [rep.M for rep in reports]
    write_json(
        out / "torsion.json",
        _payload(
            "torsion",
            cfg,
            {"degree": args.degree, "x_max": args.x_max, "ell": args.ell,
             "delta": args.delta, "eps": args.eps, "table": args.table},
            {
                "fields": len(reports),
                "joined": len(record.rows),
                "corpus_max_ratio": record.corpus_max_ratio,
                "flagged": list(record.flagged),
                "trivial_supply": sum(rep.trivial_supply for rep in reports),
                "max_M": max(m_values, default=0),
            },
        ),
    )

    def draw(ax) -> None:
        xs = [math.log10(rep.discriminant) for rep in reports]
        ax.scatter(
            xs,
            [math.log10(rep.bound) for rep in reports],
            s=10,
            color="tab:blue",
            label="bound",
        )
        ax.plot(
            sorted(xs),
            [math.log10(rep.trivial_bound) for rep in sorted(reports, key=lambda r: r.discriminant)],
            color="tab:gray",
            lw=0.8,
            label="trivial",
        )
        if record.rows:
            pts = [
                (math.log10(joined[rep.field_label].torsion_size or 1), math.log10(rep.discriminant))
                for rep in reports
                if rep.field_label in joined
            ]
            ax.scatter(
                [p[1] for p in pts],
                [p[0] for p in pts],
                s=14,
                color="tab:red",
                marker="^",
                label="table torsion",
            )
        ax.set_xlabel("log10 discriminant")
        ax.set_ylabel("log10 size")
        ax.set_title(f"{args.ell}-torsion bounds, degree {args.degree}")
        ax.legend()

    _maybe_figure(args, cfg, "torsion.png", draw)
    return 0


_HANDLERS: dict[str, Callable[[argparse.Namespace, RunConfig], int]] = {
    "verify-identities": _cmd_verify_identities,
    "zeros": _cmd_zeros,
    "sieve": _cmd_sieve,
    "detector": _cmd_detector,
    "constants": _cmd_constants,
    "fields-enumerate": _cmd_fields_enumerate,
    "chebotarev": _cmd_chebotarev,
    "torsion": _cmd_torsion,
}


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="charsieve",
        description="Character-sieve verification and survey pipelines.",
    )
    parser.add_argument("--config", help="path to a key = value configuration file")
    parser.add_argument("--out", help="output directory (default: current)")
    parser.add_argument("--threads", type=int, help="worker threads for corpus scans")
    parser.add_argument("--seed", type=int, help="PRNG seed for randomized trials")
    parser.add_argument("--mode", choices=("paper", "desk"),
                        help="hypothesis strictness for the sieve harnesses")
    parser.add_argument("--no-figures", action="store_true",
                        help="skip PNG chart output")
    parser.add_argument("--verbose", action="store_true",
                        help="log pipeline progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify-identities",
                       help="exact pseudo-character orthogonality sweep")
    p.add_argument("--modulus", type=int, required=True)
    p.add_argument("--r-max", type=int, default=200)
    p.add_argument("--t-max", type=int, default=None)
    p.add_argument("--n-max", type=int, default=10000)

    p = sub.add_parser("zeros", help="zero counts (and locations) in a rectangle")
    p.add_argument("--modulus", type=int, required=True)
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--T", type=float, default=30.0)
    p.add_argument("--locate", action="store_true")
    p.add_argument("--enclosure", type=float, default=1e-8)

    p = sub.add_parser("sieve", help="dyadic mean-value harness and duality check")
    p.add_argument("--modulus", type=int, required=True)
    p.add_argument("--r-cap", type=int, default=15)
    p.add_argument("--n-lo", type=int, default=50)
    p.add_argument("--n-hi", type=int, default=None)
    p.add_argument("--tau", type=float, default=1.5)
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--breakdown", action="store_true",
                   help="write per-(character, r) contributions of trial 1")

    p = sub.add_parser("detector", help="Mellin identity residual for one detector")
    p.add_argument("--modulus", type=int, required=True)
    p.add_argument("--r", type=int, default=1)
    p.add_argument("--rho-re", type=float, default=0.75)
    p.add_argument("--rho-im", type=float, default=1.0)
    p.add_argument("--w", type=float, default=10.0)
    p.add_argument("--y", type=float, default=30.0)
    p.add_argument("--x", type=float, default=100.0)
    p.add_argument("--qt", type=float, default=20.0)
    p.add_argument("--height", type=float, default=40.0)

    p = sub.add_parser("constants", help="exponent constants and parameter chain")
    p.add_argument("--n", type=float, required=True)
    p.add_argument("--nk", type=float, required=True)
    p.add_argument("--A", type=float, required=True)
    p.add_argument("--d", type=float, required=True)
    p.add_argument("--q", type=float, default=None)
    p.add_argument("--T", type=float, default=None)
    p.add_argument("--R", type=float, default=None)
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--tau", type=float, default=None)

    p = sub.add_parser("fields-enumerate", help="cyclic fields by discriminant bound")
    p.add_argument("--degree", type=int, default=3)
    p.add_argument("--x-max", type=float, required=True)
    p.add_argument("--slope-grid", default=None,
                   help="comma-separated discriminant bounds for the count slope")

    p = sub.add_parser("chebotarev", help="split-prime statistics for a field corpus")
    p.add_argument("--degree", type=int, default=3)
    p.add_argument("--f-max", type=int, required=True,
                   help="largest conductor to include")
    p.add_argument("--x", type=float, default=1e6)
    p.add_argument("--grid", default=None,
                   help="comma-separated x values (overrides --x)")

    p = sub.add_parser("torsion", help="class-group ell-torsion bounds for a corpus")
    p.add_argument("--degree", type=int, default=3)
    p.add_argument("--x-max", type=float, required=True,
                   help="largest discriminant to include")
    p.add_argument("--ell", type=int, default=2)
    p.add_argument("--delta", type=float, default=0.12,
                   help="split-prime threshold exponent")
    p.add_argument("--eps", type=float, default=0.01,
                   help="epsilon in the bound exponent")
    p.add_argument("--table", default=None,
                   help="class-group table CSV for comparison")

    return parser


def _resolve_config(args: argparse.Namespace) -> RunConfig:
    cfg = parse_config(args.config) if args.config else RunConfig()
    overrides: dict[str, Any] = {}
    if args.out is not None:
        overrides["out_dir"] = args.out
    if args.threads is not None:
        overrides["threads"] = args.threads
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.mode is not None:
        overrides["mode"] = args.mode
    return cfg.replace(**overrides) if overrides else cfg


def run_subcommand(argv: Sequence[str]) -> int:
    """Parse ``argv``, run the mapped pipeline, and return the exit code."""
    parser = _build_parser()
    try:
        args = parser.parse_args(list(argv))
    except SystemExit as exc:
        code = exc.code
        return int(code) if isinstance(code, int) else 2
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        cfg = _resolve_config(args)
        return _HANDLERS[args.command](args, cfg)
    except ConfigError as exc:
        print(f"charsieve: {exc}", file=sys.stderr)
        return 2
    except CharsieveError as exc:
        print(f"charsieve: {exc}", file=sys.stderr)
        return 1


def main(argv: Sequence[str] | None = None) -> int:
    return run_subcommand(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":
    raise SystemExit(main())
