"""Split-prime supplies and class-group ell-torsion bounds for cyclic fields.

The pipeline runs in three stages.  First, for a cyclic field K of odd prime
degree n and discriminant D, count the rational primes p <= D^delta that
split completely in K (``split_prime_count``); Frobenius data come from the
character dictionary in :mod:`charsieve.fields`.  Second, convert that
supply M into a bound on the ell-torsion subgroup of the ideal class group
(``ev_bound``): ideal classes killed by ell admit integral representatives
of norm below D^{1/2+eps}, and each qualifying split prime cuts the count of
usable representatives by the [EV07] pigeonhole, giving
|Cl_K[ell]| <= D^{1/2+eps} / max(M, 1).  With no qualifying primes the bound
degenerates to the Minkowski-style trivial D^{1/2+eps}, and the report flags
the degenerate supply.  Third, compare against ingested class-group tables
(``load_class_table``, ``compare_with_table``); exact class groups of
totally real cyclic fields are ground truth read from a file, never
computed here.

Conventions
-----------
* The threshold exponent must satisfy delta < 1/(2*ell*(n-1)) strictly
  before any counting happens: ``torsion_report`` enforces the window,
  while ``split_prime_count`` itself only requires delta > 0.
* For an abelian group with elementary divisors (d_1, ..., d_k), the
  ell-torsion subgroup has size prod_i gcd(ell, d_i), and the divisor
  product must equal the stated class number.
* All bounds carry implied constant 1 as a reporting convention.  A table
  value exceeding a bound is therefore informational: it is logged and
  flagged, never raised as an error.

References
----------
[EV07]  Ellenberg, Venkatesh. Reflection principles and bounds for class
        group torsion. Int. Math. Res. Not. 2007.
[Was97] Washington. Introduction to Cyclotomic Fields, 2nd ed., ch. 4.
[HW79]  Hardy, Wright. An Introduction to the Theory of Numbers, ch. 16.
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass
from math import gcd
from os import PathLike
from typing import Sequence

import numpy as np

from charsieve.arith import prime_array
from charsieve.errors import DomainError, IngestionError
from charsieve.fields import CyclicField, residue_class_table

logger = logging.getLogger(__name__)

_TABLE_HEADER = (
    "label",
    "degree",
    "conductor",
    "discriminant",
    "class_number",
    "class_group",
)

#: Largest split-prime threshold D^delta the counting stage will sieve.
_SPLIT_THRESHOLD_CAP = 1.0e9


def delta_ceiling(ell: int, n: int) -> float:
    """Exclusive upper limit 1/(2*ell*(n-1)) for the threshold exponent."""
    if ell < 1:
        raise DomainError(f"torsion order must be a positive integer, got {ell}")
    if n < 2:
        raise DomainError(f"field degree must be at least 2, got {n}")
    return 1.0 / (2 * ell * (n - 1))


@dataclass(frozen=True)
class TorsionReport:
    """One field's split-prime supply and the torsion bound it buys.

    ``table_value`` and ``exponent_ratio`` stay ``None`` until a class-group
    table has been joined in; ``trivial_supply`` marks the degenerate M = 0
    case where the bound is just the trivial one.
    """

    field_label: str
    degree: int
    conductor: int
    discriminant: int
    ell: int
    delta: float
    M: int
    bound: float
    trivial_bound: float
    target_bound: float
    table_value: int | None = None
    exponent_ratio: float | None = None

    def __post_init__(self) -> None:
        ceiling = delta_ceiling(self.ell, self.degree)
        if not 0.0 < self.delta < ceiling:
            raise DomainError(
                f"delta={self.delta!r} outside (0, {ceiling!r}) for "
                f"ell={self.ell}, degree={self.degree}"
            )
        if self.M < 0:
            raise DomainError(f"split-prime count must be nonnegative, got {self.M}")
        if self.M >= 1 and self.bound > self.trivial_bound:
            raise DomainError(
                "torsion bound exceeds the trivial bound despite M >= 1: "
                f"{self.bound} > {self.trivial_bound}"
            )
        if self.table_value is not None and self.table_value < 1:
            raise DomainError(
                f"table torsion size must be a positive integer, got {self.table_value}"
            )

    @property
    def trivial_supply(self) -> bool:
        """True when no qualifying split primes were found."""
        return self.M == 0


def split_prime_count(
    K: CyclicField,
    delta: float,
    *,
    primes: np.ndarray | None = None,
) -> int:
    """Count rational primes p <= D_K^delta that split completely in K.

    Splitting completely means Frobenius class 0 and in particular excludes
    the ramified primes dividing the conductor.  For prime degree over the
    rationals every completely split prime is automatically "new" (there are
    no proper intermediate fields to inherit it from).  Pass a shared
    ``primes`` array (ascending, from :func:`charsieve.arith.prime_array`)
    to amortize sieving over a corpus.
    """
    if delta <= 0.0:
        raise DomainError(f"threshold exponent must be positive, got {delta!r}")
    threshold = float(K.discriminant) ** delta
    if threshold > _SPLIT_THRESHOLD_CAP:
        raise DomainError(
            f"split-prime threshold {threshold:.3g} exceeds cap {_SPLIT_THRESHOLD_CAP:.0e}"
        )
    limit = int(threshold)
    if limit < 2:
        return 0
    ps = prime_array(limit) if primes is None else primes[primes <= limit]
    if ps.size == 0:
        return 0
    classes = residue_class_table(K)[ps % K.conductor]
    return int(np.count_nonzero(classes == 0))


def trivial_bound(D_K: float, eps: float) -> float:
    """The no-information bound D^{1/2+eps} on any torsion subgroup size."""
    if D_K <= 1.0:
        raise DomainError(f"discriminant must exceed 1, got {D_K!r}")
    if eps < 0.0:
        raise DomainError(f"epsilon must be nonnegative, got {eps!r}")
    return float(D_K) ** (0.5 + eps)


def target_bound(D_K: float, ell: int, n: int, eps: float) -> float:
    """Saved-exponent target D^{1/2 - 1/(2*ell*(n-1)) + eps} for display."""
    ceiling = delta_ceiling(ell, n)
    if D_K <= 1.0:
        raise DomainError(f"discriminant must exceed 1, got {D_K!r}")
    if eps < 0.0:
        raise DomainError(f"epsilon must be nonnegative, got {eps!r}")
    return float(D_K) ** (0.5 - ceiling + eps)


def ev_bound(D_K: float, ell: int, n: int, M: int, eps: float) -> float:
    """Torsion bound D^{1/2+eps}/max(M,1) from M qualifying split primes.

    Exactly inversely proportional to the supply: ``ev_bound(..., M, ...)``
    equals ``ev_bound(..., 1, ...) / max(M, 1)`` as floats.  ``ell`` and
    ``n`` do not enter the value itself, only the admissibility window of
    the exponent delta that produced M; they are kept in the signature so
    call sites state the regime they are bounding.
    """
    delta_ceiling(ell, n)
    if M < 0:
        raise DomainError(f"split-prime count must be nonnegative, got {M}")
    return trivial_bound(D_K, eps) / max(M, 1)


def torsion_report(
    K: CyclicField,
    ell: int,
    delta: float,
    eps: float,
    *,
    table_value: int | None = None,
    primes: np.ndarray | None = None,
) -> TorsionReport:
    """Run the counting and bounding stages for one field.

    Enforces the window 0 < delta < 1/(2*ell*(n-1)) before any prime is
    counted.  ``table_value``, when supplied, is the ingested |Cl_K[ell]|
    and fills ``exponent_ratio`` = log|Cl_K[ell]| / log D_K.
    """
    ceiling = delta_ceiling(ell, K.degree)
    if not 0.0 < delta < ceiling:
        raise DomainError(
            f"delta={delta!r} outside (0, {ceiling!r}) for ell={ell}, "
            f"degree={K.degree}"
        )
    M = split_prime_count(K, delta, primes=primes)
    if M == 0:
        logger.debug(
            "field %s: no split primes below D^%.6g = %.3g; trivial bound",
            K.label,
            delta,
            float(K.discriminant) ** delta,
        )
    ratio: float | None = None
    if table_value is not None:
        if table_value < 1:
            raise DomainError(
                f"table torsion size must be a positive integer, got {table_value}"
            )
        ratio = math.log(table_value) / math.log(K.discriminant)
    return TorsionReport(
        field_label=K.label,
        degree=K.degree,
        conductor=K.conductor,
        discriminant=K.discriminant,
        ell=ell,
        delta=delta,
        M=M,
        bound=ev_bound(K.discriminant, ell, K.degree, M, eps),
        trivial_bound=trivial_bound(K.discriminant, eps),
        target_bound=target_bound(K.discriminant, ell, K.degree, eps),
        table_value=table_value,
        exponent_ratio=ratio,
    )


@dataclass(frozen=True)
class ClassTableRow:
    """One ingested field: label, invariants, and its class group."""

    label: str
    degree: int
    conductor: int
    discriminant: int
    class_number: int
    class_group: tuple[int, ...]


def ell_torsion_size(class_group: Sequence[int], ell: int) -> int:
    """|Cl[ell]| = prod gcd(ell, d_i) over the elementary divisors d_i."""
    if ell < 1:
        raise DomainError(f"torsion order must be a positive integer, got {ell}")
    size = 1
    for divisor in class_group:
        size *= gcd(ell, divisor)
    return size


def _parse_class_group(text: str, where: str) -> tuple[int, ...]:
    stripped = text.strip()
    if not (stripped.startswith("[") and stripped.endswith("]")):
        raise IngestionError(
            f"{where}: class_group must be a bracketed list like [3,3], got {text!r}"
        )
    inner = stripped[1:-1].strip()
    if not inner:
        return ()
    try:
        divisors = tuple(int(part.strip()) for part in inner.split(","))
    except ValueError:
        raise IngestionError(
            f"{where}: non-integer elementary divisor in {text!r}"
        ) from None
    if any(d < 2 for d in divisors):
        raise IngestionError(
            f"{where}: elementary divisors must all be >= 2, got {list(divisors)}"
        )
    return divisors


def load_class_table(path: str | PathLike[str]) -> tuple[ClassTableRow, ...]:
    """Read a class-group table from CSV.

    Expected header: label,degree,conductor,discriminant,class_number,
    class_group — where class_group is a bracketed comma list of elementary
    divisors ("[3,3]", "[]" for trivial).  Blank lines are skipped.  Any
    malformed row raises :class:`IngestionError` naming the line.
    """
    rows: list[ClassTableRow] = []
    with open(path, encoding="utf-8", newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header is None or tuple(col.strip() for col in header) != _TABLE_HEADER:
            raise IngestionError(
                f"{path}: expected header {','.join(_TABLE_HEADER)}, got {header!r}"
            )
        for lineno, record in enumerate(reader, start=2):
            if not record or all(not col.strip() for col in record):
                continue
            where = f"{path}:{lineno}"
            if len(record) != len(_TABLE_HEADER):
                raise IngestionError(
                    f"{where}: expected {len(_TABLE_HEADER)} columns, got {len(record)}"
                )
            label = record[0].strip()
            try:
                degree = int(record[1])
                conductor = int(record[2])
                discriminant = int(record[3])
                class_number = int(record[4])
            except ValueError:
                raise IngestionError(
                    f"{where}: non-integer numeric column in {record!r}"
                ) from None
            if degree < 2 or conductor < 1 or discriminant < 2 or class_number < 1:
                raise IngestionError(
                    f"{where}: out-of-range invariants in {record!r}"
                )
            divisors = _parse_class_group(record[5], where)
            product = math.prod(divisors)
            if product != class_number:
                raise IngestionError(
                    f"{where}: elementary divisors {list(divisors)} multiply to "
                    f"{product}, but class_number is {class_number}"
                )
            rows.append(
                ClassTableRow(
                    label=label,
                    degree=degree,
                    conductor=conductor,
                    discriminant=discriminant,
                    class_number=class_number,
                    class_group=divisors,
                )
            )
    return tuple(rows)


@dataclass(frozen=True)
class ComparisonRow:
    """One joined (report, table) pair with the exponent it realizes."""

    field_label: str
    ell: int
    torsion_size: int
    bound: float
    exponent_ratio: float
    exceeds_bound: bool


@dataclass(frozen=True)
class ComparisonRecord:
    """Join of torsion reports against an ingested class-group table."""

    rows: tuple[ComparisonRow, ...]
    corpus_max_ratio: float | None
    flagged: tuple[str, ...]


def compare_with_table(
    reports: Sequence[TorsionReport],
    table: Sequence[ClassTableRow],
) -> ComparisonRecord:
    """Join reports to table rows and measure realized torsion exponents.

    Rows join by exact label first, then by (degree, conductor) for table
    rows whose labels do not match any report.  Reports without a matching
    table row are dropped from the comparison (inner join); an empty table
    yields an empty record.  A table value exceeding a report's bound is
    flagged informationally — implied constants in the bound are unknown,
    so the flag is never an error.
    """
    by_label: dict[str, ClassTableRow] = {}
    by_key: dict[tuple[int, int], list[ClassTableRow]] = {}
    for row in table:
        if row.label:
            if row.label in by_label:
                raise IngestionError(f"duplicate table label {row.label!r}")
            by_label[row.label] = row
        by_key.setdefault((row.degree, row.conductor), []).append(row)

    rows: list[ComparisonRow] = []
    flagged: list[str] = []
    for report in reports:
        match = by_label.get(report.field_label)
        if match is None:
            candidates = by_key.get((report.degree, report.conductor), [])
            if not candidates:
                continue
            invariants = {(c.class_number, c.class_group) for c in candidates}
            if len(invariants) > 1:
                raise IngestionError(
                    f"table rows for degree {report.degree}, conductor "
                    f"{report.conductor} disagree; label them to disambiguate"
                )
            match = candidates[0]
        if match.discriminant != report.discriminant:
            raise IngestionError(
                f"table row {match.label or match.conductor}: discriminant "
                f"{match.discriminant} does not match field "
                f"{report.field_label} ({report.discriminant})"
            )
        size = ell_torsion_size(match.class_group, report.ell)
        ratio = math.log(size) / math.log(report.discriminant)
        exceeds = size > report.bound
        if exceeds:
            flagged.append(report.field_label)
            logger.info(
                "field %s: table %d-torsion %d exceeds bound %.6g (informational)",
                report.field_label,
                report.ell,
                size,
                report.bound,
            )
        rows.append(
            ComparisonRow(
                field_label=report.field_label,
                ell=report.ell,
                torsion_size=size,
                bound=report.bound,
                exponent_ratio=ratio,
                exceeds_bound=exceeds,
            )
        )
    corpus_max = max((row.exponent_ratio for row in rows), default=None)
    if corpus_max is not None:
        logger.debug(
            "corpus max realized torsion exponent: %.6g over %d fields",
            corpus_max,
            len(rows),
        )
    return ComparisonRecord(
        rows=tuple(rows),
        corpus_max_ratio=corpus_max,
        flagged=tuple(flagged),
    )
