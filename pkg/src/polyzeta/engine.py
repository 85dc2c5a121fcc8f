"""Relation sets per weight, exact rational reduction, Hoffman-basis check.

A relation is the body of one double-shuffle difference (or one duality
pair) at a fixed weight.  Relations assemble into an exact rational
matrix over the ordered basis of that weight; fraction-free forward
elimination computes the rank, and rational back-substitution expresses
every pivot (dependent) polyzeta through the free (basis) ones.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .closedforms import LEFT_FACTORS, closed_dsr
from .core import Composition, dual
from .counting import hoffman_dim, is_hoffman
from .numeric import eval_mzv
from .oracle import LinComb, dsr as oracle_dsr
from .ordering import enumerate_weight, index_of

__all__ = [
    "GENERATOR_VERSION",
    "Relation",
    "RelationSet",
    "RationalMatrix",
    "ReductionResult",
    "HoffmanReport",
    "NumericReport",
    "generate_relations",
    "assemble_matrix",
    "exact_rref",
    "hoffman_reduce",
    "verify_numeric",
]

# bump when the generated relations could change (closed-form fixes, ordering)
GENERATOR_VERSION = "relations-v1"

ALL_FAMILIES = ("1", "2", "3", "21")


@dataclass(frozen=True)
class Relation:
    """One linear relation between convergent polyzetas of a fixed weight."""

    body: LinComb
    family: str  # "1" | "2" | "3" | "21" | "duality"
    source: Composition

    @property
    def weight(self) -> int:
        return self.body.weight


@dataclass
class RelationSet:
    weight: int
    relations: list[Relation]
    families: tuple[str, ...]
    duality: bool
    mode: str
    notices: list[str] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.relations)


def expected_relation_count(w: int) -> int:
    """2^(w-3) + 2^(w-4) + 2^(w-5) + 2^(w-5) relations for the four
    families at weight w >= 5 (equal to the 2^(w-2) polyzeta count)."""
    if w < 5:
        raise ValueError("the four-family count formula needs w >= 5")
    return 2 ** (w - 3) + 2 ** (w - 4) + 2 ** (w - 5) + 2 ** (w - 5)


def generate_relations(
    w: int,
    families: Iterable[str] = ALL_FAMILIES,
    include_duality: bool = False,
    mode: str = "closed",
) -> RelationSet:
    """Build the relation set of weight w.

    One relation per convergent source of weight w - weight(g) for each
    requested left factor g (skipped with a notice when the source weight
    would drop below 2), plus optionally one duality relation per
    non-self-dual pair.  ``mode`` picks the closed forms or the
    brute-force oracle as generator; the two must agree.
    """
    families = tuple(families)
    for f in families:
        if f not in LEFT_FACTORS:
            raise ValueError(f"unknown relation family {f!r}")
    if mode not in ("closed", "oracle"):
        raise ValueError(f"unknown mode {mode!r}")
    relations: list[Relation] = []
    notices: list[str] = []
    for f in families:
        g = LEFT_FACTORS[f]
        wz = w - g.weight
        if wz < 2:
            notices.append(
                f"family {f}: no sources at weight {w} (needs weight >= {g.weight + 2})"
            )
            continue
        for z in enumerate_weight(wz):
            body = closed_dsr(f, z) if mode == "closed" else oracle_dsr(g, z)
            if body.has_divergent():
                raise AssertionError(f"divergent relation body for family {f}, z={z}")
            relations.append(Relation(body, f, z))
    if include_duality:
        for z in enumerate_weight(w):
            zd = dual(z)
            if zd == z or index_of(zd) < index_of(z):
                continue
            relations.append(
                Relation(LinComb({z: 1, zd: -1}), "duality", z)
            )
    return RelationSet(w, relations, families, include_duality, mode, notices)


@dataclass
class RationalMatrix:
    """Relation rows over the ordered column basis of one weight."""

    weight: int
    columns: tuple[Composition, ...]
    rows: list[list[Fraction]]
    row_meta: list[tuple[str, Composition]]

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self.rows), len(self.columns))


def assemble_matrix(rs: RelationSet, hoffman_last: bool = False) -> RationalMatrix:
    """Coefficient matrix of a relation set; columns in the fixed-weight
    order, optionally with the {2,3}-entry columns moved to the right end
    (preserving relative order) so that pivots prefer the other columns."""
    columns = list(enumerate_weight(rs.weight))
    if hoffman_last:
        columns = [c for c in columns if not is_hoffman(c)] + [
            c for c in columns if is_hoffman(c)
        ]
    col_index = {c: k for k, c in enumerate(columns)}
    rows: list[list[Fraction]] = []
    meta: list[tuple[str, Composition]] = []
    for rel in rs.relations:
        row = [Fraction(0)] * len(columns)
        for term, coeff in rel.body.items():
            row[col_index[term]] = Fraction(coeff)
        rows.append(row)
        meta.append((rel.family, rel.source))
    return RationalMatrix(rs.weight, tuple(columns), rows, meta)


@dataclass
class ReductionResult:
    rank: int
    pivot_columns: list[Composition]
    free_columns: list[Composition]
    # pivot composition -> {free composition: coefficient}
    table: dict[Composition, dict[Composition, Fraction]]

    def substitute(self, body: LinComb) -> dict[Composition, Fraction]:
        """Rewrite a combination over the free columns only (zero iff the
        combination lies in the row space)."""
        acc: dict[Composition, Fraction] = {}

        def add(t: Composition, c: Fraction) -> None:
            s = acc.get(t, Fraction(0)) + c
            if s:
                acc[t] = s
            else:
                acc.pop(t, None)

        for term, coeff in body.items():
            if term in self.table:
                for free, x in self.table[term].items():
                    add(free, Fraction(coeff) * x)
            else:
                add(term, Fraction(coeff))
        return acc


def _scale_to_int(row: Sequence[Fraction]) -> list[int]:
    den = 1
    for x in row:
        den = den * x.denominator // math.gcd(den, x.denominator)
    return [int(x * den) for x in row]


def exact_rref(m: RationalMatrix) -> ReductionResult:
    """Exact reduction: fraction-free forward elimination (integer rows),
    then rational back-substitution for the pivot-through-free table.

    Pivot choice is deterministic: leftmost column, then lowest row.
    """
    nrows, ncols = m.shape
    rows = [_scale_to_int(r) for r in m.rows]
    pivots: list[tuple[int, int]] = []  # (row, col) in echelon order
    prev = 1
    r = 0
    for c in range(ncols):
        pr = next((i for i in range(r, nrows) if rows[i][c] != 0), None)
        if pr is None:
            continue
        if pr != r:
            rows[r], rows[pr] = rows[pr], rows[r]
        piv = rows[r][c]
        for i in range(r + 1, nrows):
            if not any(rows[i][c:]):
                continue
            ric = rows[i][c]
            ri, rr = rows[i], rows[r]
            for j in range(c + 1, ncols):
                ri[j] = (ri[j] * piv - ric * rr[j]) // prev
            ri[c] = 0
        pivots.append((r, c))
        prev = piv
        r += 1
        if r == nrows:
            break
    pivot_cols = [c for _, c in pivots]
    free_cols = [c for c in range(ncols) if c not in set(pivot_cols)]
    # back-substitute: express each pivot column over the free columns
    exprs: dict[int, dict[int, Fraction]] = {}
    for r, c in reversed(pivots):
        row = rows[r]
        acc: dict[int, Fraction] = {}
        for j in range(c + 1, ncols):
            if not row[j]:
                continue
            coeff = Fraction(row[j], row[c])
            if j in exprs:
                for fj, x in exprs[j].items():
                    s = acc.get(fj, Fraction(0)) - coeff * x
                    if s:
                        acc[fj] = s
                    else:
                        acc.pop(fj, None)
            else:
                s = acc.get(j, Fraction(0)) - coeff
                if s:
                    acc[j] = s
                else:
                    acc.pop(j, None)
        exprs[c] = acc
    cols = m.columns
    return ReductionResult(
        rank=len(pivots),
        pivot_columns=[cols[c] for c in pivot_cols],
        free_columns=[cols[c] for c in free_cols],
        table={
            cols[c]: {cols[j]: x for j, x in sorted(expr.items())}
            for c, expr in exprs.items()
        },
    )


@dataclass
class HoffmanReport:
    """Outcome of the basis check at one weight (failure is data, not an
    exception)."""

    weight: int
    families: tuple[str, ...]
    duality: bool
    rank: int
    expected_rank: int
    free_columns: list[Composition]
    non_hoffman_free: list[Composition]
    missing_hoffman: list[Composition]
    result: ReductionResult

    @property
    def ok(self) -> bool:
        return (
            self.rank == self.expected_rank
            and not self.non_hoffman_free
            and not self.missing_hoffman
        )

    def as_dict(self) -> dict:
        return {
            "weight": self.weight,
            "families": list(self.families),
            "duality": self.duality,
            "rank": self.rank,
            "expected_rank": self.expected_rank,
            "ok": self.ok,
            "free_columns": [list(c) for c in self.free_columns],
            "non_hoffman_free": [list(c) for c in self.non_hoffman_free],
            "missing_hoffman": [list(c) for c in self.missing_hoffman],
        }


def hoffman_reduce(
    w: int,
    families: Iterable[str] = ALL_FAMILIES,
    include_duality: bool = False,
    mode: str = "closed",
) -> HoffmanReport:
    """Generate, assemble with the {2,3} columns last, reduce, and check
    that exactly the {2,3}-entry polyzetas remain free."""
    if w < 4:
        raise ValueError("hoffman_reduce needs w >= 4")
    rs = generate_relations(w, families, include_duality, mode)
    red = exact_rref(assemble_matrix(rs, hoffman_last=True))
    expected = 2 ** (w - 2) - hoffman_dim(w)
    free = red.free_columns
    non_h = [c for c in free if not is_hoffman(c)]
    missing = [c for c in enumerate_weight(w) if is_hoffman(c) and c not in set(free)]
    return HoffmanReport(
        weight=w,
        families=tuple(families),
        duality=include_duality,
        rank=red.rank,
        expected_rank=expected,
        free_columns=free,
        non_hoffman_free=non_h,
        missing_hoffman=missing,
        result=red,
    )


@dataclass
class NumericReport:
    tol: float
    residuals: list[tuple[str, Composition, float]]  # family, source, ratio
    worst_by_family: dict[str, float]
    failures: list[tuple[str, Composition, float]]

    @property
    def ok(self) -> bool:
        return not self.failures


def verify_numeric(rs: RelationSet, tol: float = 1e-3, max_terms: int = 10**8) -> NumericReport:
    """Evaluate every relation; the residual must vanish relative to the
    total evaluated mass sum |coeff| * |value|.

    Terms are evaluated at tolerance tol (the adaptive stop over-delivers
    by design, and every polyzeta value is >= 1, so the relative residual
    of a true relation stays well under tol).  The cap default is raised
    above the evaluator's own because deep 1-runs converge like powers of
    log.
    """
    residuals = []
    failures = []
    worst: dict[str, float] = {}
    for rel in rs.relations:
        total = 0.0
        signed = []
        for term, coeff in rel.body.items():
            v = eval_mzv(term, tol, max_terms).value
            signed.append(float(coeff) * v)
            total += abs(float(coeff)) * abs(v)
        ratio = abs(math.fsum(signed)) / total if total else 0.0
        residuals.append((rel.family, rel.source, ratio))
        worst[rel.family] = max(worst.get(rel.family, 0.0), ratio)
        if ratio > tol:
            failures.append((rel.family, rel.source, ratio))
    return NumericReport(tol, residuals, worst, failures)
