"""Closed counting formulas for convergent polyzetas.

All counts are plain integers: totals per weight, per (weight, depth,
height), per fixed 1-placement, per (weight, depth); the dimension
delta_w of the Hoffman {2,3} set; and the term counts of the six
insertion families of the weight-2 shuffle product.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import Sequence

from .core import ABForm, Composition, to_ab

__all__ = [
    "n_total",
    "n_fixed_ones",
    "n_wdh",
    "n_wd",
    "hoffman_dim",
    "hoffman_set",
    "is_hoffman",
    "FamilyTermCounts",
    "family_term_counts",
    "CountReport",
    "count_report",
]


def n_total(w: int) -> int:
    """Number of convergent polyzetas of weight w: 2^(w-2)."""
    if w < 2:
        raise ValueError(f"no convergent polyzetas of weight {w}")
    return 2 ** (w - 2)


def n_fixed_ones(w: int, d: int, h: int, b: Sequence[int]) -> int:
    """Count with the 1-placement vector (b_1,...,b_h) held fixed.

    Only the h entries >= 2 may vary, subject to their sum; the count
    C(w-d-1, h-1) does not depend on b itself.
    """
    b = tuple(int(x) for x in b)
    if len(b) != h:
        raise ValueError(f"placement vector {b} must have h={h} components")
    if any(x < 0 for x in b):
        raise ValueError(f"placement vector {b} has a negative component")
    if sum(b) != d - h:
        raise ValueError(f"placement vector {b} sums to {sum(b)}, expected d-h={d - h}")
    if not (1 <= h <= d <= w - 1):
        raise ValueError(f"inconsistent (w,d,h)=({w},{d},{h})")
    if w - d - 1 < h - 1:
        raise ValueError(f"no room for {h} entries >= 2 in (w,d)=({w},{d})")
    return comb(w - d - 1, h - 1)


def n_wdh(w: int, d: int, h: int) -> int:
    """Count of weight w, depth d, height h; 0 when out of range."""
    if not (1 <= h <= d <= w - 1):
        return 0
    return comb(d - 1, d - h) * comb(w - d - 1, h - 1)


def n_wd(w: int, d: int) -> int:
    """Count of weight w and depth d, summed over all feasible heights."""
    return sum(n_wdh(w, d, h) for h in range(1, min(d, w - d) + 1))


def hoffman_dim(w: int) -> int:
    """Number of {2,3}-compositions of w: 1,1,1 at w=2,3,4 then the
    two-back-plus-three-back recurrence."""
    if w < 2:
        return 0
    if w <= 4:
        return 1
    older = [1, 1, 1]  # delta at w-3, w-2, w-1 rolling window, seeded at 2,3,4
    for _ in range(5, w + 1):
        older.append(older[-2] + older[-3])
    return older[-1]


def hoffman_set(w: int) -> list[Composition]:
    """All compositions of w with every entry in {2, 3}, in list order of
    the recursive expansion."""
    if w < 2:
        return []

    out: list[Composition] = []

    def rec(remaining: int, acc: list[int]) -> None:
        if remaining == 0:
            out.append(Composition(acc))
            return
        for part in (2, 3):
            if part <= remaining and remaining - part != 1:
                acc.append(part)
                rec(remaining - part, acc)
                acc.pop()

    rec(w, [])
    return out


def is_hoffman(c: Composition) -> bool:
    return len(c) > 0 and all(e in (2, 3) for e in c)


@dataclass(frozen=True)
class FamilyTermCounts:
    """Term counts of the six insertion families of the weight-2 shuffle.

    The names record where the inserted 0 and 1 land: ``a`` an entry
    >= 2 (a 0-run), ``b`` a 1-run; doubled letters mean the same block,
    numbered letters distinct blocks.  Counts are with multiplicity, so
    the six of them always add up to C(w, 2) interleavings.
    """

    a_b: int
    b1_b2: int
    bb: int
    aa: int
    a1_a2: int
    b_a: int

    @property
    def total(self) -> int:
        return self.a_b + self.b1_b2 + self.bb + self.aa + self.a1_a2 + self.b_a


def family_term_counts(f: ABForm | Composition) -> FamilyTermCounts:
    """Closed counts for the six families of ``(2) shuffle z``.

    ``f`` is z (or its block form) of weight w-2; the total equals
    w(w-1)/2.
    """
    if isinstance(f, Composition):
        f = to_ab(f)
    elif not isinstance(f, ABForm):
        f = ABForm(f)
    a = [blk[0] for blk in f]
    b = [blk[1] for blk in f]
    h = len(f)
    a_b = sum(a[i] * (b[j] + 2) for i in range(h) for j in range(i, h))
    b1_b2 = sum(b[j1] * (b[j2] + 2) for j1 in range(h) for j2 in range(j1 + 1, h))
    bb = sum((bj + 2) * (bj + 1) // 2 for bj in b)
    aa = 1 + sum(ai * (ai - 1) // 2 - 1 for ai in a)
    a1_a2 = sum(a[i1] * (a[i2] - 2) for i1 in range(h) for i2 in range(i1 + 1, h))
    b_a = sum(b[j] * (a[i] - 2) for j in range(h) for i in range(j + 1, h))
    return FamilyTermCounts(a_b, b1_b2, bb, aa, a1_a2, b_a)


@dataclass(frozen=True)
class CountReport:
    """Per-(depth, height) table of counts for one weight."""

    weight: int
    table: dict[tuple[int, int], int]
    per_depth: dict[int, int]
    total: int

    def as_dict(self) -> dict:
        return {
            "weight": self.weight,
            "counts": [
                {"depth": d, "height": h, "count": n}
                for (d, h), n in sorted(self.table.items())
            ],
            "per_depth": {str(d): n for d, n in sorted(self.per_depth.items())},
            "total": self.total,
        }


def count_report(w: int) -> CountReport:
    if w < 2:
        raise ValueError(f"no convergent polyzetas of weight {w}")
    table: dict[tuple[int, int], int] = {}
    for d in range(1, w):
        for h in range(1, min(d, w - d) + 1):
            n = n_wdh(w, d, h)
            if n:
                table[(d, h)] = n
    per_depth = {d: n_wd(w, d) for d in range(1, w)}
    return CountReport(w, table, per_depth, sum(per_depth.values()))
