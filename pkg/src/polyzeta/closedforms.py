"""Direct, non-recursive expansions of the products with (1), (2), (3), (2,1).

Each product is a finite sum of *families*.  A family walks the blocks
(a_1, 1^b_1, ..., a_h, 1^b_h) of the right factor and emits terms with an
integer coefficient and the predicted depth/height of every term.  Family
names record where the inserted letters land: ``a`` in a 0-run (an entry
>= 2), ``b`` in a 1-run; ``a1 a2`` distinct blocks, a repeated letter the
same block; ``front``/``end`` the special unit insertions.

The printed source statements of several of these expansions carry
typographical defects (a wrong guard, a dropped coefficient, an index
slip, two absent families).  The shipped families are the corrected ones,
validated coefficient-by-coefficient against the brute-force products in
:mod:`polyzeta.oracle`; ``variant="printed"`` reproduces the defective
text where it is even evaluable, and :func:`reconcile` reports the
difference.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import chain
from typing import Callable, Iterator

from .core import ABForm, Composition, format_composition, to_ab
from .oracle import InternalConsistencyError, LinComb, dsr as oracle_dsr
from .oracle import shuffle as oracle_shuffle, stuffle as oracle_stuffle

__all__ = [
    "LEFT_FACTORS",
    "FamilyTerm",
    "PrintCorrection",
    "PRINT_CORRECTIONS",
    "closed_terms",
    "closed_stuffle",
    "closed_shuffle",
    "closed_dsr",
    "DiscrepancyReport",
    "reconcile",
]

LEFT_FACTORS = {
    "1": Composition((1,)),
    "2": Composition((2,)),
    "3": Composition((3,)),
    "21": Composition((2, 1)),
}


@dataclass(frozen=True)
class FamilyTerm:
    """One emitted term: composition, integer coefficient, predicted signature."""

    family: str
    composition: Composition
    coeff: int
    depth: int
    height: int


@dataclass(frozen=True)
class PrintCorrection:
    """A documented defect of the printed statement of one family.

    ``structural`` families change the expansion itself (missing family,
    dropped coefficient); non-structural ones are evident slips whose
    intended reading is pinned down by the statement's own term counts.
    """

    g: str
    side: str
    family: str
    kind: str  # "guard" | "coefficient" | "index-typo" | "missing-family" | "unreadable"
    structural: bool
    note: str


PRINT_CORRECTIONS: tuple[PrintCorrection, ...] = (
    PrintCorrection(
        "2", "shuffle", "00->a,1->a", "guard", False,
        "printed with guard a_i >= 5; the family's own term count "
        "1 + sum a_i(a_i-1)/2 - 1 requires contributions from a_i >= 3 "
        "(e.g. the (3,2) term of (2) shuffle (3))",
    ),
    PrintCorrection(
        "2", "dsr", "00->a,1->a", "guard", False,
        "same a_i >= 5 guard slip inherited by the subtracted form",
    ),
    PrintCorrection(
        "3", "shuffle", "00->b1:3,1->b2", "coefficient", True,
        "printed coefficient b_j2+1; the count of placements of the "
        "inserted 1 in the grown run 1^(b_j2+1) is b_j2+2",
    ),
    PrintCorrection(
        "3", "shuffle", "0->b,0->a1,1->a2", "coefficient", True,
        "printed without the a_i1 multiplicity of the 0 absorbed into "
        "the middle 0-run",
    ),
    PrintCorrection(
        "21", "stuffle", "2->b:3,1->b(same)", "missing-family", True,
        "the same-block double merge (..,1^p,3,1^q,2,1^r,..) is absent "
        "from the printed list; (2,1)*(2,1,1) needs its (2,3,2) term",
    ),
    PrintCorrection(
        "21", "stuffle", "2->front,1->b+1", "missing-family", True,
        "the front-2 with appended 1 family (2,..,1^(b_j+1),..) is absent; "
        "(2,1)*(2) needs coefficient 2 on (2,2,1)",
    ),
    PrintCorrection(
        "21", "stuffle", "2->b:3,1->b+1(same)", "index-typo", True,
        "printed with splits of b_j-1 and coefficient b''+1, which emits "
        "weight w-1 terms; the weight-consistent reading is splits of b_j "
        "with coefficient b''",
    ),
    PrintCorrection(
        "21", "stuffle", "2->b:ins,1->b(same)", "index-typo", True,
        "printed with splits of b_j, which emits weight w+1 terms; the "
        "weight-consistent reading is splits of b_j-1",
    ),
    PrintCorrection(
        "21", "shuffle", "0->a1,1->a1,1->a2", "unreadable", True,
        "printed with a dangling inner sum over a_i2', a_i2''; "
        "reconstructed as splits a'+a''=a_i1+2 times A'+A''=a_i2+1",
    ),
    PrintCorrection(
        "21", "shuffle", "0->b,1->b(same),1->a", "coefficient", True,
        "printed coefficient b''+1; the inserted 1 can also terminate the "
        "new 2, giving b''+2",
    ),
)

def _corrections_for(g: str, side: str) -> dict[str, bool]:
    """family -> structural?  The dsr side inherits both product sides."""
    sides = (side,) if side != "dsr" else ("dsr", "stuffle", "shuffle")
    out: dict[str, bool] = {}
    for c in PRINT_CORRECTIONS:
        if c.g == g and c.side in sides:
            out[c.family] = out.get(c.family, False) or c.structural
    return out


def _seg(a: int, b: int) -> tuple[int, ...]:
    return (a,) + (1,) * b


def _splits2(total: int) -> Iterator[tuple[int, int]]:
    """All (p, q) >= 0 with p + q = total (empty when total < 0)."""
    for p in range(total + 1):
        yield p, total - p


def _splits3(total: int) -> Iterator[tuple[int, int, int]]:
    for p in range(total + 1):
        for q in range(total - p + 1):
            yield p, q, total - p - q


def _asplits(total: int, lo1: int = 2, lo2: int = 2) -> Iterator[tuple[int, int]]:
    """All (a', a'') with a' + a'' = total, a' >= lo1, a'' >= lo2."""
    for a1 in range(lo1, total - lo2 + 1):
        yield a1, total - a1


def _asplits3(total: int) -> Iterator[tuple[int, int, int]]:
    for a1 in range(2, total - 3 + 1):
        for a2 in range(2, total - a1 - 2 + 1):
            yield a1, a2, total - a1 - a2


class _Emitter:
    """Builds terms over the blocks of z with bookkeeping for one family."""

    def __init__(self, blocks: ABForm):
        self.pieces = [_seg(a, b) for a, b in blocks]
        self.a = [a for a, _ in blocks]
        self.b = [b for _, b in blocks]
        self.h = len(blocks)
        self.d = sum(1 + b for b in self.b)
        self.out: list[FamilyTerm] = []
        self._family = ""

    def family(self, name: str) -> "_Emitter":
        self._family = name
        return self

    def emit(self, coeff: int, dd: int, dh: int,
             repl: dict[int, tuple[int, ...]] | None = None,
             front: tuple[int, ...] = (), back: tuple[int, ...] = ()) -> None:
        if coeff == 0:
            return
        parts = list(self.pieces)
        if repl:
            for k, piece in repl.items():
                parts[k] = piece
        comp = Composition(front + tuple(chain.from_iterable(parts)) + back)
        self.out.append(
            FamilyTerm(self._family, comp, coeff, self.d + dd, self.h + dh)
        )

    # piece builders -----------------------------------------------------
    def grown(self, i: int, k: int) -> tuple[int, ...]:
        return (self.a[i] + k,) + (1,) * self.b[i]

    def longer(self, j: int, k: int) -> tuple[int, ...]:
        return _seg(self.a[j], self.b[j] + k)

    def grown_longer(self, i: int, ka: int, kb: int) -> tuple[int, ...]:
        return _seg(self.a[i] + ka, self.b[i] + kb)

    def ins(self, j: int, p: int, v: int, q: int, grow_a: int = 0) -> tuple[int, ...]:
        """Block j with entry v placed in the 1-run: a, 1^p, v, 1^q."""
        return (self.a[j] + grow_a,) + (1,) * p + (v,) + (1,) * q

    def ins2(self, j: int, p: int, v1: int, q: int, v2: int, r: int) -> tuple[int, ...]:
        return (self.a[j],) + (1,) * p + (v1,) + (1,) * q + (v2,) + (1,) * r

    def asplit(self, i: int, a1: int, a2: int) -> tuple[int, ...]:
        return (a1, a2) + (1,) * self.b[i]

    def asplit_pair(self, i: int, a1: int, a2: int) -> tuple[int, ...]:
        return (a1, 1, a2) + (1,) * self.b[i]

    def asplit3(self, i: int, a1: int, a2: int, a3: int) -> tuple[int, ...]:
        return (a1, a2, a3) + (1,) * self.b[i]


# ---------------------------------------------------------------------------
# left factor (1)
# ---------------------------------------------------------------------------

def _stuffle_1(e: _Emitter, printed: bool) -> None:
    for i in range(e.h):
        e.family("1->a").emit(1, 0, 0, {i: e.grown(i, 1)})
    for j in range(e.h):
        e.family("1->b:merge")
        for p, q in _splits2(e.b[j] - 1):
            e.emit(1, 0, 1, {j: e.ins(j, p, 2, q)})
    e.family("1->front").emit(1, 1, 0, front=(1,))  # divergent, cancels in dsr
    for j in range(e.h):
        e.family("1->b:ins").emit(e.b[j] + 1, 1, 0, {j: e.longer(j, 1)})


def _shuffle_1(e: _Emitter, printed: bool) -> None:
    for j in range(e.h):
        e.family("1->b").emit(e.b[j] + 2, 1, 0, {j: e.longer(j, 1)})
    e.family("1->front").emit(1, 1, 0, front=(1,))  # divergent, cancels in dsr
    for i in range(e.h):
        e.family("1->a")
        for a1, a2 in _asplits(e.a[i] + 1):
            e.emit(1, 1, 1, {i: e.asplit(i, a1, a2)})


def _dsr_1(e: _Emitter, printed: bool) -> None:
    for i in range(e.h):
        e.family("-1->a").emit(-1, 0, 0, {i: e.grown(i, 1)})
    for j in range(e.h):
        e.family("-1->b:merge")
        for p, q in _splits2(e.b[j] - 1):
            e.emit(-1, 0, 1, {j: e.ins(j, p, 2, q)})
    for j in range(e.h):
        e.family("1->b").emit(1, 1, 0, {j: e.longer(j, 1)})
    for i in range(e.h):
        e.family("1->a")
        for a1, a2 in _asplits(e.a[i] + 1):
            e.emit(1, 1, 1, {i: e.asplit(i, a1, a2)})


# ---------------------------------------------------------------------------
# left factor (2)
# ---------------------------------------------------------------------------

def _stuffle_2(e: _Emitter, printed: bool) -> None:
    for i in range(e.h):
        e.family("2->a").emit(1, 0, 0, {i: e.grown(i, 2)})
    for j in range(e.h):
        e.family("2->b:merge")
        for p, q in _splits2(e.b[j] - 1):
            e.emit(1, 0, 1, {j: e.ins(j, p, 3, q)})
    e.family("2->front").emit(1, 1, 1, front=(2,))
    for j in range(e.h):
        e.family("2->b:ins")
        for p, q in _splits2(e.b[j]):
            e.emit(1, 1, 1, {j: e.ins(j, p, 2, q)})


def _shuffle_2_families(e: _Emitter, printed: bool, dsr: bool = False) -> None:
    # 0 -> a_i, 1 -> 1-run j (same block allowed)
    for i in range(e.h):
        for j in range(i, e.h):
            e.family("0->a,1->b")
            if i == j:
                e.emit(e.a[i] * (e.b[j] + 2), 1, 0, {i: e.grown_longer(i, 1, 1)})
            else:
                e.emit(e.a[i] * (e.b[j] + 2), 1, 0,
                       {i: e.grown(i, 1), j: e.longer(j, 1)})
    # 0 -> 1-run j1 (new 2), 1 -> 1-run j2
    for j1 in range(e.h):
        for j2 in range(j1 + 1, e.h):
            e.family("0->b1,1->b2")
            for p, q in _splits2(e.b[j1] - 1):
                e.emit(e.b[j2] + 2, 1, 1,
                       {j1: e.ins(j1, p, 2, q), j2: e.longer(j2, 1)})
    # 0 and 1 in the same 1-run
    for j in range(e.h):
        e.family("0->b,1->b(same)")
        for p, q in _splits2(e.b[j]):
            coeff = q if dsr else q + 1
            e.emit(coeff, 1, 1, {j: e.ins(j, p, 2, q)})
    # 0 and 1 in the same 0-run (plus the front unit when not subtracted)
    if not dsr:
        e.family("00->a,1->a").emit(1, 1, 1, front=(2,))
    lo = 5 if printed else 3
    for i in range(e.h):
        e.family("00->a,1->a")
        if e.a[i] < lo:
            continue
        for a1, a2 in _asplits(e.a[i] + 2, lo1=3):
            e.emit(a1 - 1, 1, 1, {i: e.asplit(i, a1, a2)})
    # 0 -> a_i1, 1 -> a_i2
    for i1 in range(e.h):
        for i2 in range(i1 + 1, e.h):
            e.family("0->a1,1->a2")
            for a1, a2 in _asplits(e.a[i2] + 1):
                e.emit(e.a[i1], 1, 1, {i1: e.grown(i1, 1), i2: e.asplit(i2, a1, a2)})
    # 0 -> 1-run j, 1 -> a_i with j < i
    for j in range(e.h):
        for i in range(j + 1, e.h):
            e.family("0->b,1->a")
            for p, q in _splits2(e.b[j] - 1):
                for a1, a2 in _asplits(e.a[i] + 1):
                    e.emit(1, 1, 2, {j: e.ins(j, p, 2, q), i: e.asplit(i, a1, a2)})


def _shuffle_2(e: _Emitter, printed: bool) -> None:
    _shuffle_2_families(e, printed, dsr=False)


def _dsr_2(e: _Emitter, printed: bool) -> None:
    for i in range(e.h):
        e.family("-2->a").emit(-1, 0, 0, {i: e.grown(i, 2)})
    for j in range(e.h):
        e.family("-2->b:merge")
        for p, q in _splits2(e.b[j] - 1):
            e.emit(-1, 0, 1, {j: e.ins(j, p, 3, q)})
    _shuffle_2_families(e, printed, dsr=True)


# ---------------------------------------------------------------------------
# left factor (3)
# ---------------------------------------------------------------------------

def _stuffle_3(e: _Emitter, printed: bool) -> None:
    for i in range(e.h):
        e.family("3->a").emit(1, 0, 0, {i: e.grown(i, 3)})
    for j in range(e.h):
        e.family("3->b:merge")
        for p, q in _splits2(e.b[j] - 1):
            e.emit(1, 0, 1, {j: e.ins(j, p, 4, q)})
    e.family("3->front").emit(1, 1, 1, front=(3,))
    for j in range(e.h):
        e.family("3->b:ins")
        for p, q in _splits2(e.b[j]):
            e.emit(1, 1, 1, {j: e.ins(j, p, 3, q)})


def _shuffle_3(e: _Emitter, printed: bool) -> None:
    a, b, h = e.a, e.b, e.h
    e.family("001->front").emit(1, 1, 1, front=(3,))
    # both 0s and the 1 inside one 0-run
    for i in range(h):
        e.family("00->a,1->a(same)")
        for a1, a2 in _asplits(a[i] + 3, lo1=4):
            e.emit((a1 - 1) * (a1 - 2) // 2, 1, 1, {i: e.asplit(i, a1, a2)})
    # 00 adjacent in a 1-run (new 3), 1 in the same run
    for j in range(h):
        e.family("00->b:3,1->b(same)")
        for p, q in _splits2(b[j]):
            e.emit(q + 1, 1, 1, {j: e.ins(j, p, 3, q)})
    # 00 split in a 1-run (two 2s), 1 in the same run
    for j in range(h):
        e.family("00->b:22,1->b(same)")
        for p, q, r in _splits3(b[j] - 1):
            e.emit(r + 1, 1, 2, {j: e.ins2(j, p, 2, q, 2, r)})
    # both 0s in a_i1, 1 splits a_i2
    for i1 in range(h):
        for i2 in range(i1 + 1, h):
            e.family("00->a1,1->a2")
            for a1, a2 in _asplits(a[i2] + 1):
                e.emit(a[i1] * (a[i1] + 1) // 2, 1, 1,
                       {i1: e.grown(i1, 2), i2: e.asplit(i2, a1, a2)})
    # both 0s in a_i, 1 in 1-run j
    for i in range(h):
        for j in range(i, h):
            e.family("00->a,1->b")
            c = a[i] * (a[i] + 1) // 2 * (b[j] + 2)
            if i == j:
                e.emit(c, 1, 0, {i: e.grown_longer(i, 2, 1)})
            else:
                e.emit(c, 1, 0, {i: e.grown(i, 2), j: e.longer(j, 1)})
    # 00 adjacent in 1-run j (new 3), 1 splits a_i
    for j in range(h):
        for i in range(j + 1, h):
            e.family("00->b:3,1->a")
            for p, q in _splits2(b[j] - 1):
                for a1, a2 in _asplits(a[i] + 1):
                    e.emit(1, 1, 2, {j: e.ins(j, p, 3, q), i: e.asplit(i, a1, a2)})
    # 00 split in 1-run j (two 2s), 1 splits a_i
    for j in range(h):
        for i in range(j + 1, h):
            e.family("00->b:22,1->a")
            for p, q, r in _splits3(b[j] - 2):
                for a1, a2 in _asplits(a[i] + 1):
                    e.emit(1, 1, 3, {j: e.ins2(j, p, 2, q, 2, r), i: e.asplit(i, a1, a2)})
    # 00 adjacent in 1-run j1 (new 3), 1 in 1-run j2
    for j1 in range(h):
        for j2 in range(j1 + 1, h):
            e.family("00->b1:3,1->b2")
            coeff = (b[j2] + 1) if printed else (b[j2] + 2)
            for p, q in _splits2(b[j1] - 1):
                e.emit(coeff, 1, 1, {j1: e.ins(j1, p, 3, q), j2: e.longer(j2, 1)})
    # 00 split in 1-run j1 (two 2s), 1 in 1-run j2
    for j1 in range(h):
        for j2 in range(j1 + 1, h):
            e.family("00->b1:22,1->b2")
            for p, q, r in _splits3(b[j1] - 2):
                e.emit(b[j2] + 2, 1, 2,
                       {j1: e.ins2(j1, p, 2, q, 2, r), j2: e.longer(j2, 1)})
    # 0 -> a_i1, 0 and 1 -> a_i2
    for i1 in range(h):
        for i2 in range(i1 + 1, h):
            e.family("0->a1,0->a2,1->a2")
            for a1, a2 in _asplits(a[i2] + 2, lo1=3):
                e.emit(a[i1] * (a1 - 1), 1, 1,
                       {i1: e.grown(i1, 1), i2: e.asplit(i2, a1, a2)})
    # 0 -> a_i, 0 and 1 in 1-run j
    for i in range(h):
        for j in range(i, h):
            e.family("0->a,0->b,1->b(same)")
            for p, q in _splits2(b[j]):
                if i == j:
                    e.emit(a[i] * (q + 1), 1, 1, {j: e.ins(j, p, 2, q, grow_a=1)})
                else:
                    e.emit(a[i] * (q + 1), 1, 1,
                           {i: e.grown(i, 1), j: e.ins(j, p, 2, q)})
    # 0 -> 1-run j (new 2), 0 and 1 -> a_i
    for j in range(h):
        for i in range(j + 1, h):
            e.family("0->b,0->a,1->a(same)")
            for p, q in _splits2(b[j] - 1):
                for a1, a2 in _asplits(a[i] + 2, lo1=3):
                    e.emit(a1 - 1, 1, 2, {j: e.ins(j, p, 2, q), i: e.asplit(i, a1, a2)})
    # 0 -> 1-run j1 (new 2), 0 and 1 -> 1-run j2
    for j1 in range(h):
        for j2 in range(j1 + 1, h):
            e.family("0->b1,0->b2,1->b2")
            for p1, q1 in _splits2(b[j1] - 1):
                for p2, q2 in _splits2(b[j2]):
                    e.emit(q2 + 1, 1, 2,
                           {j1: e.ins(j1, p1, 2, q1), j2: e.ins(j2, p2, 2, q2)})
    # 0 -> a_i1, 0 -> a_i2, 1 -> a_i3
    for i1 in range(h):
        for i2 in range(i1 + 1, h):
            for i3 in range(i2 + 1, h):
                e.family("0->a1,0->a2,1->a3")
                for a1, a2 in _asplits(a[i3] + 1):
                    e.emit(a[i1] * a[i2], 1, 1,
                           {i1: e.grown(i1, 1), i2: e.grown(i2, 1),
                            i3: e.asplit(i3, a1, a2)})
    # 0 -> a_i1, 0 -> a_i2, 1 -> 1-run j
    for i1 in range(h):
        for i2 in range(i1 + 1, h):
            for j in range(i2, h):
                e.family("0->a1,0->a2,1->b")
                c = a[i1] * a[i2] * (b[j] + 2)
                repl = {i1: e.grown(i1, 1)}
                if i2 == j:
                    repl[i2] = e.grown_longer(i2, 1, 1)
                else:
                    repl[i2] = e.grown(i2, 1)
                    repl[j] = e.longer(j, 1)
                e.emit(c, 1, 0, repl)
    # 0 -> a_i1, 0 -> 1-run j, 1 -> a_i2   (i1 <= j < i2)
    for i1 in range(h):
        for j in range(i1, h):
            for i2 in range(j + 1, h):
                e.family("0->a1,0->b,1->a2")
                for p, q in _splits2(b[j] - 1):
                    for a1, a2 in _asplits(a[i2] + 1):
                        repl = {i2: e.asplit(i2, a1, a2)}
                        if i1 == j:
                            repl[i1] = e.ins(j, p, 2, q, grow_a=1)
                        else:
                            repl[i1] = e.grown(i1, 1)
                            repl[j] = e.ins(j, p, 2, q)
                        e.emit(a[i1], 1, 2, repl)
    # 0 -> a_i, 0 -> 1-run j1, 1 -> 1-run j2   (i <= j1 < j2)
    for i in range(h):
        for j1 in range(i, h):
            for j2 in range(j1 + 1, h):
                e.family("0->a,0->b1,1->b2")
                for p, q in _splits2(b[j1] - 1):
                    repl = {j2: e.longer(j2, 1)}
                    if i == j1:
                        repl[i] = e.ins(j1, p, 2, q, grow_a=1)
                    else:
                        repl[i] = e.grown(i, 1)
                        repl[j1] = e.ins(j1, p, 2, q)
                    e.emit(a[i] * (b[j2] + 2), 1, 1, repl)
    # 0 -> 1-run j (new 2), 0 -> a_i1, 1 -> a_i2   (j < i1 < i2)
    for j in range(h):
        for i1 in range(j + 1, h):
            for i2 in range(i1 + 1, h):
                e.family("0->b,0->a1,1->a2")
                coeff = 1 if printed else a[i1]
                for p, q in _splits2(b[j] - 1):
                    for a1, a2 in _asplits(a[i2] + 1):
                        e.emit(coeff, 1, 2,
                               {j: e.ins(j, p, 2, q), i1: e.grown(i1, 1),
                                i2: e.asplit(i2, a1, a2)})
    # 0 -> 1-run j1 (new 2), 0 -> a_i, 1 -> 1-run j2   (j1 < i <= j2)
    for j1 in range(h):
        for i in range(j1 + 1, h):
            for j2 in range(i, h):
                e.family("0->b1,0->a,1->b2")
                for p, q in _splits2(b[j1] - 1):
                    repl = {j1: e.ins(j1, p, 2, q)}
                    if i == j2:
                        repl[i] = e.grown_longer(i, 1, 1)
                    else:
                        repl[i] = e.grown(i, 1)
                        repl[j2] = e.longer(j2, 1)
                    e.emit(a[i] * (b[j2] + 2), 1, 1, repl)
    # 0 -> 1-run j1, 0 -> 1-run j2, 1 -> a_i   (j1 < j2 < i)
    for j1 in range(h):
        for j2 in range(j1 + 1, h):
            for i in range(j2 + 1, h):
                e.family("0->b1,0->b2,1->a")
                for p1, q1 in _splits2(b[j1] - 1):
                    for p2, q2 in _splits2(b[j2] - 1):
                        for a1, a2 in _asplits(a[i] + 1):
                            e.emit(1, 1, 3,
                                   {j1: e.ins(j1, p1, 2, q1),
                                    j2: e.ins(j2, p2, 2, q2),
                                    i: e.asplit(i, a1, a2)})
    # 0 -> 1-run j1, 0 -> 1-run j2, 1 -> 1-run j3
    for j1 in range(h):
        for j2 in range(j1 + 1, h):
            for j3 in range(j2 + 1, h):
                e.family("0->b1,0->b2,1->b3")
                for p1, q1 in _splits2(b[j1] - 1):
                    for p2, q2 in _splits2(b[j2] - 1):
                        e.emit(b[j3] + 2, 1, 2,
                               {j1: e.ins(j1, p1, 2, q1),
                                j2: e.ins(j2, p2, 2, q2),
                                j3: e.longer(j3, 1)})


def _dsr_3(e: _Emitter, printed: bool) -> None:
    before = len(e.out)
    _stuffle_3(e, printed)
    negated = [
        FamilyTerm("-" + t.family, t.composition, -t.coeff, t.depth, t.height)
        for t in e.out[before:]
    ]
    del e.out[before:]
    e.out.extend(negated)
    _shuffle_3(e, printed)


# ---------------------------------------------------------------------------
# left factor (2,1)
# ---------------------------------------------------------------------------

def _stuffle_21(e: _Emitter, printed: bool) -> None:
    a, b, h = e.a, e.b, e.h
    # both entries merge into entries >= 2
    for i1 in range(h):
        for i2 in range(i1 + 1, h):
            e.family("2->a1,1->a2").emit(
                1, 0, 0, {i1: e.grown(i1, 2), i2: e.grown(i2, 1)})
    # 2 merges into a_i, 1 merges into a one of run j >= i
    for i in range(h):
        for j in range(i, h):
            e.family("2->a,1->b")
            for p, q in _splits2(b[j] - 1):
                if i == j:
                    e.emit(1, 0, 1, {j: e.ins(j, p, 2, q, grow_a=2)})
                else:
                    e.emit(1, 0, 1, {i: e.grown(i, 2), j: e.ins(j, p, 2, q)})
    # 2 merges into a one of run j (3), 1 merges into a_i, j < i
    for j in range(h):
        for i in range(j + 1, h):
            e.family("2->b:3,1->a")
            for p, q in _splits2(b[j] - 1):
                e.emit(1, 0, 1, {j: e.ins(j, p, 3, q), i: e.grown(i, 1)})
    # both merge into ones of distinct runs
    for j1 in range(h):
        for j2 in range(j1 + 1, h):
            e.family("2->b1:3,1->b2")
            for p1, q1 in _splits2(b[j1] - 1):
                for p2, q2 in _splits2(b[j2] - 1):
                    e.emit(1, 0, 2,
                           {j1: e.ins(j1, p1, 3, q1), j2: e.ins(j2, p2, 2, q2)})
    # both merge into ones of the same run (missing from the printed list)
    if not printed:
        for j in range(h):
            e.family("2->b:3,1->b(same)")
            for p, q, r in _splits3(b[j] - 2):
                e.emit(1, 0, 2, {j: e.ins2(j, p, 3, q, 2, r)})
    # 2 merges into a_i, 1 inserted in run j >= i
    for i in range(h):
        for j in range(i, h):
            e.family("2->a,1->b:ins")
            if i == j:
                e.emit(b[j] + 1, 1, 0, {i: e.grown_longer(i, 2, 1)})
            else:
                e.emit(b[j] + 1, 1, 0, {i: e.grown(i, 2), j: e.longer(j, 1)})
    # 2 merges into a one of run j1 (3), 1 inserted in run j2 > j1
    for j1 in range(h):
        for j2 in range(j1 + 1, h):
            e.family("2->b1:3,1->b2:ins")
            for p, q in _splits2(b[j1] - 1):
                e.emit(b[j2] + 1, 1, 1,
                       {j1: e.ins(j1, p, 3, q), j2: e.longer(j2, 1)})
    # 2 merges into a one of run j (3), 1 inserted after it in the same run
    # (printed with an index slip that breaks the weight)
    if not printed:
        for j in range(h):
            e.family("2->b:3,1->b+1(same)")
            for p, q in _splits2(b[j]):
                e.emit(q, 1, 1, {j: e.ins(j, p, 3, q)})
    # 2 inserted at the front, 1 merges into a_i
    for i in range(h):
        e.family("2->front,1->a").emit(1, 1, 1, {i: e.grown(i, 1)}, front=(2,))
    # 2 inserted in run j, 1 merges into a_i, j < i
    for j in range(h):
        for i in range(j + 1, h):
            e.family("2->b:ins,1->a")
            for p, q in _splits2(b[j]):
                e.emit(1, 1, 1, {j: e.ins(j, p, 2, q), i: e.grown(i, 1)})
    # 2 inserted at the front, 1 merges into a one of run j
    for j in range(h):
        e.family("2->front,1->b")
        for p, q in _splits2(b[j] - 1):
            e.emit(1, 1, 2, {j: e.ins(j, p, 2, q)}, front=(2,))
    # 2 inserted in run j1, 1 merges into a one of run j2 > j1
    for j1 in range(h):
        for j2 in range(j1 + 1, h):
            e.family("2->b1:ins,1->b2")
            for p1, q1 in _splits2(b[j1]):
                for p2, q2 in _splits2(b[j2] - 1):
                    e.emit(1, 1, 2,
                           {j1: e.ins(j1, p1, 2, q1), j2: e.ins(j2, p2, 2, q2)})
    # 2 inserted in run j, 1 merges into a one after it in the same run
    # (printed with an index slip that breaks the weight)
    if not printed:
        for j in range(h):
            e.family("2->b:ins,1->b(same)")
            for p, q, r in _splits3(b[j] - 1):
                e.emit(1, 1, 2, {j: e.ins2(j, p, 2, q, 2, r)})
    # the unit (2,1) at the front
    e.family("21->front").emit(1, 2, 1, front=(2, 1))
    # 2 inserted at the front, 1 inserted in run j (missing from print)
    if not printed:
        for j in range(h):
            e.family("2->front,1->b+1").emit(
                b[j] + 1, 2, 1, {j: e.longer(j, 1)}, front=(2,))
    # 2 inserted in run j, 1 inserted after it in the same run
    for j in range(h):
        e.family("2->b:ins,1->b+1(same)")
        for p, q in _splits2(b[j]):
            e.emit(q + 1, 2, 1, {j: e.ins(j, p, 2, q + 1)})
    # 2 inserted in run j1, 1 inserted in run j2 > j1
    for j1 in range(h):
        for j2 in range(j1 + 1, h):
            e.family("2->b1:ins,1->b2:ins")
            for p, q in _splits2(b[j1]):
                e.emit(b[j2] + 1, 2, 1,
                       {j1: e.ins(j1, p, 2, q), j2: e.longer(j2, 1)})


def _shuffle_21(e: _Emitter, printed: bool) -> None:
    a, b, h = e.a, e.b, e.h
    # 0 and the adjacent 11 inside one 0-run
    for i in range(h):
        e.family("0->a,11->a(pair)")
        for a1, a2 in _asplits(a[i] + 2):
            e.emit(a1 - 1, 2, 1, {i: e.asplit_pair(i, a1, a2)})
    # 0 and both 1s split one 0-run twice
    for i in range(h):
        e.family("0->a,1->a,1->a(same)")
        for a1, a2, a3 in _asplits3(a[i] + 3):
            e.emit(a1 - 1, 2, 2, {i: e.asplit3(i, a1, a2, a3)})
    # 0 in 1-run j (new 2), both 1s after it in the same run
    for j in range(h):
        e.family("0->b,11->b(same)")
        for p, q in _splits2(b[j] - 1):
            e.emit((q + 3) * (q + 2) // 2, 2, 1, {j: e.ins(j, p, 2, q + 2)})
    # 0 and one 1 split a_i1, the other 1 splits a_i2 (the printed inner
    # sums dangle, so this family is reconstructed; absent as printed)
    if not printed:
        for i1 in range(h):
            for i2 in range(i1 + 1, h):
                e.family("0->a1,1->a1,1->a2")
                for a1, a2 in _asplits(a[i1] + 2):
                    for A1, A2 in _asplits(a[i2] + 1):
                        e.emit(a1 - 1, 2, 2,
                               {i1: e.asplit(i1, a1, a2), i2: e.asplit(i2, A1, A2)})
    # 0 and one 1 split a_i, the other 1 in 1-run j >= i
    for i in range(h):
        for j in range(i, h):
            e.family("0->a,1->a,1->b")
            for a1, a2 in _asplits(a[i] + 2):
                if i == j:
                    e.emit((a1 - 1) * (b[j] + 2), 2, 1,
                           {i: (a1, a2) + (1,) * (b[i] + 1)})
                else:
                    e.emit((a1 - 1) * (b[j] + 2), 2, 1,
                           {i: e.asplit(i, a1, a2), j: e.longer(j, 1)})
    # 0 in 1-run j (new 2), one 1 after it, the other splits a_i > j
    for j in range(h):
        for i in range(j + 1, h):
            e.family("0->b,1->b(same),1->a")
            coeff_shift = 1 if printed else 2
            for p, q in _splits2(b[j] - 1):
                for a1, a2 in _asplits(a[i] + 1):
                    e.emit(q + coeff_shift, 2, 2,
                           {j: e.ins(j, p, 2, q + 1), i: e.asplit(i, a1, a2)})
    # 0 in 1-run j1 (new 2), one 1 after it, the other in 1-run j2
    for j1 in range(h):
        for j2 in range(j1 + 1, h):
            e.family("0->b1,1->b1(same),1->b2")
            for p, q in _splits2(b[j1] - 1):
                e.emit((q + 2) * (b[j2] + 2), 2, 1,
                       {j1: e.ins(j1, p, 2, q + 1), j2: e.longer(j2, 1)})
    # 0 into a_i1, adjacent 11 inside a_i2
    for i1 in range(h):
        for i2 in range(i1 + 1, h):
            e.family("0->a1,11->a2(pair)")
            for a1, a2 in _asplits(a[i2] + 1):
                e.emit(a[i1], 2, 1,
                       {i1: e.grown(i1, 1), i2: e.asplit_pair(i2, a1, a2)})
    # 0 into a_i1, both 1s split a_i2 twice
    for i1 in range(h):
        for i2 in range(i1 + 1, h):
            e.family("0->a1,1->a2,1->a2")
            for a1, a2, a3 in _asplits3(a[i2] + 2):
                e.emit(a[i1], 2, 2,
                       {i1: e.grown(i1, 1), i2: e.asplit3(i2, a1, a2, a3)})
    # 0 into a_i, both 1s into 1-run j >= i
    for i in range(h):
        for j in range(i, h):
            e.family("0->a,1->b,1->b(same)")
            c = a[i] * (b[j] + 3) * (b[j] + 2) // 2
            if i == j:
                e.emit(c, 2, 0, {i: e.grown_longer(i, 1, 2)})
            else:
                e.emit(c, 2, 0, {i: e.grown(i, 1), j: e.longer(j, 2)})
    # 0 in 1-run j (new 2), adjacent 11 inside a_i > j
    for j in range(h):
        for i in range(j + 1, h):
            e.family("0->b,11->a(pair)")
            for p, q in _splits2(b[j] - 1):
                for a1, a2 in _asplits(a[i] + 1):
                    e.emit(1, 2, 2,
                           {j: e.ins(j, p, 2, q), i: e.asplit_pair(i, a1, a2)})
    # 0 in 1-run j (new 2), both 1s split a_i > j twice
    for j in range(h):
        for i in range(j + 1, h):
            e.family("0->b,1->a,1->a")
            for p, q in _splits2(b[j] - 1):
                for a1, a2, a3 in _asplits3(a[i] + 2):
                    e.emit(1, 2, 3,
                           {j: e.ins(j, p, 2, q), i: e.asplit3(i, a1, a2, a3)})
    # 0 in 1-run j1 (new 2), both 1s into 1-run j2
    for j1 in range(h):
        for j2 in range(j1 + 1, h):
            e.family("0->b1,1->b2,1->b2")
            for p, q in _splits2(b[j1] - 1):
                e.emit((b[j2] + 3) * (b[j2] + 2) // 2, 2, 1,
                       {j1: e.ins(j1, p, 2, q), j2: e.longer(j2, 2)})
    # 0 into a_i1, 1 splits a_i2, 1 splits a_i3
    for i1 in range(h):
        for i2 in range(i1 + 1, h):
            for i3 in range(i2 + 1, h):
                e.family("0->a1,1->a2,1->a3")
                for a1, a2 in _asplits(a[i2] + 1):
                    for A1, A2 in _asplits(a[i3] + 1):
                        e.emit(a[i1], 2, 2,
                               {i1: e.grown(i1, 1), i2: e.asplit(i2, a1, a2),
                                i3: e.asplit(i3, A1, A2)})
    # 0 into a_i1, 1 splits a_i2, 1 into 1-run j >= i2
    for i1 in range(h):
        for i2 in range(i1 + 1, h):
            for j in range(i2, h):
                e.family("0->a1,1->a2,1->b")
                for a1, a2 in _asplits(a[i2] + 1):
                    repl = {i1: e.grown(i1, 1)}
                    if i2 == j:
                        repl[i2] = (a1, a2) + (1,) * (b[i2] + 1)
                    else:
                        repl[i2] = e.asplit(i2, a1, a2)
                        repl[j] = e.longer(j, 1)
                    e.emit(a[i1] * (b[j] + 2), 2, 1, repl)
    # 0 into a_i1, 1 into 1-run j, 1 splits a_i2   (i1 <= j < i2)
    for i1 in range(h):
        for j in range(i1, h):
            for i2 in range(j + 1, h):
                e.family("0->a1,1->b,1->a2")
                for a1, a2 in _asplits(a[i2] + 1):
                    repl = {i2: e.asplit(i2, a1, a2)}
                    if i1 == j:
                        repl[i1] = e.grown_longer(i1, 1, 1)
                    else:
                        repl[i1] = e.grown(i1, 1)
                        repl[j] = e.longer(j, 1)
                    e.emit(a[i1] * (b[j] + 2), 2, 1, repl)
    # 0 into a_i, 1 into 1-run j1, 1 into 1-run j2   (i <= j1 < j2)
    for i in range(h):
        for j1 in range(i, h):
            for j2 in range(j1 + 1, h):
                e.family("0->a,1->b1,1->b2")
                repl = {j2: e.longer(j2, 1)}
                if i == j1:
                    repl[i] = e.grown_longer(i, 1, 1)
                else:
                    repl[i] = e.grown(i, 1)
                    repl[j1] = e.longer(j1, 1)
                e.emit(a[i] * (b[j1] + 2) * (b[j2] + 2), 2, 0, repl)
    # 0 in 1-run j (new 2), 1 splits a_i1, 1 splits a_i2   (j < i1 < i2)
    for j in range(h):
        for i1 in range(j + 1, h):
            for i2 in range(i1 + 1, h):
                e.family("0->b,1->a1,1->a2")
                for p, q in _splits2(b[j] - 1):
                    for a1, a2 in _asplits(a[i1] + 1):
                        for A1, A2 in _asplits(a[i2] + 1):
                            e.emit(1, 2, 3,
                                   {j: e.ins(j, p, 2, q),
                                    i1: e.asplit(i1, a1, a2),
                                    i2: e.asplit(i2, A1, A2)})
    # 0 in 1-run j1 (new 2), 1 splits a_i, 1 into 1-run j2   (j1 < i <= j2)
    for j1 in range(h):
        for i in range(j1 + 1, h):
            for j2 in range(i, h):
                e.family("0->b1,1->a,1->b2")
                for p, q in _splits2(b[j1] - 1):
                    for a1, a2 in _asplits(a[i] + 1):
                        repl = {j1: e.ins(j1, p, 2, q)}
                        if i == j2:
                            repl[i] = (a1, a2) + (1,) * (b[i] + 1)
                        else:
                            repl[i] = e.asplit(i, a1, a2)
                            repl[j2] = e.longer(j2, 1)
                        e.emit(b[j2] + 2, 2, 2, repl)
    # 0 in 1-run j1 (new 2), 1 into 1-run j2, 1 splits a_i   (j1 < j2 < i)
    for j1 in range(h):
        for j2 in range(j1 + 1, h):
            for i in range(j2 + 1, h):
                e.family("0->b1,1->b2,1->a")
                for p, q in _splits2(b[j1] - 1):
                    for a1, a2 in _asplits(a[i] + 1):
                        e.emit(b[j2] + 2, 2, 2,
                               {j1: e.ins(j1, p, 2, q), j2: e.longer(j2, 1),
                                i: e.asplit(i, a1, a2)})
    # 0 in 1-run j1 (new 2), 1 into 1-run j2, 1 into 1-run j3
    for j1 in range(h):
        for j2 in range(j1 + 1, h):
            for j3 in range(j2 + 1, h):
                e.family("0->b1,1->b2,1->b3")
                for p, q in _splits2(b[j1] - 1):
                    e.emit((b[j2] + 2) * (b[j3] + 2), 2, 1,
                           {j1: e.ins(j1, p, 2, q), j2: e.longer(j2, 1),
                            j3: e.longer(j3, 1)})
    # the unit (2,1) appended at the very end
    e.family("011->end").emit(1, 2, 1, back=(2, 1))


def _dsr_21(e: _Emitter, printed: bool) -> None:
    before = len(e.out)
    _stuffle_21(e, printed)
    negated = [
        FamilyTerm("-" + t.family, t.composition, -t.coeff, t.depth, t.height)
        for t in e.out[before:]
    ]
    del e.out[before:]
    e.out.extend(negated)
    _shuffle_21(e, printed)


_GENERATORS: dict[tuple[str, str], Callable[[_Emitter, bool], None]] = {
    ("1", "stuffle"): _stuffle_1,
    ("1", "shuffle"): _shuffle_1,
    ("1", "dsr"): _dsr_1,
    ("2", "stuffle"): _stuffle_2,
    ("2", "shuffle"): _shuffle_2,
    ("2", "dsr"): _dsr_2,
    ("3", "stuffle"): _stuffle_3,
    ("3", "shuffle"): _shuffle_3,
    ("3", "dsr"): _dsr_3,
    ("21", "stuffle"): _stuffle_21,
    ("21", "shuffle"): _shuffle_21,
    ("21", "dsr"): _dsr_21,
}


def _blocks_of(z) -> ABForm:
    if isinstance(z, ABForm):
        return z
    if not isinstance(z, Composition):
        z = Composition(z)
    return to_ab(z)


def closed_terms(g: str, side: str, z, variant: str = "corrected") -> list[FamilyTerm]:
    """All family terms of the closed expansion, with predicted signatures.

    ``variant="printed"`` follows the defective source text wherever it is
    evaluable (unreadable or weight-breaking families are simply absent
    there; see PRINT_CORRECTIONS).
    """
    if g not in LEFT_FACTORS:
        raise ValueError(f"unknown left factor key {g!r}; use one of 1, 2, 3, 21")
    if (g, side) not in _GENERATORS:
        raise ValueError(f"unknown side {side!r}; use stuffle, shuffle or dsr")
    if variant not in ("corrected", "printed"):
        raise ValueError(f"unknown variant {variant!r}")
    e = _Emitter(_blocks_of(z))
    _GENERATORS[(g, side)](e, variant == "printed")
    return e.out


def _sum_terms(terms: list[FamilyTerm]) -> LinComb:
    out: dict[Composition, Fraction] = {}
    for t in terms:
        s = out.get(t.composition, Fraction(0)) + t.coeff
        if s:
            out[t.composition] = s
        else:
            out.pop(t.composition, None)
    return LinComb(out)


def closed_stuffle(g: str, z, variant: str = "corrected") -> LinComb:
    """Closed quasi-shuffle product of the left factor ``g`` with z."""
    return _sum_terms(closed_terms(g, "stuffle", z, variant))


def closed_shuffle(g: str, z, variant: str = "corrected") -> LinComb:
    """Closed shuffle product of the left factor ``g`` with z."""
    return _sum_terms(closed_terms(g, "shuffle", z, variant))


def closed_dsr(g: str, z, variant: str = "corrected") -> LinComb:
    """Closed relation body shuffle - stuffle; never contains a divergent term."""
    out = _sum_terms(closed_terms(g, "dsr", z, variant))
    if variant == "corrected" and out.has_divergent():
        raise InternalConsistencyError(
            f"divergent residue in closed dsr (g={g}, z={format_composition(Composition(z))})"
        )
    return out


# ---------------------------------------------------------------------------
# reconciliation against the brute-force products
# ---------------------------------------------------------------------------

@dataclass
class DiscrepancyReport:
    """Closed form vs oracle for one right factor.

    ``missing``/``extra``/``mismatched`` compare the shipped (corrected)
    closed form against the oracle and are empty in a passing build.
    ``beyond_printed`` is what the corrections add relative to the printed
    text; ``corrections_engaged`` names the corrected families that
    actually fired on this input.
    """

    g: str
    side: str
    z: Composition
    missing: dict[Composition, Fraction] = field(default_factory=dict)
    extra: dict[Composition, Fraction] = field(default_factory=dict)
    mismatched: dict[Composition, tuple[Fraction, Fraction]] = field(default_factory=dict)
    corrections_engaged: list[str] = field(default_factory=list)
    beyond_printed: dict[Composition, Fraction] = field(default_factory=dict)
    verdict: str = "exact"

    def as_dict(self) -> dict:
        def comb(d):
            return [
                {"composition": list(t), "coeff": {"num": str(c.numerator), "den": str(c.denominator)}}
                for t, c in sorted(d.items())
            ]

        return {
            "g": self.g,
            "side": self.side,
            "z": list(self.z),
            "verdict": self.verdict,
            "missing": comb(self.missing),
            "extra": comb(self.extra),
            "mismatched": [
                {
                    "composition": list(t),
                    "closed": {"num": str(a.numerator), "den": str(a.denominator)},
                    "oracle": {"num": str(b.numerator), "den": str(b.denominator)},
                }
                for t, (a, b) in sorted(self.mismatched.items())
            ],
            "corrections_engaged": sorted(self.corrections_engaged),
            "beyond_printed": comb(self.beyond_printed),
        }


def _oracle_product(g: str, side: str, z: Composition) -> LinComb:
    gc = LEFT_FACTORS[g]
    if side == "stuffle":
        return oracle_stuffle(gc, z)
    if side == "shuffle":
        return oracle_shuffle(gc, z)
    return oracle_dsr(gc, z)


def reconcile_one(g: str, side: str, z) -> DiscrepancyReport:
    """Compare the shipped closed form against the oracle for one z."""
    z = z if isinstance(z, Composition) else Composition(z)
    shipped = _sum_terms(closed_terms(g, side, z, "corrected"))
    printed = _sum_terms(closed_terms(g, side, z, "printed"))
    target = _oracle_product(g, side, z)
    rep = DiscrepancyReport(g=g, side=side, z=z)
    for t, c in target.items():
        got = shipped[t]
        if got == 0:
            rep.missing[t] = c
        elif got != c:
            rep.mismatched[t] = (got, c)
    for t, c in shipped.items():
        if target[t] == 0:
            rep.extra[t] = c
    rep.beyond_printed = (shipped - printed).terms()
    corrected_here = _corrections_for(g, side)
    if corrected_here:
        by_family_c: dict[str, dict] = {}
        by_family_p: dict[str, dict] = {}
        for variant, acc in (("corrected", by_family_c), ("printed", by_family_p)):
            for t in closed_terms(g, side, z, variant):
                base = t.family[1:] if t.family.startswith("-") else t.family
                if base in corrected_here:
                    fam = acc.setdefault(base, {})
                    fam[t.composition] = fam.get(t.composition, 0) + t.coeff
        for fam in corrected_here:
            if by_family_c.get(fam, {}) != by_family_p.get(fam, {}):
                rep.corrections_engaged.append(fam)
    clean = not (rep.missing or rep.extra or rep.mismatched)
    structural = any(corrected_here[fam] for fam in rep.corrections_engaged)
    rep.verdict = ("exact" if not structural else "reconciled") if clean else "mismatch"
    return rep


RECONCILE_WEIGHT_CAP = 16  # the sweep is exponential in the weight


def reconcile(g: str, side: str, max_weight: int = 12) -> list[DiscrepancyReport]:
    """Sweep all convergent z with weight(z) + weight(g) <= max_weight."""
    from .ordering import enumerate_weight

    if max_weight > RECONCILE_WEIGHT_CAP:
        raise ValueError(
            f"max_weight {max_weight} exceeds the configured cap {RECONCILE_WEIGHT_CAP}"
        )
    gw = LEFT_FACTORS[g].weight
    reports = []
    for wz in range(2, max_weight - gw + 1):
        for z in enumerate_weight(wz):
            reports.append(reconcile_one(g, side, z))
    return reports
