"""Total ordering on convergent polyzetas of one fixed weight.

Smaller means: smaller depth; then smaller height; then larger 1-placement
vector (b_1,...,b_h) under reverse-lexicographic order; then larger
a-vector (a_1,...,a_h) under plain lexicographic order.  The four-stage
key is injective on a fixed weight, so this is a total order.
"""

from __future__ import annotations

import threading
from typing import Sequence

from .core import Composition, NotConvergentError, compositions_of, to_ab

__all__ = ["order_key", "compare", "enumerate_weight", "index_of"]

LESS, EQUAL, GREATER = -1, 0, 1


def order_key(c: Composition) -> tuple:
    """Sort key realizing the fixed-weight order (ascending)."""
    f = to_ab(c)
    avec = tuple(a for a, _ in f)
    bvec = tuple(b for _, b in f)
    # revlex-descending on b == lex-ascending on negated reversed b;
    # lex-descending on a == lex-ascending on negated a.
    return (
        c.depth,
        c.height,
        tuple(-b for b in reversed(bvec)),
        tuple(-a for a in avec),
    )


def compare(c1: Composition, c2: Composition) -> int:
    """Return -1, 0 or 1; only defined between equal weights."""
    if not isinstance(c1, Composition):
        c1 = Composition(c1)
    if not isinstance(c2, Composition):
        c2 = Composition(c2)
    if c1.weight != c2.weight:
        raise ValueError(
            f"cannot compare polyzetas of different weights "
            f"({c1.weight} vs {c2.weight})"
        )
    k1, k2 = order_key(c1), order_key(c2)
    if k1 < k2:
        return LESS
    if k1 > k2:
        return GREATER
    return EQUAL


_enum_cache: dict[int, tuple[Composition, ...]] = {}
_index_cache: dict[int, dict[Composition, int]] = {}
_cache_lock = threading.Lock()


def enumerate_weight(w: int) -> Sequence[Composition]:
    """All 2^(w-2) convergent compositions of weight w, strictly increasing.

    Memoized per weight; the fill is idempotent so concurrent callers are
    safe.
    """
    if w < 2:
        raise ValueError(f"no convergent polyzetas of weight {w} (need w >= 2)")
    got = _enum_cache.get(w)
    if got is None:
        ordered = tuple(sorted(compositions_of(w, min_first=2), key=order_key))
        with _cache_lock:
            got = _enum_cache.setdefault(w, ordered)
    return got


def index_of(c: Composition) -> int:
    """0-based position of c in the enumeration of its weight."""
    if not isinstance(c, Composition):
        c = Composition(c)
    if not c.convergent():
        raise NotConvergentError(f"index_of: {c} is not convergent")
    w = c.weight
    table = _index_cache.get(w)
    if table is None:
        table = {z: i for i, z in enumerate(enumerate_weight(w))}
        with _cache_lock:
            table = _index_cache.setdefault(w, table)
    return table[c]
