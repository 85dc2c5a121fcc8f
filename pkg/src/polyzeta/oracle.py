"""Ground-truth products: quasi-shuffle on compositions, shuffle on words.

These are the standard inductive recursions, memoized, and extended
bilinearly to formal rational combinations.  Everything else in the
package is validated against them.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator, Mapping

from .core import Composition, Word, decode_word, encode_word, format_composition

__all__ = ["LinComb", "InternalConsistencyError", "stuffle", "shuffle_words", "shuffle", "dsr"]


class InternalConsistencyError(AssertionError):
    """A structural guarantee was violated (e.g. a divergent residue)."""


class LinComb:
    """A finite formal sum of terms with exact rational coefficients.

    Terms are Compositions (or Words for the word-level shuffle); all
    terms of one combination share a single weight.  Zero coefficients
    are never stored.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping | Iterable[tuple] | None = None):
        data: dict = {}
        if terms:
            items = terms.items() if isinstance(terms, Mapping) else terms
            for t, c in items:
                c = Fraction(c)
                if c:
                    data[t] = data.get(t, Fraction(0)) + c
                    if not data[t]:
                        del data[t]
        self._terms = data
        self._check_weights()

    def _check_weights(self) -> None:
        weights = {t.weight for t in self._terms}
        if len(weights) > 1:
            raise ValueError(f"mixed weights in one combination: {sorted(weights)}")

    @property
    def weight(self) -> int | None:
        for t in self._terms:
            return t.weight
        return None

    def items(self) -> Iterator[tuple]:
        return iter(self._terms.items())

    def terms(self) -> dict:
        return dict(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __getitem__(self, term) -> Fraction:
        return self._terms.get(term, Fraction(0))

    def __eq__(self, other) -> bool:
        if not isinstance(other, LinComb):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def __add__(self, other: "LinComb") -> "LinComb":
        out = dict(self._terms)
        for t, c in other._terms.items():
            s = out.get(t, Fraction(0)) + c
            if s:
                out[t] = s
            else:
                out.pop(t, None)
        return LinComb(out)

    def __sub__(self, other: "LinComb") -> "LinComb":
        return self + (-other)

    def __neg__(self) -> "LinComb":
        return LinComb({t: -c for t, c in self._terms.items()})

    def __rmul__(self, scalar) -> "LinComb":
        scalar = Fraction(scalar)
        if not scalar:
            return LinComb()
        return LinComb({t: scalar * c for t, c in self._terms.items()})

    def mass(self) -> Fraction:
        """Total coefficient mass (sum of coefficients)."""
        return sum(self._terms.values(), Fraction(0))

    def has_divergent(self) -> bool:
        """True iff some term is a non-convergent composition."""
        return any(
            isinstance(t, Composition) and not t.convergent() for t in self._terms
        )

    def divergent_part(self) -> "LinComb":
        return LinComb(
            {
                t: c
                for t, c in self._terms.items()
                if isinstance(t, Composition) and not t.convergent()
            }
        )

    def sorted_items(self) -> list[tuple]:
        """Items with convergent terms first in the fixed-weight order."""
        from .ordering import order_key

        def key(item):
            t = item[0]
            if isinstance(t, Composition):
                if t.convergent():
                    return (0,) + order_key(t)
                return (1, tuple(t))
            return (2, str(t))

        return sorted(self._terms.items(), key=key)

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        chunks = []
        for t, c in self.sorted_items():
            label = f"({format_composition(t)})" if isinstance(t, Composition) else str(t)
            if c == 1:
                chunk = label
            elif c == -1:
                chunk = f"-{label}"
            else:
                chunk = f"{c}*{label}"
            chunks.append(chunk)
        out = chunks[0]
        for chunk in chunks[1:]:
            out += f" - {chunk[1:]}" if chunk.startswith("-") else f" + {chunk}"
        return out

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"LinComb({self._terms!r})"


@lru_cache(maxsize=None)
def _stuffle(x: tuple, y: tuple) -> tuple[tuple[tuple, int], ...]:
    if not x:
        return ((y, 1),)
    if not y:
        return ((x, 1),)
    if x > y:  # commutative; canonical argument order for the cache
        x, y = y, x
    out: dict[tuple, int] = {}
    for rest, c in _stuffle(x[1:], y):
        t = (x[0],) + rest
        out[t] = out.get(t, 0) + c
    for rest, c in _stuffle(x, y[1:]):
        t = (y[0],) + rest
        out[t] = out.get(t, 0) + c
    for rest, c in _stuffle(x[1:], y[1:]):
        t = (x[0] + y[0],) + rest
        out[t] = out.get(t, 0) + c
    return tuple(out.items())


@lru_cache(maxsize=None)
def _shuffle_words(u: str, v: str) -> tuple[tuple[str, int], ...]:
    if not u:
        return ((v, 1),)
    if not v:
        return ((u, 1),)
    if u > v:
        u, v = v, u
    out: dict[str, int] = {}
    for rest, c in _shuffle_words(u[1:], v):
        t = u[0] + rest
        out[t] = out.get(t, 0) + c
    for rest, c in _shuffle_words(u, v[1:]):
        t = v[0] + rest
        out[t] = out.get(t, 0) + c
    return tuple(out.items())


def _as_lincomb(x) -> LinComb:
    if isinstance(x, LinComb):
        return x
    if isinstance(x, Composition):
        return LinComb({x: 1})
    return LinComb({Composition(x): 1})


def stuffle(x, y) -> LinComb:
    """Quasi-shuffle product of compositions, extended bilinearly."""
    lx, ly = _as_lincomb(x), _as_lincomb(y)
    out: dict[Composition, Fraction] = {}
    for tx, cx in lx.items():
        for ty, cy in ly.items():
            c = cx * cy
            for t, n in _stuffle(tuple(tx), tuple(ty)):
                key = Composition(t)
                s = out.get(key, Fraction(0)) + c * n
                if s:
                    out[key] = s
                else:
                    out.pop(key, None)
    return LinComb(out)


def shuffle_words(u: Word, v: Word) -> LinComb:
    """Shuffle product of binary words; coefficient mass C(|u|+|v|, |u|)."""
    if not isinstance(u, Word):
        u = Word(u)
    if not isinstance(v, Word):
        v = Word(v)
    return LinComb({Word(t): c for t, c in _shuffle_words(str(u), str(v))})


_ONE = Composition((1,))


def _shuffle_encode(c: Composition) -> Word:
    # (1) is the single-letter word "1"; anything else must be convergent
    if c == _ONE:
        return Word("1")
    return encode_word(c)


def shuffle(x, y) -> LinComb:
    """Shuffle product on compositions via the word encoding.

    Both factors must be convergent, except that the factor (1) is
    allowed (encoded as the bare word "1"); its products carry one
    divergent term that regularization cancels.
    """
    lx, ly = _as_lincomb(x), _as_lincomb(y)
    out: dict[Composition, Fraction] = {}
    for tx, cx in lx.items():
        for ty, cy in ly.items():
            c = cx * cy
            wu, wv = _shuffle_encode(tx), _shuffle_encode(ty)
            for wt, n in _shuffle_words(str(wu), str(wv)):
                try:
                    key = decode_word(wt)
                except ValueError as exc:  # unreachable: inputs end in 1
                    raise InternalConsistencyError(str(exc)) from exc
                s = out.get(key, Fraction(0)) + c * n
                if s:
                    out[key] = s
                else:
                    out.pop(key, None)
    return LinComb(out)


def dsr(g, z) -> LinComb:
    """Double-shuffle relation body: shuffle(g, z) - stuffle(g, z).

    For g = (1) the single divergent term must cancel exactly; a residue
    is an internal error, never a value.
    """
    g = g if isinstance(g, Composition) else Composition(g)
    z = z if isinstance(z, Composition) else Composition(z)
    if not z.convergent():
        raise ValueError(f"dsr: z must be convergent, got {format_composition(z)}")
    out = shuffle(g, z) - stuffle(g, z)
    if out.has_divergent():
        raise InternalConsistencyError(
            f"divergent residue in dsr({format_composition(g)}, "
            f"{format_composition(z)}): {out.divergent_part()}"
        )
    return out
