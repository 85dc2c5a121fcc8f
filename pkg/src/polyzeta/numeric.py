"""Floating-point evaluation of convergent polyzetas.

The nested sum is evaluated by dynamic programming over the summation
variable (cost linear in the cutoff times the depth), with the cutoff
doubled until successive estimates stabilize.  A first-order integral
tail correction is added to the partial sum, and the reported
tail_estimate heuristically bounds what the correction cannot see.
Tolerances below 1e-9 are out of contract.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass

import numpy as np

from .core import Composition, format_composition

__all__ = ["EvalResult", "ToleranceUnreachable", "eval_mzv", "eval_lincomb"]

_CHUNK = 1 << 20
_EPS = float(np.finfo(float).eps)


@dataclass(frozen=True)
class EvalResult:
    value: float
    tail_estimate: float
    terms_used: int


class ToleranceUnreachable(RuntimeError):
    """The cutoff cap was hit first; carries the best-effort result."""

    def __init__(self, message: str, best: EvalResult):
        super().__init__(message)
        self.best = best


def _partial_sums(s: tuple[int, ...], n_max: int) -> tuple[float, float]:
    """Return (S_1(N), S_2(N)) for the nested sum with exponents s.

    S_k(n) sums the inner (k..d)-fold nested tail over outermost index
    <= n; S_2 is the factor multiplying the outermost power (1 when the
    depth is 1).  Processed in chunks so memory stays bounded.
    """
    d = len(s)
    carry = [0.0] * (d + 2)  # carry[k] = S_k at the last processed index
    carry[d + 1] = 1.0
    lo = 0
    while lo < n_max:
        hi = min(lo + _CHUNK, n_max)
        n = np.arange(lo + 1, hi + 1, dtype=np.float64)
        # shifted[k] holds S_{k+1}(n-1) for the current chunk
        shifted = np.full(hi - lo, carry[d + 1])
        for k in range(d, 0, -1):
            t = n ** (-float(s[k - 1])) * shifted
            cum = carry[k] + np.cumsum(t)
            if k > 1:
                shifted = np.empty_like(cum)
                shifted[0] = carry[k]
                shifted[1:] = cum[:-1]
            carry[k] = float(cum[-1])
        lo = hi
    return carry[1], (carry[2] if d > 1 else 1.0)


def _tail_integral(s1: int, n: int) -> float:
    """Midpoint integral estimate of sum_{m > n} m^(-s1)."""
    return (n + 0.5) ** (1 - s1) / (s1 - 1)


_memo: dict[tuple[tuple[int, ...], float, int], EvalResult] = {}
_memo_lock = threading.Lock()


def eval_mzv(c: Composition, tol: float = 1e-6, max_terms: int = 10**7) -> EvalResult:
    """Adaptive evaluation of a convergent polyzeta to tolerance ``tol``.

    Raises ToleranceUnreachable (with the best effort attached) if the
    cutoff would exceed ``max_terms`` first.
    """
    if not isinstance(c, Composition):
        c = Composition(c)
    if not c.convergent():
        raise ValueError(f"eval_mzv: {format_composition(c)} is not convergent")
    if not tol > 0:
        raise ValueError("tol must be positive")
    key = (tuple(c), float(tol), int(max_terms))
    got = _memo.get(key)
    if got is not None:
        return got

    s = tuple(c)
    n = min(256, max_terms)
    est_prev = inner_prev = None
    n_prev = 0
    while True:
        outer, inner = _partial_sums(s, n)
        est = outer + inner * _tail_integral(s[0], n)
        if est_prev is not None:
            delta = abs(est - est_prev)
            # inner-factor growth normalized to one octave, so a cap-clamped
            # last step cannot shrink the estimate
            drift = max(inner - inner_prev, 0.0) * (math.log(2.0) / math.log(n / n_prev))
            tail = 3.0 * _tail_integral(s[0], n) * drift + 8.0 * _EPS * abs(est)
            tail = max(tail, 0.5 * delta)
            if delta < tol / 10 and tail < tol:
                result = EvalResult(est, tail, n)
                with _memo_lock:
                    _memo[key] = result
                return result
        if n >= max_terms:
            tail = tail if est_prev is not None else float("inf")
            raise ToleranceUnreachable(
                f"eval_mzv({format_composition(c)}): tolerance {tol} "
                f"unreachable within {max_terms} terms",
                EvalResult(est, tail, n),
            )
        est_prev, inner_prev, n_prev = est, inner, n
        n = min(2 * n, max_terms)


def eval_lincomb(x, tol: float = 1e-6, max_terms: int = 10**7) -> float:
    """Evaluate a formal combination; aggregate error <= tol * sum |coeff|."""
    from .oracle import LinComb

    if not isinstance(x, LinComb):
        raise TypeError("eval_lincomb expects a LinComb")
    if x.has_divergent():
        raise ValueError(
            f"eval_lincomb: divergent terms present: {x.divergent_part()}"
        )
    return math.fsum(
        float(coeff) * eval_mzv(term, tol, max_terms).value for term, coeff in x.items()
    )
