import math

import pytest

from polyzeta.core import Composition, dual
from polyzeta.numeric import (
    EvalResult,
    ToleranceUnreachable,
    _partial_sums,
    _tail_integral,
    eval_lincomb,
    eval_mzv,
)
from polyzeta.oracle import LinComb, stuffle
from polyzeta.ordering import enumerate_weight

C = Composition

PI = math.pi
ZETA2 = PI**2 / 6
ZETA3 = 1.2020569031595943
ZETA4 = PI**4 / 90


class TestEvalMzv:
    def test_depth_one_anchors(self):
        r = eval_mzv(C((2,)), 1e-6)
        assert abs(r.value - ZETA2) <= 1e-6
        assert abs(r.value - ZETA2) <= r.tail_estimate
        assert abs(eval_mzv(C((3,)), 1e-6).value - ZETA3) <= 1e-6
        assert abs(eval_mzv(C((4,)), 1e-6).value - ZETA4) <= 1e-6

    def test_euler_pair(self):
        a = eval_mzv(C((3,)), 1e-6).value
        b = eval_mzv(C((2, 1)), 1e-6).value
        assert abs(a - b) <= 2e-6

    def test_two_two(self):
        # (2)*(2) = (4) + 2(2,2), so zeta(2,2) = (zeta(2)^2 - zeta(4))/2
        v = eval_mzv(C((2, 2)), 1e-5).value
        z2 = eval_mzv(C((2,)), 1e-6).value
        z4 = eval_mzv(C((4,)), 1e-6).value
        assert abs(v - (z2 * z2 - z4) / 2) <= 1e-4

    def test_rejects_divergent(self):
        with pytest.raises(ValueError):
            eval_mzv(C((1, 2)), 1e-3)
        with pytest.raises(ValueError):
            eval_mzv(C((2,)), 0.0)

    def test_tolerance_unreachable(self):
        with pytest.raises(ToleranceUnreachable) as err:
            eval_mzv(C((2, 1)), 1e-9, max_terms=10**4)
        best = err.value.best
        assert isinstance(best, EvalResult)
        assert abs(best.value - ZETA3) < 1e-2

    def test_tail_estimate_decreases(self):
        for comp in [C((2,)), C((2, 1)), C((2, 1, 1))]:
            s = tuple(comp)
            tails = []
            for n in (4096, 16384, 65536, 262144):
                o1, i1 = _partial_sums(s, n)
                o0, i0 = _partial_sums(s, n // 2)
                est1 = o1 + i1 * _tail_integral(s[0], n)
                est0 = o0 + i0 * _tail_integral(s[0], n // 2)
                t = 3.0 * _tail_integral(s[0], n) * max(i1 - i0, 0.0)
                tails.append(max(t, 0.5 * abs(est1 - est0)))
            assert tails == sorted(tails, reverse=True)

    def test_monotone_refinement(self):
        # one doubling step never moves the estimate by more than the tail
        # estimate the evaluator would have reported at the current cutoff
        for comp in [C((2,)), C((2, 1)), C((3, 1)), C((2, 1, 1)), C((2, 2, 1))]:
            s = tuple(comp)
            for n in (2048, 8192, 65536):
                o1, i1 = _partial_sums(s, n)
                o0, i0 = _partial_sums(s, n // 2)
                est1 = o1 + i1 * _tail_integral(s[0], n)
                est0 = o0 + i0 * _tail_integral(s[0], n // 2)
                drift = max(i1 - i0, 0.0)
                tail = 3.0 * _tail_integral(s[0], n) * drift + 8e-16 * abs(est1)
                tail = max(tail, 0.5 * abs(est1 - est0))
                o2, i2 = _partial_sums(s, 2 * n)
                est2 = o2 + i2 * _tail_integral(s[0], 2 * n)
                assert abs(est2 - est1) <= tail


class TestEvalLincomb:
    def test_euler_relation(self):
        r = eval_lincomb(LinComb({C((2, 1)): 1, C((3,)): -1}), 1e-6)
        assert abs(r) <= 2e-6

    def test_weight_four_relation(self):
        r = eval_lincomb(LinComb({C((3, 1)): 4, C((4,)): -1}), 1e-6)
        assert abs(r) <= 5e-6

    def test_empty_is_zero(self):
        assert eval_lincomb(LinComb(), 1e-6) == 0.0

    def test_divergent_rejected(self):
        with pytest.raises(ValueError, match="divergent"):
            eval_lincomb(LinComb({C((1, 2)): 1}), 1e-3)


class TestConsistency:
    def test_product_homomorphism(self):
        # eval(x)*eval(y) == eval(stuffle(x, y)) within tolerance
        pairs = [
            (C((2,)), C((2,))),
            (C((2,)), C((3,))),
            (C((2, 1)), C((2,))),
            (C((3,)), C((2, 2))),
        ]
        for x, y in pairs:
            lhs = eval_mzv(x, 1e-6).value * eval_mzv(y, 1e-6).value
            rhs = eval_lincomb(stuffle(x, y), 1e-5, max_terms=10**8)
            assert abs(lhs - rhs) <= 1e-4, (x, y)

    def test_duality_numerics(self):
        for w in range(3, 7):
            for z in enumerate_weight(w):
                a = eval_mzv(z, 1e-4, max_terms=10**8).value
                b = eval_mzv(dual(z), 1e-4, max_terms=10**8).value
                assert abs(a - b) <= 3e-4, z
