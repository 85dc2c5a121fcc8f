"""The memo caches tolerate concurrent readers and duplicate fills."""

from concurrent.futures import ThreadPoolExecutor

from polyzeta.core import Composition
from polyzeta.oracle import shuffle, stuffle
from polyzeta.ordering import _enum_cache, enumerate_weight

C = Composition


def test_concurrent_enumeration():
    _enum_cache.pop(9, None)
    with ThreadPoolExecutor(max_workers=8) as pool:
        results = list(pool.map(lambda _: enumerate_weight(9), range(16)))
    assert all(r == results[0] for r in results)
    assert len(results[0]) == 128


def test_concurrent_products():
    pairs = [(C((2,)), z) for z in enumerate_weight(6)] * 3
    with ThreadPoolExecutor(max_workers=8) as pool:
        st = list(pool.map(lambda p: stuffle(*p), pairs))
        sh = list(pool.map(lambda p: shuffle(*p), pairs))
    n = len(pairs) // 3
    for k in range(n):
        assert st[k] == st[k + n] == st[k + 2 * n]
        assert sh[k] == sh[k + n] == sh[k + 2 * n]
