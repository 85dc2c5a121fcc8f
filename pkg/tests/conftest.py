from hypothesis import strategies as st

from polyzeta.core import Composition


def compositions(max_entry=6, max_depth=5, convergent=True, allow_empty=False):
    """Strategy for small compositions."""
    min_size = 0 if allow_empty else 1
    base = st.lists(st.integers(1, max_entry), min_size=min_size, max_size=max_depth)
    if convergent:
        base = base.filter(lambda e: len(e) > 0 and e[0] >= 2)
    return base.map(Composition)
