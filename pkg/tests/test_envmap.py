import math

from hypothesis import given, settings, strategies as st

from chadc import envmap as EM
from chadc.cotangent import Meter

entries = st.lists(st.tuples(st.integers(0, 200), st.floats(-10, 10)), max_size=60)


def build(items):
    mp = EM.EMPTY
    for k, v in items:
        mp = EM.insert_with(mp, k, v)
    return mp


def as_dict(items):
    out = {}
    for k, v in items:
        out[k] = out.get(k, 0.0) + v
    return out


def depth(t):
    return 0 if t is None else 1 + max(depth(t.left), depth(t.right))


@settings(max_examples=200, deadline=None)
@given(entries)
def test_insert_matches_dict(items):
    mp = build(items)
    want = as_dict(items)
    got = dict(mp.items())
    assert got.keys() == want.keys()
    assert all(math.isclose(got[k], want[k], abs_tol=1e-9) for k in want)
    assert [k for k, _ in mp.items()] == sorted(want)


@settings(max_examples=200, deadline=None)
@given(entries, entries)
def test_union_is_pointwise_plus(xs, ys):
    u = dict(EM.union(build(xs), build(ys)).items())
    want = as_dict(xs + ys)
    assert u.keys() == want.keys()
    assert all(math.isclose(u[k], want[k], abs_tol=1e-9) for k in want)


@settings(max_examples=200, deadline=None)
@given(entries, st.integers(0, 200))
def test_delete(items, key):
    mp = build(items)
    mp2, v = EM.delete(mp, key)
    want = as_dict(items)
    assert v == want.get(key)
    want.pop(key, None)
    assert dict(mp2.items()).keys() == want.keys()
    # persistence: the original is untouched
    assert dict(mp.items()).keys() == as_dict(items).keys()


def test_balanced_and_logarithmic():
    n = 4096
    mp = build((k, 1.0) for k in range(n))
    assert depth(mp.root) <= 4 * math.log2(n)
    m = Meter()
    EM.insert_with(mp, n // 2, 1.0, m)
    assert m.n <= 4 * math.log2(n) + 2


def test_union_cost_grows_with_the_smaller_map():
    big = build((k, 1.0) for k in range(0, 8192, 2))
    costs = []
    for k in (16, 32, 64):
        small = build((j, 1.0) for j in range(1, 2 * k, 2))
        m = Meter()
        EM.union(big, small, m)
        costs.append(m.n)
    assert costs[0] < costs[1] < costs[2]
    assert costs[2] >= 3 * costs[0]
