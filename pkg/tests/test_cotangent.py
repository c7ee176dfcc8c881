import random

import pytest
from hypothesis import given, settings, strategies as st

from chadc import cotangent as C
from chadc.errors import CotangentMismatch
from chadc.evaluator import evaluate
from chadc.lang import terms as T
from chadc.lang.types import INT, LREAL, LUNIT, Bag, LProd, LSum, Prod

from helpers import random_bag, random_cots, random_ltype

PR = LProd(LREAL, LREAL)
BAG = Bag(Prod(INT, LREAL))


def test_zeros():
    assert C.zero(PR) is C.CPZERO
    assert C.zero(LREAL) == 0.0
    assert C.zero(BAG) is C.BAG_EMPTY
    assert C.zero(LSum(LREAL, LUNIT)) is C.CSZERO


def test_zero_costs_one_at_any_type():
    deep = PR
    for _ in range(30):
        deep = LProd(deep, LSum(deep, LREAL))
    for ty in (LREAL, PR, deep, BAG):
        assert evaluate(T.LZero(ty), [])[1] == 1


def test_plus_examples():
    y = C.CPair(1.0, 2.0)
    assert C.plus(C.CPZERO, y) is y
    assert C.plus(1.5, 2.0) == 3.5
    with pytest.raises(CotangentMismatch):
        C.plus(C.CInl(1.0), C.CInr(2.0))


def test_bag_plus_is_one_step():
    a, b = C.CBagOne(0, 1.0), C.CBagOne(1, 2.0)
    r, cost = C.plus_cost(a, b)
    assert isinstance(r, C.CBagPlus) and r.l is a and r.r is b
    assert cost == 1
    big = random_bag(random.Random(1), 10, 500)
    assert C.plus_cost(big, big)[1] == 1


def test_size_examples():
    assert C.size(C.CUNIT) == 1
    assert C.size(C.CPair(5.0, C.CPZERO)) == 3
    assert C.size(C.CInr(1.0)) == 2
    assert C.size(C.BAG_EMPTY) == 1
    assert C.size(C.CBagOne(0, 1.0)) == 2
    assert C.size(C.CBagPlus(C.CBagOne(0, 1.0), C.CBagOne(1, 1.0))) == 5
    assert C.potential(C.CPair(5.0, C.CPZERO)) == 3 * 3


def test_linear_api():
    assert C.lfst(C.CPZERO, PR) == 0.0
    assert C.lsnd(C.CPair(1.0, 2.0), PR) == 2.0
    assert C.size(C.lpair(C.CPair(1.0, 1.0), C.zero(PR))) == 1 + 3 + 1
    s = LSum(LREAL, LREAL)
    assert C.lcast_l(C.CSZERO, s) == 0.0
    with pytest.raises(CotangentMismatch):
        C.lcast_l(C.CInr(1.0), s)
    with pytest.raises(CotangentMismatch):
        C.lcast_r(C.CInl(1.0), s)
    # the dense variant materialises every product node
    assert C.size(C.lfst(C.CPZERO, LProd(PR, LREAL), dense=True)) == 3


def test_plus_does_not_copy_untouched_subtrees():
    a = C.CPair(C.CPair(1.0, 2.0), C.CPZERO)
    b = C.CPair(C.CPZERO, C.CPair(3.0, 4.0))
    r = C.plus(a, b)
    assert r.a is a.a and r.b is b.b


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 10**9))
def test_size_positive_and_shape_valid(seed):
    rng = random.Random(seed)
    ty = random_ltype(rng, 6)
    for d in random_cots(rng, ty, 3):
        assert C.size(d) >= 1
        assert C.valid(ty, d)


@settings(max_examples=500, deadline=None)
@given(st.integers(0, 10**9))
def test_monoid_laws(seed):
    rng = random.Random(seed)
    ty = random_ltype(rng, 6)
    a, b, c = random_cots(rng, ty, 3)
    z = C.zero(ty)
    assert C.dense_equal(ty, C.plus(a, z), a, rel=0)
    assert C.dense_equal(ty, C.plus(z, a), a, rel=0)
    assert C.dense_equal(ty, C.plus(a, b), C.plus(b, a), rel=0)
    assert C.dense_equal(ty, C.plus(C.plus(a, b), c), C.plus(a, C.plus(b, c)))
    assert C.valid(ty, C.plus(a, b))


@settings(max_examples=500, deadline=None)
@given(st.integers(0, 10**9))
def test_densify_is_additive(seed):
    rng = random.Random(seed)
    ty = random_ltype(rng, 6)
    a, b = random_cots(rng, ty, 2)
    want = [x + y for x, y in zip(C.densify(ty, a), C.densify(ty, b))]
    assert C.densify(ty, C.plus(a, b)) == want


@settings(max_examples=500, deadline=None)
@given(st.integers(0, 10**9))
def test_amortized_plus_law(seed):
    rng = random.Random(seed)
    ty = random_ltype(rng, 8)
    a, b = random_cots(rng, ty, 2)
    r, cost = C.plus_cost(a, b)
    assert cost <= C.C_PHI * (C.size(a) + C.size(b) - C.size(r))
    # the evaluator charges the same, on top of the two variable reads
    _, ev_cost = evaluate(T.LPlus(T.Var(0), T.Var(1)), [a, b])
    assert ev_cost - 2 == cost


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10**9))
def test_bag_monoid_laws(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 8)
    like = [0.0] * n
    a, b, c = (random_bag(rng, n, rng.randint(0, 6)) for _ in range(3))
    z = C.zero(BAG)
    eq = lambda x, y: C.dense_equal(BAG, x, y, like=like)  # noqa: E731
    assert eq(C.plus(a, z), a) and eq(C.plus(z, a), a)
    assert eq(C.plus(a, b), C.plus(b, a))
    assert eq(C.plus(C.plus(a, b), c), C.plus(a, C.plus(b, c)))
    assert C.valid(BAG, C.plus(a, b))


def test_bag_plus_breaks_the_node_count_law():
    # bags are paid for when collected, not through the size potential:
    # one step is spent and no potential is released
    a, b = C.CBagOne(0, 1.0), C.CBagOne(1, 1.0)
    r, cost = C.plus_cost(a, b)
    assert C.size(a) + C.size(b) - C.size(r) == -1
    assert cost == 1
