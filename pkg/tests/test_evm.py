import random

import pytest
from hypothesis import given, settings, strategies as st

from chadc import cotangent as C
from chadc import evm
from chadc.cotangent import Meter
from chadc.errors import BadLevel, CotangentMismatch, PopOnEmpty
from chadc.evaluator import evaluate
from chadc.lang import terms as T
from chadc.lang.types import LREAL, LProd, ctx_of

from helpers import random_cots, random_ltype

SIZES = (1, 16, 256, 4096)


def state(n):
    return evm.EvmState([0.0] * n, Meter())


def test_push_pop():
    st_ = evm.EvmState()
    evm.push(st_, LREAL)
    assert st_.slots == [0.0] and st_.depth == 1
    _, v = evm.pop(st_)
    assert v == 0.0 and st_.depth == 0
    with pytest.raises(PopOnEmpty):
        evm.pop(st_)


def test_pop_is_lifo():
    st_ = evm.EvmState()
    evm.push(st_, LREAL)
    evm.push(st_, LProd(LREAL, LREAL))
    assert evm.pop(st_)[1] is C.CPZERO
    assert evm.pop(st_)[1] == 0.0


def test_modify():
    st_ = evm.EvmState([1.0])
    evm.modify(st_, 0, lambda x: C.plus(x, 2.0))
    assert st_.slots == [3.0]
    evm.modify(st_, 0, lambda x: x)
    assert st_.slots == [3.0]
    with pytest.raises(BadLevel):
        evm.modify(st_, 1, lambda x: x)


def test_one_and_run():
    assert evm.run(evm.one(0, 2.5), [1.0]) == (None, (3.5,))
    d = C.CPair(1.0, 2.0)
    assert evm.run(evm.one(0, d), [C.CPZERO]) == (None, (d,))
    with pytest.raises(CotangentMismatch):
        evm.run(evm.one(0, C.CInl(1.0)), [C.CInr(1.0)])


def test_ones_commute():
    ty = LProd(LProd(LREAL, LREAL), LREAL)
    a, b = C.CPair(C.CPair(1.0, 3.0), 0.0), C.CPair(C.CPZERO, 2.0)
    _, e1 = evm.run(evm.seq(evm.one(0, a), evm.one(0, b)), [C.CPZERO])
    _, e2 = evm.run(evm.seq(evm.one(0, b), evm.one(0, a)), [C.CPZERO])
    assert C.densify(ty, e1[0]) == C.densify(ty, e2[0])


def test_scope():
    m = evm.scope(LREAL, evm.seq(evm.one(1, 1.0), evm.ret(None)))
    v, env = evm.run(m, [5.0])
    assert v == (None, 1.0) and env == (5.0,)
    v, env = evm.run(evm.scope(LREAL, evm.ret(7)), [5.0])
    assert v == (7, 0.0) and env == (5.0,)


def test_nested_scopes_pop_in_order():
    inner = evm.scope(LREAL, evm.seq(evm.one(1, 1.0), evm.one(2, 2.0)))
    v, env = evm.run(evm.scope(LREAL, inner), [0.0])
    assert v == ((None, 2.0), 1.0)
    assert env == (0.0,)


def test_run_costs():
    m = Meter()
    evm.run(evm.ret(None), [1.0], m)
    assert m.n == 1 + 2 * 1
    m = Meter()
    evm.run(evm.ret(None), [], m)
    assert m.n == 1


@pytest.mark.parametrize("n", SIZES)
def test_operation_costs_do_not_depend_on_context_size(n):
    st_ = state(n)
    before = st_.meter.n
    evm.push(st_, LREAL)
    assert st_.meter.n - before == 1
    before = st_.meter.n
    evm.pop(st_)
    assert st_.meter.n - before == 1
    for level in (0, n - 1):
        before = st_.meter.n
        evm.one(level, 1.0).go(st_)
        assert st_.meter.n - before - 1 == 1     # minus the real addition
    before = st_.meter.n
    evm.scope(LREAL, evm.ret(None)).go(st_)
    assert st_.meter.n - before == 1
    m = Meter()
    evm.run(evm.ret(None), [0.0] * n, m)
    assert m.n == 1 + 2 * n


@pytest.mark.parametrize("n", SIZES)
def test_evaluated_run_cost(n):
    g = ctx_of([LREAL] * n)
    inner = T.EvmSeq(T.EvmOne(g, n - 1, T.LZero(LREAL)), T.EvmReturn(g, T.UnitLit()))
    term = T.EvmRun(g, inner, T.Var(0))
    env = tuple([0.0] * n)
    _, total = evaluate(term, [env])
    # inner: seq 1, one 1 + plus 1 + lzero 1, return 1 + unit 1
    assert total == 1 + 2 * n + 1 + 6


def test_bind_cost_law():
    a = evm.seq(evm.one(0, 1.0), evm.ret(2.0))
    k = lambda v: evm.one(1, v)  # noqa: E731
    env = [0.0, 0.0, 0.0]
    ms = []
    for act in (evm.bind(a, k), a):
        m = Meter()
        ms.append((evm.run(act, env, m), m.n))
    (_, lhs), ((v, e1), ca) = ms
    m = Meter()
    evm.run(k(v), list(e1), m)
    # the bind step pays for the second run's fixed step, so the constant is 0
    assert lhs == ca + m.n - evm.C_RUN * len(env)


def test_run_rejects_unbalanced_actions():
    def leak(st_):
        st_.slots.append(0.0)
    with pytest.raises(PopOnEmpty):
        evm.run(evm.Action(leak), [0.0])


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10**9))
def test_accumulation_matches_reference(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 6)
    types = [random_ltype(rng, 3) for _ in range(n)]
    # the initial slot and every contribution to it are drawn jointly so they can be added
    pools = {i: random_cots(rng, types[i], 9) for i in range(n)}
    env0 = [pools[i][0] for i in range(n)]
    ref = {i: [env0[i]] for i in range(n)}
    act = evm.ret(None)
    for _ in range(rng.randint(0, 20)):
        i = rng.randrange(n)
        d = rng.choice(pools[i])
        ref[i].append(d)
        act = evm.seq(act, evm.one(i, d))
    _, out = evm.run(act, env0)
    for i in range(n):
        want = [sum(col) for col in zip(*(C.densify(types[i], d) for d in ref[i]))]
        got = C.densify(types[i], out[i])
        assert all(abs(x - y) <= 1e-12 * max(1, abs(y)) for x, y in zip(got, want))

