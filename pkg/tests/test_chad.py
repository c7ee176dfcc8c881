import collections

import pytest
from hypothesis import given, settings, strategies as st

from chadc import cotangent as C
from chadc.chad import (Mode, TransformConfig, chad_transform, d1_type, d2_type, dense_gradient,
                        grad)
from chadc.errors import UnsupportedConstruct, UnsupportedType
from chadc.evaluator import evaluate
from chadc.lang import parse_program, pretty
from chadc.lang import terms as T
from chadc.lang.scope import iter_terms
from chadc.lang.typecheck import elaborate
from chadc.lang.types import INT, LREAL, LUNIT, REAL, UNIT, Array, Arrow, Bag, LProd, Prod, Sum
from chadc.oracle import grad_forward
from chadc.pipeline import FIRST_ORDER_MODES, gradient

from helpers import corpus, random_program

MONADIC = TransformConfig(Mode.MONADIC)


def prog(src):
    return parse_program(src)


def printed(src, mode=Mode.MONADIC):
    p = prog(src)
    tr = chad_transform(TransformConfig(mode), p.types, p.body)
    return pretty(tr.term, tr.names)


def test_types():
    assert d2_type(Prod(REAL, REAL)) == LProd(LREAL, LREAL)
    assert d2_type(Array(REAL)) == Bag(Prod(INT, LREAL))
    assert d1_type(Sum(UNIT, UNIT)) == Sum(UNIT, UNIT)
    assert d2_type(INT) == LUNIT
    with pytest.raises(UnsupportedType):
        d2_type(Arrow(REAL, REAL))


def test_mul_gradient():
    p = prog("(program (args (x Real) (y Real)) (op mul x y))")
    r = grad(MONADIC, p.types, p.body, [3.0, 2.0])
    assert r.primal == 6.0 and r.cotangents == (2.0, 3.0)


def test_let_gradient():
    p = prog("(program (args (x Real)) (let (z Real) (op add x x) z))")
    assert grad(MONADIC, p.types, p.body, [5.0]).cotangents == (2.0,)


def test_projection_gradient_is_one_hot():
    p = prog("(program (args (x Real) (y (Prod Real Real))) (fst (pair x y)))")
    r = grad(MONADIC, p.types, p.body, [1.0, (2.0, 3.0)], 0.5)
    assert r.cotangents[0] == 0.5
    assert r.cotangents[1] is C.CPZERO


def test_sum_of_array_gradient():
    p = prog("(program (args (xs (Array Real))) "
             "(fold (p (op add (fst p) (snd p))) (build (length xs) (i (index xs i)))))")
    xs = [0.5, 1.5, 2.5, 3.5, 4.5]
    r = grad(MONADIC, p.types, p.body, [xs])
    assert r.primal == sum(xs)
    assert dense_gradient(p.types, r, [xs]) == [1.0] * len(xs)


def test_var_rule_emits_one():
    text = printed("(program (args (x Real)) x)")
    assert "(one " in text


def test_naive_op_rule_adds_env_cotangents():
    text = printed("(program (args (x Real) (y Real)) (op mul x y))", Mode.NAIVE_DENSE)
    assert "envplus" in text


def test_array_rules():
    index = printed("(program (args (xs (Array Real))) (index xs 1i))")
    assert "bagone" in index
    fold = printed("(program (args (xs (Array Real))) (fold (p (op add (fst p) (snd p))) xs))")
    assert "untree" in fold and "fromlist" in fold
    build = printed("(program (args (x Real)) (index (build 3i (i (op mul x x))) 0i))")
    for word in ("collect", "scatter", "zipwith", "sequence"):
        assert word in build


def test_sign_and_literals_have_no_cotangent():
    p = prog("(program (args (x Real)) (case (sign x) (a 2.0) (b 3.0)))")
    assert grad(MONADIC, p.types, p.body, [1.0]).cotangents == (0.0,)


@pytest.mark.parametrize("mode", [Mode.NAIVE_DENSE, Mode.NAIVE_TREEMAP])
def test_naive_modes_reject_arrays(mode):
    p = prog("(program (args (xs (Array Real))) (index xs 0i))")
    with pytest.raises(UnsupportedConstruct):
        chad_transform(TransformConfig(mode), p.types, p.body)


def test_first_order_modes_reject_lambdas():
    p = prog("(program (args (x Real)) (app (lam (y Real) y) x))")
    with pytest.raises(UnsupportedConstruct):
        chad_transform(MONADIC, p.types, p.body)


@pytest.mark.parametrize("name, p", corpus("first-order"))
def test_compositional(name, p):
    tr = chad_transform(MONADIC, p.types, p.body)
    source = list(iter_terms(elaborate(p.types, p.body)[0]))
    assert len(tr.provenance) == len(source)
    assert {id(s) for s, _ in tr.provenance} == {id(s) for s in source}
    occurrences = collections.Counter(id(x) for x in iter_terms(tr.named))
    assert all(occurrences[id(d)] == 1 for _, d in tr.provenance)


@pytest.mark.parametrize("name, p", corpus("plain"))
def test_transform_is_deterministic(name, p):
    a = chad_transform(MONADIC, p.types, p.body)
    b = chad_transform(MONADIC, p.types, p.body)
    assert pretty(a.term, ["x%d" % i for i in range(len(p.types))]) == \
        pretty(b.term, ["x%d" % i for i in range(len(p.types))])


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**9), st.floats(-2, 2), st.floats(-2, 2))
def test_random_programs(seed, x, y):
    ctx, t = random_program(seed)
    point = [x, y, (y + 0.5, x - 0.5)]
    want = grad_forward(ctx, t, point)
    value, _ = evaluate(t, point)
    for mode in FIRST_ORDER_MODES:
        r = gradient(mode, ctx, t, point)
        assert r.primal == value
        got = dense_gradient(ctx, r, point)
        assert all(abs(a - b) <= 1e-10 * max(1.0, abs(b)) for a, b in zip(got, want)), mode


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**9))
def test_primal_preservation_on_random_programs(seed):
    ctx, t = random_program(seed)
    point = [0.3, -1.1, (0.7, 2.0)]
    tr = chad_transform(MONADIC, ctx, t)
    v0, c0 = evaluate(t, point)
    v1, c1 = evaluate(T.Fst(tr.term), point)
    assert v1 == v0
    assert c1 <= 12 * c0
