import random

import pytest

from chadc import cotangent as C
from chadc.bench import measure_family
from chadc.chad import dense_gradient, run_gradient
from chadc.errors import InventoryMismatch, TagMismatch, UnsupportedConstruct
from chadc.evaluator import evaluate
from chadc.hoc import (cc_type, chad_closed, chad_naive_ho, closure_convert, defunctionalise,
                       lambda_inventory)
from chadc.hoc.defunc import _Dispatch, _Emit, _Flow
from chadc.lang import parse_program, typecheck
from chadc.lang import terms as T
from chadc.lang.scope import iter_terms
from chadc.lang.types import (REAL, UNIT, Arrow, ClosedArrow, SigmaTag, is_first_order)
from chadc.oracle import grad_fd, grad_forward, random_point, relative_error
from chadc.pipeline import gradient

from helpers import corpus, has_arrays

HO = corpus("higher-order")


def prog(src):
    return parse_program(src)


def types_in(t):
    for x in iter_terms(t):
        for f in ("ty", "tag", "sig", "other"):
            v = getattr(x, f, None)
            if v is not None:
                yield v


def test_naive_ho_identity():
    p = prog("(program (args (y Real)) (app (lam (x Real) x) y))")
    r = run_gradient(chad_naive_ho(p.types, p.body), [1.5], 0.25)
    assert r.cotangents == (0.25,)


def test_naive_ho_t_n_gradient():
    p = dict(HO)["ho_tn"]
    r = run_gradient(chad_naive_ho(p.types, p.body), [0.7], 1.0)
    assert r.primal == 0.7 and r.cotangents == (1.0,)


def test_naive_ho_cost_doubles():
    costs = [measure_family("t_n", "naive-ho", n).cost_derivative for n in range(4, 9)]
    ratios = [b / a for a, b in zip(costs, costs[1:])]
    assert all(1.8 <= q <= 2.3 for q in ratios), ratios


def test_closure_convert_identity():
    p = prog("(program (args (y Real)) (lam (x Real) x))")
    c = closure_convert(p.types, p.body)
    pack = next(x for x in iter_terms(c.term) if isinstance(x, T.Pack))
    assert pack.tag == UNIT and pack.t.a == T.UnitLit()
    assert isinstance(pack.t.b, T.ClosedLam)
    assert c.ty == cc_type(Arrow(REAL, REAL))


def test_closure_convert_captures():
    p = prog("(program (args (y Real)) (lam (x Real) (op add x y)))")
    c = closure_convert(p.types, p.body)
    pack = next(x for x in iter_terms(c.term) if isinstance(x, T.Pack))
    assert pack.tag == REAL and pack.t.a == T.Var(0)
    assert [(s.id, s.captured, s.arg, s.res) for s in c.inventory] == [(0, (REAL,), REAL, REAL)]


def test_closed_lambdas_have_no_free_variables():
    from chadc.lang.scope import free_levels
    for _, p in HO:
        c = closure_convert(p.types, p.body)
        for x in iter_terms(c.term):
            if isinstance(x, T.ClosedLam):
                assert free_levels(x, 0) == set()


@pytest.mark.parametrize("name, p", HO)
def test_inventory_lists_every_lambda_once(name, p):
    lams = [x for x in iter_terms(p.body) if isinstance(x, T.Lam)]
    inv = lambda_inventory(p.types, p.body)
    assert [s.id for s in inv] == list(range(len(lams)))
    assert sorted(map(repr, (s.arg for s in inv))) == sorted(repr(lam.ty) for lam in lams)
    assert inv == lambda_inventory(p.types, p.body)


@pytest.mark.parametrize("name, p", HO)
def test_semantics_preserved(name, p):
    c = closure_convert(p.types, p.body)
    d = defunctionalise(c)
    rng = random.Random(name)
    for _ in range(100):
        pt = random_point(p.types, rng)
        v0, c0 = evaluate(p.body, pt)
        v1, c1 = evaluate(c.term, pt)
        v2, _ = evaluate(d.term, pt)
        assert v0 == v1 == v2
        assert c1 <= 6 * c0


@pytest.mark.parametrize("name, p", HO)
def test_defunctionalised_is_first_order(name, p):
    d = defunctionalise(closure_convert(p.types, p.body))
    assert is_first_order(typecheck(d.ctx, d.term))
    for ty in types_in(d.term):
        assert is_first_order(ty), ty
    assert not any(isinstance(x, (T.Lam, T.App, T.ClosedLam, T.Pack, T.UnpackCase))
                   for x in iter_terms(d.term))


def test_single_lambda_dispatch_has_no_case():
    p = prog("(program (args (x Real)) (app (lam (y Real) (op mul y y)) x))")
    d = defunctionalise(closure_convert(p.types, p.body))
    assert d.sites == 1
    assert not any(isinstance(x, T.Case) for x in iter_terms(d.term))


def test_two_lambda_dispatch():
    p = dict(HO)["ho_choose"]
    d = defunctionalise(closure_convert(p.types, p.body))
    assert d.sites == 2
    assert any(isinstance(x, T.Case) and x.lname.startswith("c") for x in iter_terms(d.term))
    for pt in ([0.5, 1.3], [1.5, 0.7]):
        r = gradient("defunctionalise", p.types, p.body, pt)
        g = dense_gradient(p.types, r, pt)
        assert relative_error(g, grad_fd(p.types, p.body, pt)) <= 1e-5


def test_empty_call_site_is_an_inventory_mismatch():
    flow = _Flow()
    f = flow.of_type(cc_type(Arrow(REAL, REAL)))
    with pytest.raises(InventoryMismatch):
        _Emit(flow, []).go(_Dispatch(f, T.Var(None, "f"), T.RealLit(1.0)))


def test_function_inputs_are_rejected():
    p = prog("(program (args (f (Arrow Real Real)) (x Real)) (app f x))")
    with pytest.raises(UnsupportedConstruct):
        defunctionalise(closure_convert(p.types, p.body))


@pytest.mark.parametrize("name, p", HO)
@pytest.mark.parametrize("mode", ["defunctionalise", "closure-chad", "naive-ho"])
def test_gradients(mode, name, p):
    if mode == "naive-ho" and has_arrays(p):
        pytest.skip("naive-ho has no array rules")
    rng = random.Random(name)
    for _ in range(5):
        pt = random_point(p.types, rng)
        g = dense_gradient(p.types, gradient(mode, p.types, p.body, pt), pt)
        assert relative_error(g, grad_forward(p.types, p.body, pt)) <= 1e-10
        assert relative_error(g, grad_fd(p.types, p.body, pt)) <= 1e-5


def test_closed_lambda_derivative_is_zero():
    p = prog("(program (args (x Real)) (let (f (Arrow Real Real)) (lam (y Real) y) (app f x)))")
    tr = chad_closed(closure_convert(p.types, p.body))
    types = [ty for ty in types_in(tr.term)]
    assert any(isinstance(ty, SigmaTag) for ty in types)
    assert not any(isinstance(ty, ClosedArrow) and isinstance(ty.b, Arrow) for ty in types)
    assert run_gradient(tr, [2.0], 1.0).cotangents == (1.0,)


def test_tag_mismatch():
    a, b = C.CSig(REAL, 1.0), C.CSig(UNIT, C.CUNIT)
    with pytest.raises(TagMismatch):
        C.plus(a, b)
    with pytest.raises(TagMismatch):
        C.lcast_sig(UNIT, a, REAL)
    assert C.lcast_sig(REAL, a, REAL) == 1.0
