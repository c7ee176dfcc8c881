import json

import pytest

from chadc.bench import (FAMILIES, FamilySpec, Row, check_rule, default_rule, family_point,
                         gen_family, measure, measure_family, regression_check, report_json,
                         write_report)
from chadc.errors import SizeOutOfRange
from chadc.evaluator import evaluate
from chadc.lang import parse_program, pretty, typecheck
from chadc.lang.types import REAL


def gen(name, n):
    return gen_family(FamilySpec(name, n))


def test_t_magic_shape():
    g = gen("t_magic", 4)
    assert pretty(g.term, g.names) == "(op add (op add x1 x2) (op add x3 x4))"
    assert gen("t_magic", 7).n_inputs == 4


def test_t_n_shape():
    g = gen("t_n", 2)
    assert pretty(g.term, g.names) == "(app (lam (x1 Real) x1) x2)"
    g = gen("t_n", 3)
    assert pretty(g.term, g.names) == "(app (lam (x2 Real) (app (lam (x1 Real) x1) x2)) x3)"


def test_deep_let_shape():
    g = gen("deep-let", 3)
    text = pretty(g.term, g.names)
    assert text.count("(let ") == 3 and text.count("(op mul 2.0") == 3


@pytest.mark.parametrize("name", sorted(FAMILIES))
def test_families_typecheck(name):
    for n in (4, 32):
        g = gen(name, n)
        assert typecheck(g.ctx, g.term) == REAL
        v, _ = evaluate(g.term, family_point(g))
        assert isinstance(v, float)


@pytest.mark.parametrize("name, n", [("t_magic", 1), ("t_n", 4096), ("deep-let", 0),
                                     ("nope", 4), ("array-buildfold", 10 ** 7)])
def test_size_out_of_range(name, n):
    with pytest.raises(SizeOutOfRange):
        gen(name, n)


@pytest.mark.parametrize("name", sorted(FAMILIES))
def test_primal_cost_is_linear(name):
    mode = "defunctionalise" if name == "t_n" else "monadic"
    c1 = measure_family(name, mode, 256).cost_primal
    c2 = measure_family(name, mode, 512).cost_primal
    assert 1.8 <= c2 / c1 <= 2.2


def test_identity_ratio_is_constant():
    p = parse_program("(program (args (x Real)) x)")
    rows = [measure(p.types, p.body, "monadic", [1.0], 1.0, n) for n in (1, 2)]
    assert rows[0].ratio == rows[1].ratio


def test_points_are_deterministic_and_in_range():
    g = gen("array-buildfold", 50)
    a, b = family_point(g, 3), family_point(g, 3)
    assert a == b and all(0.5 <= x <= 1.5 for x in a[0])
    assert family_point(g, 4) != a


def rows(ratios, costs=None):
    costs = costs or [1] * len(ratios)
    return [Row(2 ** (6 + i), 10, c, r, r, 1, 1) for i, (r, c) in enumerate(zip(ratios, costs))]


def test_rules():
    assert check_rule("flat-ratio", rows([10, 11, 12]))[0]
    assert not check_rule("flat-ratio", rows([10, 11, 12.5]))[0]
    assert check_rule("log-growth", rows([10, 15]))[0]
    assert not check_rule("log-growth", rows([10, 14]))[0]
    assert check_rule("doubling", rows([1, 1, 1], [100, 200, 390]))[0]
    assert not check_rule("doubling", rows([1, 1], [100, 230]))[0]
    assert check_rule("linear", rows([1, 1], [100, 220]))[0]
    assert not check_rule("linear", rows([1, 1], [100, 240]))[0]
    assert not check_rule("flat-ratio", rows([10]))[0]
    with pytest.raises(ValueError):
        check_rule("wobbly", rows([1, 1]))
    assert default_rule("t_n", "defunctionalise") == "linear"
    assert default_rule("t_magic", "monadic") == "flat-ratio"


def test_regression_examples():
    sizes = [64, 256, 1024, 4096]
    assert regression_check("t_magic", "monadic", sizes, "flat-ratio").passed
    assert not regression_check("t_magic", "naive-treemap", sizes, "flat-ratio").passed
    assert regression_check("t_n", "naive-ho", [8, 9, 10, 11, 12], "doubling").passed


def test_naive_ho_doubling_settles_from_above():
    # each call at nesting depth j also pays O(j) for the dense environment,
    # so cost(n + 1) / cost(n) approaches 2 from above; below n = 6 it exceeds 2.2
    rep = regression_check("t_n", "naive-ho", list(range(4, 13)), "doubling")
    qs = [b.cost_derivative / a.cost_derivative for a, b in zip(rep.rows, rep.rows[1:])]
    assert qs[0] > 2.2
    assert all(2.0 < q <= 2.2 for q in qs[2:])
    assert all(x > y for x, y in zip(qs, qs[1:]))


def test_report_is_deterministic(tmp_path):
    a = report_json([regression_check("deep-let", "monadic", [64, 128, 256, 512])])
    b = report_json([regression_check("deep-let", "monadic", [512, 256, 128, 64])])
    assert a == b
    data = json.loads(a)
    assert list(data) == ["family", "mode", "rows", "rule", "pass", "detail"]
    assert list(data["rows"][0])[:4] == ["n", "cost_primal", "cost_derivative", "ratio"]
    out = tmp_path / "sub" / "r.json"
    fig = write_report([regression_check("deep-let", "monadic", [64, 128])], out)
    assert out.exists() and fig == out.with_suffix(".png")
    assert fig.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"
