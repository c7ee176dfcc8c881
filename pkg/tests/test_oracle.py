import random

import pytest
from hypothesis import given, settings, strategies as st

from chadc.errors import PartialOp
from chadc.lang import parse_program
from chadc.oracle import grad_fd, grad_forward, jvp, random_point, relative_error, slots

from helpers import corpus, random_program


def prog(src):
    return parse_program(src)


MUL = prog("(program (args (x Real) (y Real)) (op mul x y))")
CONST = prog("(program (args (x Real) (y Real)) 4.0)")
BRANCH = prog("(program (args (x Real)) (case (sign x) (a (op mul x x)) (b (op sin x))))")


def test_mul():
    fd = grad_fd(MUL.types, MUL.body, [3.0, 2.0])
    assert abs(fd[0] - 2.0) <= 1e-7 and abs(fd[1] - 3.0) <= 1e-7
    assert grad_forward(MUL.types, MUL.body, [3.0, 2.0]) == [2.0, 3.0]


def test_constant():
    assert all(abs(g) <= 1e-9 for g in grad_fd(CONST.types, CONST.body, [1.0, 2.0]))
    assert grad_forward(CONST.types, CONST.body, [1.0, 2.0]) == [0.0, 0.0]


def test_branch_local_derivative():
    assert grad_forward(BRANCH.types, BRANCH.body, [-2.0]) == [-4.0]
    fd = grad_fd(BRANCH.types, BRANCH.body, [0.5])
    assert abs(fd[0] - 0.8775825618903728) <= 1e-7


def test_fd_leaving_the_domain():
    p = prog("(program (args (x Real)) (op log x))")
    with pytest.raises(PartialOp):
        grad_fd(p.types, p.body, [1e-7])


def test_slots_cover_arrays_and_sums():
    p = prog("(program (args (xs (Array Real)) (s (Sum Real Unit))) 1.0)")
    from chadc.values import VInl
    assert len(slots(p.types[0], [1.0, 2.0])) == 2
    assert sum(s is not None for s in slots(p.types[1], VInl(3.0))) == 1


@pytest.mark.parametrize("name, p", corpus())
def test_oracles_agree(name, p):
    rng = random.Random(name)
    for _ in range(3):
        pt = random_point(p.types, rng)
        assert relative_error(grad_forward(p.types, p.body, pt),
                              grad_fd(p.types, p.body, pt)) <= 1e-4


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**9), st.floats(-3, 3), st.floats(-3, 3))
def test_forward_mode_is_linear(seed, a, b):
    ctx, t = random_program(seed)
    pt = [0.4, -0.9, (1.2, 0.3)]
    rng = random.Random(seed)
    u = [rng.uniform(-1, 1) for _ in range(4)]
    v = [rng.uniform(-1, 1) for _ in range(4)]
    w = [a * x + b * y for x, y in zip(u, v)]
    tu, tv, tw = (jvp(ctx, t, pt, d).t for d in (u, v, w))
    assert abs(tw - (a * tu + b * tv)) <= 1e-12 * max(1.0, abs(tw), abs(a * tu), abs(b * tv))
