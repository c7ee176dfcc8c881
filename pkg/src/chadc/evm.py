"""The accumulation monad: a level-indexed slot array with O(1) operations.

Actions are suspended computations over an EvmState.  They only execute
under `run` or `scope`; whoever executes one holds the only handle to the
state while it runs.
"""
from __future__ import annotations

from typing import Callable, List, Optional, Sequence, Tuple

from .cotangent import Meter, plus, zero
from .errors import BadLevel, PopOnEmpty
from .lang.types import Ty

C_RUN = 2


class EvmState:
    __slots__ = ("slots", "meter")

    def __init__(self, slots: Optional[List] = None, meter: Optional[Meter] = None):
        self.slots = slots if slots is not None else []
        self.meter = meter if meter is not None else Meter()

    @property
    def depth(self) -> int:
        return len(self.slots)


class Action:
    """A suspended EVM computation: go(state) -> value."""
    __slots__ = ("go",)

    def __init__(self, go: Callable[[EvmState], object]):
        self.go = go

    def __repr__(self):
        return "<action>"


# ---- primitive state operations (cost 1 each) --------------------------------

def push(st: EvmState, ty: Ty) -> EvmState:
    st.meter.n += 1
    st.slots.append(zero(ty))
    return st


def pop(st: EvmState) -> Tuple[EvmState, object]:
    if not st.slots:
        raise PopOnEmpty("pop on an empty environment")
    st.meter.n += 1
    return st, st.slots.pop()


def modify(st: EvmState, level: int, f: Callable[[object], object]) -> EvmState:
    if not 0 <= level < len(st.slots):
        raise BadLevel("level %d out of range for depth %d" % (level, len(st.slots)))
    st.meter.n += 1
    st.slots[level] = f(st.slots[level])
    return st


# ---- actions -----------------------------------------------------------------------

def ret(v) -> Action:
    return Action(lambda st: v)


def one(level: int, d) -> Action:
    """Add d into slot `level`; cost 1 + the plus."""
    def go(st):
        slots = st.slots
        if not 0 <= level < len(slots):
            raise BadLevel("level %d out of range for depth %d" % (level, len(slots)))
        m = st.meter
        m.n += 1
        slots[level] = plus(slots[level], d, m)
        return None
    return Action(go)


def scope(ty: Ty, m: Action) -> Action:
    """Run m with one extra zero slot on top; return (result, popped slot).

    The push and pop are covered by the scope's own unit cost."""
    z = zero(ty)

    def go(st):
        st.meter.n += 1
        slots = st.slots
        depth = len(slots)
        slots.append(z)
        v = m.go(st)
        if len(slots) != depth + 1:
            raise PopOnEmpty("unbalanced scope")
        return (v, slots.pop())
    return Action(go)


def bind(m: Action, k: Callable[[object], Action]) -> Action:
    def go(st):
        st.meter.n += 1
        return k(m.go(st)).go(st)
    return Action(go)


def seq(a: Action, b: Action) -> Action:
    def go(st):
        a.go(st)
        return b.go(st)
    return Action(go)


def run(m: Action, env0: Sequence, meter: Optional[Meter] = None) -> Tuple[object, tuple]:
    """Deposit env0, execute m, extract the final environment.

    Cost 1 + C_RUN·|env0| + cost of m.  Slots move in and out sparse."""
    st = EvmState(list(env0), meter)
    st.meter.n += 1 + C_RUN * len(env0)
    v = m.go(st)
    if len(st.slots) != len(env0):
        raise PopOnEmpty("run finished with an unbalanced environment")
    return v, tuple(st.slots)


# long-form names
evm_push, evm_pop, evm_modify = push, pop, modify
evm_one, evm_scope, evm_run = one, scope, run
