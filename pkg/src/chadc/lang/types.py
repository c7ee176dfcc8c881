"""Types of the source and target languages, plus persistent typing contexts."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, List, Optional, Sequence


class Ty:
    __slots__ = ()

    def is_linear(self) -> bool:
        return False


@dataclass(frozen=True)
class _Atom(Ty):
    name: str

    def __repr__(self) -> str:
        return self.name


REAL = _Atom("Real")
UNIT = _Atom("Unit")
INT = _Atom("Int")
LREAL = _Atom("LReal")
LUNIT = _Atom("LUnit")
# Abstract component of an existential (the captured-environment slot of a
# closure after conversion).  Only ever appears under SigmaTag.
HOLE = _Atom("Hole")

LINEAR_ATOMS = (LREAL, LUNIT)


@dataclass(frozen=True)
class Prod(Ty):
    a: Ty
    b: Ty


@dataclass(frozen=True)
class Sum(Ty):
    a: Ty
    b: Ty


@dataclass(frozen=True)
class Arrow(Ty):
    a: Ty
    b: Ty


@dataclass(frozen=True)
class ClosedArrow(Ty):
    a: Ty
    b: Ty


@dataclass(frozen=True)
class Array(Ty):
    a: Ty


@dataclass(frozen=True)
class LProd(Ty):
    a: Ty
    b: Ty


@dataclass(frozen=True)
class LSum(Ty):
    a: Ty
    b: Ty


@dataclass(frozen=True)
class Bag(Ty):
    a: Ty


@dataclass(frozen=True)
class ListTy(Ty):
    a: Ty


@dataclass(frozen=True)
class TreeTy(Ty):
    a: Ty
    f: Ty


@dataclass(frozen=True)
class SigmaTag(Ty):
    body: Ty


@dataclass(frozen=True)
class LSigma(Ty):
    body: Ty


@dataclass(frozen=True, eq=False)
class EvmTy(Ty):
    ctx: "Ctx"
    a: Ty

    def __eq__(self, other):
        return isinstance(other, EvmTy) and self.a == other.a and self.ctx == other.ctx

    def __hash__(self):
        return hash(("Evm", len(self.ctx), self.a))


@dataclass(frozen=True, eq=False)
class EnvTy(Ty):
    """Whole-environment cotangent for a context (naive modes, run's in/out)."""
    ctx: "Ctx"

    def __eq__(self, other):
        return isinstance(other, EnvTy) and self.ctx == other.ctx

    def __hash__(self):
        return hash(("Env", len(self.ctx)))


class Ctx:
    """Persistent snoc-list of types.

    Built either from a flat tuple (O(1) lookup) or by extending another
    context (O(1) extension, lookup walks back over extensions only).
    """
    __slots__ = ("_base", "_parent", "_top", "n", "_hash")

    def __init__(self, base: Sequence[Ty] = (), parent: Optional["Ctx"] = None,
                 top: Optional[Ty] = None):
        self._hash = None
        if parent is None:
            self._base = tuple(base)
            self._parent = None
            self._top = None
            self.n = len(self._base)
        else:
            self._base = None
            self._parent = parent
            self._top = top
            self.n = parent.n + 1

    def extend(self, ty: Ty) -> "Ctx":
        return Ctx(parent=self, top=ty)

    def __len__(self) -> int:
        return self.n

    def __getitem__(self, level: int) -> Ty:
        if level < 0 or level >= self.n:
            raise IndexError(level)
        node = self
        while node._parent is not None:
            if level == node.n - 1:
                return node._top
            node = node._parent
        return node._base[level]

    def __iter__(self) -> Iterator[Ty]:
        return iter(self.to_list())

    def to_list(self) -> List[Ty]:
        ext = []
        node = self
        while node._parent is not None:
            ext.append(node._top)
            node = node._parent
        return list(node._base) + ext[::-1]

    def pop(self) -> "Ctx":
        if self._parent is not None:
            return self._parent
        return Ctx(self._base[:-1])

    def top(self) -> Ty:
        return self[self.n - 1]

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        if not isinstance(other, Ctx) or self.n != other.n:
            return False
        a, b = self, other
        # walk down shared extension spines first; stop at a shared node
        while a._parent is not None and b._parent is not None:
            if a is b:
                return True
            if a._top != b._top:
                return False
            a, b = a._parent, b._parent
        if a is b:
            return True
        return a.to_list() == b.to_list()

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(tuple(self.to_list()))
        return self._hash

    def __repr__(self) -> str:
        return "Ctx(%r)" % (self.to_list(),)


EMPTY_CTX = Ctx(())


def ctx_of(types: Iterable[Ty]) -> Ctx:
    return Ctx(tuple(types))


LINEAR_CTORS = (LProd, LSum, Bag, LSigma)


def is_linear(ty: Ty) -> bool:
    return ty in LINEAR_ATOMS or isinstance(ty, LINEAR_CTORS) or ty is HOLE


def is_first_order(ty: Ty) -> bool:
    """True when ty contains no function types (arrays allowed)."""
    if isinstance(ty, _Atom):
        return True
    if isinstance(ty, (Prod, Sum)):
        return is_first_order(ty.a) and is_first_order(ty.b)
    if isinstance(ty, Array):
        return is_first_order(ty.a)
    return False


def mentions_array(ty: Ty) -> bool:
    if isinstance(ty, Array):
        return True
    if isinstance(ty, (Prod, Sum, Arrow, ClosedArrow)):
        return mentions_array(ty.a) or mentions_array(ty.b)
    return False


def left_nested(items: Sequence, pair, unit):
    """Tuple sugar: () -> unit, (a,) -> a, (a,b,c) -> pair(pair(a,b),c)."""
    if not items:
        return unit
    acc = items[0]
    for x in items[1:]:
        acc = pair(acc, x)
    return acc


def prod_of(types: Sequence[Ty]) -> Ty:
    return left_nested(list(types), Prod, UNIT)
