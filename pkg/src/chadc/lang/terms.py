"""Abstract syntax for source and target terms.

Variables are de Bruijn levels.  Binder names are kept as metadata for
printing and never take part in equality.  Code generators build terms
with named variables (level None) and resolve them afterwards
(see lang.scope).

Each class carries an ``sx`` table describing its s-expression form:
  ("t", f)            a subterm
  ("ts", f)           trailing variadic subterms
  ("y", f) / ("y?", f)  a type / optional trailing type
  ("c", f)            a context, printed as a list of types
  ("i", f) ("s", f)   an integer / a symbol
  ("r", f)            a representation keyword
  ("nt", n, y)        a "(name ty)" binder declaration
  ("B", f, n)         a subterm under the binder named by field n
  ("bt", f, n)        "(name term)", the term under that binder
  ("b2t", f, n1, n2)  "((n1 n2) term)"
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Tuple

from .types import Ctx, Ty


class Term:
    __slots__ = ()
    head = ""
    sx: tuple = ()
    closed = False


def _term(tag, sx, closed=False):
    def wrap(cls):
        cls = dataclass(slots=True)(cls)
        cls.head = tag
        cls.sx = sx
        cls.closed = closed
        return cls
    return wrap


def _name():
    return field(default="", compare=False)


# ---- source ---------------------------------------------------------------

@_term("var", ())
class Var(Term):
    level: Optional[int]
    name: str = _name()


@_term("let", (("nt", "name", "ty"), ("t", "bound"), ("B", "body", "name")))
class Let(Term):
    ty: Ty
    bound: Term
    body: Term
    name: str = _name()


@_term("unit", ())
class UnitLit(Term):
    pass


@_term("pair", (("t", "a"), ("t", "b")))
class Pair(Term):
    a: Term
    b: Term


@_term("fst", (("t", "t"),))
class Fst(Term):
    t: Term


@_term("snd", (("t", "t"),))
class Snd(Term):
    t: Term


@_term("inl", (("t", "t"), ("y?", "other")))
class Inl(Term):
    t: Term
    other: Optional[Ty] = None


@_term("inr", (("t", "t"), ("y?", "other")))
class Inr(Term):
    t: Term
    other: Optional[Ty] = None


@_term("case", (("t", "scrut"), ("bt", "left", "lname"), ("bt", "right", "rname")))
class Case(Term):
    scrut: Term
    left: Term
    right: Term
    lname: str = _name()
    rname: str = _name()


@_term("real", ())
class RealLit(Term):
    value: float


@_term("int", ())
class IntLit(Term):
    value: int


@_term("sign", (("t", "t"),))
class Sign(Term):
    t: Term


@_term("op", (("s", "op"), ("ts", "args")))
class PrimOp(Term):
    op: str
    args: Tuple[Term, ...]


@_term("lam", (("nt", "name", "ty"), ("B", "body", "name")))
class Lam(Term):
    ty: Ty
    body: Term
    name: str = _name()


@_term("app", (("t", "f"), ("t", "a")))
class App(Term):
    f: Term
    a: Term


@_term("build", (("t", "n"), ("bt", "body", "name")))
class Build(Term):
    n: Term
    body: Term
    name: str = _name()


@_term("index", (("t", "arr"), ("t", "idx")))
class Index(Term):
    arr: Term
    idx: Term


@_term("fold", (("bt", "body", "name"), ("t", "arr")))
class Fold(Term):
    body: Term
    arr: Term
    name: str = _name()


@_term("length", (("t", "arr"),))
class Length(Term):
    arr: Term


SOURCE_CLASSES = (Var, Let, UnitLit, Pair, Fst, Snd, Inl, Inr, Case, RealLit,
                  IntLit, Sign, PrimOp, Lam, App, Build, Index, Fold, Length)


# ---- target: linear API -----------------------------------------------------

@_term("lzero", (("r", "dense"), ("y", "ty")))
class LZero(Term):
    ty: Ty
    dense: bool = False


@_term("lplus", (("t", "a"), ("t", "b")))
class LPlus(Term):
    a: Term
    b: Term


@_term("lpair", (("t", "a"), ("t", "b")))
class LPairC(Term):
    a: Term
    b: Term


# ty is the LProd type of the argument; needed to build the zero component.
@_term("lfst", (("r", "dense"), ("y", "ty"), ("t", "t")))
class LFst(Term):
    t: Term
    ty: Ty
    dense: bool = False


@_term("lsnd", (("r", "dense"), ("y", "ty"), ("t", "t")))
class LSnd(Term):
    t: Term
    ty: Ty
    dense: bool = False


# ty is the resulting LSum type.
@_term("linl", (("y", "ty"), ("t", "t")))
class LInl(Term):
    t: Term
    ty: Ty


@_term("linr", (("y", "ty"), ("t", "t")))
class LInr(Term):
    t: Term
    ty: Ty


# ty is the LSum type of the argument.
@_term("lcastl", (("r", "dense"), ("y", "ty"), ("t", "t")))
class LCastL(Term):
    t: Term
    ty: Ty
    dense: bool = False


@_term("lcastr", (("r", "dense"), ("y", "ty"), ("t", "t")))
class LCastR(Term):
    t: Term
    ty: Ty
    dense: bool = False


@_term("dopt", (("s", "op"), ("t", "d"), ("ts", "primals")))
class DOpT(Term):
    op: str
    d: Term
    primals: Tuple[Term, ...]


# ---- target: accumulation monad ---------------------------------------------

@_term("return", (("c", "ctx"), ("t", "t")))
class EvmReturn(Term):
    ctx: Ctx
    t: Term


@_term("bind", (("t", "m"), ("t", "k")))
class EvmBind(Term):
    m: Term
    k: Term


@_term("seq", (("t", "a"), ("t", "b")))
class EvmSeq(Term):
    a: Term
    b: Term


@_term("one", (("c", "ctx"), ("i", "level"), ("t", "d")))
class EvmOne(Term):
    ctx: Ctx
    level: int
    d: Term


@_term("scope", (("y", "ty"), ("t", "m")))
class EvmScope(Term):
    ty: Ty
    m: Term


@_term("run", (("c", "ctx"), ("t", "m"), ("t", "env")))
class EvmRun(Term):
    ctx: Ctx
    m: Term
    env: Term


# ---- target: whole-environment cotangents (naive modes, run in/out) -------
# repr is "dense" (tuple of dense cotangents), "sparse" (tuple of sparse
# cotangents) or "map" (persistent balanced map keyed by level).

@_term("envzero", (("s", "repr"), ("c", "ctx")))
class EnvZero(Term):
    ctx: Ctx
    repr: str


@_term("envone", (("s", "repr"), ("c", "ctx"), ("i", "level"), ("t", "d")))
class EnvOne(Term):
    ctx: Ctx
    level: int
    d: Term
    repr: str


@_term("envplus", (("t", "a"), ("t", "b")))
class EnvPlus(Term):
    a: Term
    b: Term


# ctx includes the split-off top entry.
@_term("envsplit", (("c", "ctx"), ("t", "e")))
class EnvSplit(Term):
    ctx: Ctx
    e: Term


# ---- target: arrays ---------------------------------------------------------

@_term("bagone", (("t", "i"), ("t", "d")))
class BagOne(Term):
    i: Term
    d: Term


@_term("collect", (("t", "t"),))
class Collect(Term):
    t: Term


@_term("scatter", (("t", "init"), ("t", "pairs")))
class Scatter(Term):
    init: Term
    pairs: Term


@_term("unzip", (("t", "t"),))
class Unzip(Term):
    t: Term


@_term("zipwith", (("b2t", "body", "xname", "yname"), ("t", "a"), ("t", "b")))
class ZipWith(Term):
    body: Term
    a: Term
    b: Term
    xname: str = _name()
    yname: str = _name()


@_term("fromlist", (("t", "t"),))
class FromList(Term):
    t: Term


@_term("sequence", (("c", "ctx"), ("t", "t")))
class SequenceEvm(Term):
    ctx: Ctx
    t: Term


@_term("maparr", (("bt", "body", "name"), ("t", "arr")))
class MapArr(Term):
    body: Term
    arr: Term
    name: str = _name()


@_term("leaf", (("y", "fty"), ("t", "t")))
class TreeLeaf(Term):
    t: Term
    fty: Ty


@_term("node", (("t", "l"), ("t", "x"), ("t", "f"), ("t", "r")))
class TreeNode(Term):
    l: Term
    x: Term
    f: Term
    r: Term


@_term("geta", (("t", "t"),))
class GetA(Term):
    t: Term


@_term("untree", (("t", "g"), ("t", "d"), ("t", "tree")))
class UnTree(Term):
    g: Term
    d: Term
    tree: Term


# ---- target: logs for naive higher-order CHAD -------------------------------

@_term("nil", (("y", "ty"),))
class ListNil(Term):
    ty: Ty


@_term("cons", (("t", "h"), ("t", "t")))
class ListCons(Term):
    h: Term
    t: Term


@_term("append", (("t", "a"), ("t", "b")))
class ListAppend(Term):
    a: Term
    b: Term


@_term("foldlist", (("b2t", "body", "zname", "accname"), ("t", "init"), ("t", "lst")))
class FoldList(Term):
    body: Term
    init: Term
    lst: Term
    zname: str = _name()
    accname: str = _name()


# ---- target: closure conversion ----------------------------------------------

# tag is the type of the captured tuple; sig the SigmaTag type of the result.
@_term("pack", (("y", "tag"), ("y", "sig"), ("t", "t")))
class Pack(Term):
    tag: Ty
    t: Term
    sig: Ty


@_term("unpack", (("t", "scrut"), ("bt", "body", "name")))
class UnpackCase(Term):
    scrut: Term
    body: Term
    name: str = _name()


@_term("clam", (("nt", "name", "ty"), ("B", "body", "name")), closed=True)
class ClosedLam(Term):
    ty: Ty
    body: Term
    name: str = _name()


# Linear injection into the tagged sum; the tag is read from the runtime pack
# value `src`.  sty is the resulting LSigma type.
@_term("lpack", (("y", "sty"), ("t", "src"), ("t", "t")))
class LPackDyn(Term):
    src: Term
    t: Term
    sty: Ty


# Runtime-checked cast out of the tagged sum; zty is the payload cotangent type.
@_term("lcastsig", (("y", "tag"), ("y", "zty"), ("t", "t")))
class LCastSig(Term):
    tag: Ty
    t: Term
    zty: Ty


ALL_CLASSES = tuple(c for c in list(globals().values())
                    if isinstance(c, type) and issubclass(c, Term) and c is not Term)
BY_TAG = {c.head: c for c in ALL_CLASSES if c.head not in ("var", "real", "int", "unit")}


def binder_fields(cls):
    """[(term_field, (name_fields...))] for fields under binders."""
    out = []
    for spec in cls.sx:
        k = spec[0]
        if k == "B" or k == "bt":
            out.append((spec[1], (spec[2],)))
        elif k == "b2t":
            out.append((spec[1], (spec[2], spec[3])))
    return out


def term_fields(cls):
    """Subterm fields in evaluation order with their binder names."""
    out = []
    for spec in cls.sx:
        k = spec[0]
        if k == "t":
            out.append((spec[1], ()))
        elif k == "ts":
            out.append((spec[1], None))
        elif k in ("B", "bt"):
            out.append((spec[1], (spec[2],)))
        elif k == "b2t":
            out.append((spec[1], (spec[2], spec[3])))
    return out


for _c in ALL_CLASSES:
    _c.fields_ = tuple(term_fields(_c))
