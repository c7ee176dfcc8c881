"""Exception hierarchy.  User errors (parse/type) and runtime errors are kept
apart so the CLI can map them to exit codes."""


class ChadError(Exception):
    pass


class UserError(ChadError):
    pass


class ParseError(UserError):
    def __init__(self, msg: str, line: int = 0, col: int = 0):
        super().__init__("%d:%d: %s" % (line, col, msg))
        self.line = line
        self.col = col


class ScopeError(UserError):
    pass


class ChadTypeError(UserError):
    pass


class UnsupportedConstruct(UserError):
    pass


class UnsupportedType(UnsupportedConstruct):
    pass


class SizeOutOfRange(UserError):
    pass


class InventoryMismatch(UserError):
    pass


class EvalError(ChadError):
    pass


class PartialOp(EvalError):
    pass


class CotangentMismatch(EvalError):
    pass


class EmptyFold(EvalError):
    pass


class IndexOutOfBounds(EvalError):
    pass


class TagMismatch(EvalError):
    pass


class PopOnEmpty(EvalError):
    pass


class BadLevel(EvalError):
    pass
