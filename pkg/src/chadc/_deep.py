"""Run deeply recursive work on a thread with a large stack.

Generated derivative programs nest as deep as the source program is long,
and the tree-walking passes recurse on that nesting.  The cyclic garbage
collector is paused meanwhile: with tens of thousands of live frames every
collection rescans the whole stack, which made large passes quadratic."""
from __future__ import annotations

import functools
import gc
import sys
import threading

_STACK = 1 << 30
_local = threading.local()


def call_deep(fn, *args, **kwargs):
    if getattr(_local, "deep", False):
        return fn(*args, **kwargs)
    box = {}

    def target():
        _local.deep = True
        was_enabled = gc.isenabled()
        gc.disable()
        try:
            box["v"] = fn(*args, **kwargs)
        except BaseException as e:  # re-raised on the caller's thread
            box["e"] = e
        finally:
            if was_enabled:
                gc.enable()

    old = threading.stack_size()
    sys.setrecursionlimit(max(sys.getrecursionlimit(), 10 ** 7))
    threading.stack_size(_STACK)
    try:
        th = threading.Thread(target=target, name="chadc-deep")
        th.start()
    finally:
        threading.stack_size(old)
    th.join()
    if "e" in box:
        raise box["e"]
    return box["v"]


def deep(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        return call_deep(fn, *args, **kwargs)
    return wrapper
