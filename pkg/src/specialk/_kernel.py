"""Import-time selection of the exact-arithmetic kernel.

The compiled Cython kernel is preferred; the pure-Python twin is used when
the extension is unavailable or when SPECIALK_PURE is set in the
environment.  Both expose the same functions (rref, matmul) with identical
semantics, so everything above this module is backend-agnostic.
"""

import os
from contextlib import contextmanager

from . import _exact_impl as _python_impl

try:
    from . import _exact_cy as _cython_impl
except ImportError:
    _cython_impl = None

if os.environ.get("SPECIALK_PURE") or _cython_impl is None:
    _active = _python_impl
else:
    _active = _cython_impl

BACKEND = "python" if _active.is_python_impl else "cython"

rref = _active.rref
matmul = _active.matmul


def available_backends():
    out = {"python": _python_impl}
    if _cython_impl is not None:
        out["cython"] = _cython_impl
    return out


def get_backend(name):
    """Fetch a kernel module by name ('python' or 'cython'); for benchmarks."""
    backends = available_backends()
    if name not in backends:
        raise KeyError(f"kernel backend {name!r} not available")
    return backends[name]


@contextmanager
def use_backend(name):
    """Temporarily route kernel calls through the named backend (callers
    resolve rref/matmul through this module at call time)."""
    global rref, matmul, BACKEND
    impl = get_backend(name)
    saved = (rref, matmul, BACKEND)
    rref, matmul, BACKEND = impl.rref, impl.matmul, name
    try:
        yield impl
    finally:
        rref, matmul, BACKEND = saved
