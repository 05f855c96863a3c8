"""Hot-loop kernels, compiled when available.

The Cython extension ``_kernels`` is used if it was built; otherwise, or when
``QUADVAR_PURE_PYTHON=1`` is set, the numpy implementation in ``_kernels_py``
is used. Both produce identical numbers.
"""
import importlib
import os

from . import _kernels_py


def load_backend(name: str):
    if name == "python":
        return _kernels_py
    if name == "cython":
        return importlib.import_module("quadvar._kernels")
    raise ValueError(f"unknown backend {name!r}")


def _select():
    if os.environ.get("QUADVAR_PURE_PYTHON", "0") not in ("", "0"):
        return "python", _kernels_py
    try:
        return "cython", load_backend("cython")
    except ImportError:
        return "python", _kernels_py


BACKEND, _impl = _select()
centered_uniform_sum = _impl.centered_uniform_sum
splitmix_uniforms = _impl.splitmix_uniforms
