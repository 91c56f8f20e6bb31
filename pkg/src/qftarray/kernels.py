"""Backend selection for the hot loops.

The compiled extension is used when it imports; setting
``QFTARRAY_BACKEND=python`` forces the numpy fallback.  Both modules expose
``apply_h``, ``apply_cphase``, ``apply_swap`` and ``alias_counts``.
"""
import os
import warnings

from . import _pykernels

python_backend = _pykernels
compiled_backend = None

try:
    from . import _kernels as compiled_backend
except ImportError as exc:  # pragma: no cover - depends on the build
    if os.environ.get("QFTARRAY_BACKEND", "").lower() == "compiled":
        raise
    warnings.warn(f"qftarray: compiled kernels unavailable ({exc}); using numpy fallback")

if os.environ.get("QFTARRAY_BACKEND", "").lower() == "python" or compiled_backend is None:
    backend = python_backend
else:
    backend = compiled_backend

BACKEND = backend.BACKEND


def get_backend(name=None):
    """Kernel module by name (``"compiled"``/``"python"``), default the active one."""
    if name is None:
        return backend
    if name == "python":
        return python_backend
    if name == "compiled":
        if compiled_backend is None:
            raise RuntimeError("compiled kernels are not built")
        return compiled_backend
    raise ValueError(f"unknown backend {name!r}")
