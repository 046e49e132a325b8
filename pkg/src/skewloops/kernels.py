"""Kernel backend selection.

The compiled extension ``_ckernels`` is used when it imports; otherwise the
numpy twin in ``_kernels_py``.  Setting ``SKEWLOOPS_PURE_PYTHON=1`` forces
the fallback.
"""

import importlib
import os

from . import _kernels_py

_FUNCTIONS = ("reduce_angle", "trig_eval", "defect_grid_min", "sphere_polyline_crossing")


def load_backend(name):
    """Return the kernel module called ``name`` (``"cython"`` or ``"python"``)."""
    if name == "python":
        return _kernels_py
    if name == "cython":
        return importlib.import_module("skewloops._ckernels")
    raise ValueError(f"unknown kernel backend {name!r}")


def _select():
    if os.environ.get("SKEWLOOPS_PURE_PYTHON", "") not in ("", "0"):
        return "python", _kernels_py
    try:
        return "cython", load_backend("cython")
    except ImportError:
        return "python", _kernels_py


BACKEND, _impl = _select()

reduce_angle = _impl.reduce_angle
trig_eval = _impl.trig_eval
defect_grid_min = _impl.defect_grid_min
sphere_polyline_crossing = _impl.sphere_polyline_crossing
