"""Backend selection for the statevector kernels.

The compiled Cython module is used when it was built; otherwise the numpy
implementation is loaded. Setting ``FREEZEQ_PURE_PYTHON=1`` forces the numpy
path, which is how the benchmark and the cross-backend tests run both.
"""

import importlib
import os

from . import _pykernels

_FORCE_PY = os.environ.get("FREEZEQ_PURE_PYTHON", "").strip().lower() in {"1", "true", "yes"}

try:
    if _FORCE_PY:
        raise ImportError("pure-python backend forced")
    from . import _ckernels as _impl

    BACKEND = "cython"
except ImportError:
    _impl = _pykernels
    BACKEND = "python"

apply_1q = _impl.apply_1q
apply_cz = _impl.apply_cz
apply_cnot = _impl.apply_cnot
pauli_expectation = _impl.pauli_expectation
pauli_apply = _impl.pauli_apply


def available_backends():
    names = ["python"]
    try:
        importlib.import_module(__name__ + "._ckernels")
        names.append("cython")
    except ImportError:
        pass
    return names


def load_backend(name):
    """Return the kernel module for ``name`` ("python" or "cython")."""
    if name == "python":
        return _pykernels
    if name == "cython":
        return importlib.import_module(__name__ + "._ckernels")
    raise ValueError(f"unknown kernel backend {name!r}")
