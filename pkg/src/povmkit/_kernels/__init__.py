"""Kernel backend selection.

Imports the compiled Cython kernels when the extension was built, otherwise
falls back to the pure-numpy twin.  Set ``POVMKIT_PURE_PYTHON=1`` to force
the fallback (used by the backend-parity tests and the benchmark).
"""

import os

from . import _pykernels

if os.environ.get("POVMKIT_PURE_PYTHON"):
    _impl = _pykernels
else:
    try:
        from . import _ckernels as _impl
    except ImportError:
        _impl = _pykernels

laguerre_values = _impl.laguerre_values
displacement_matrix = _impl.displacement_matrix
char_values = _impl.char_values
coherent_overlaps = _impl.coherent_overlaps
displaced_vectors = _impl.displaced_vectors


def backend_name() -> str:
    """Name of the active kernel backend ("cython" or "python")."""
    return _impl.BACKEND_NAME
