"""Hot kernels: compiled when the extension is built, pure Python otherwise.

Set ``REGALG_PURE=1`` to force the fallback.  ``BACKEND`` names the active one.
"""
import os

from . import _pykernels

try:
    if os.environ.get("REGALG_PURE"):
        raise ImportError("pure backend requested")
    from . import _ckernels as _impl
    BACKEND = "cython"
except ImportError:
    _impl = _pykernels
    BACKEND = "python"

is_monotone = _impl.is_monotone
monotone_tables = _impl.monotone_tables
table_kleene = _impl.table_kleene
capped_kleene = _impl.capped_kleene

__all__ = ["BACKEND", "capped_kleene", "is_monotone", "monotone_tables", "table_kleene"]
