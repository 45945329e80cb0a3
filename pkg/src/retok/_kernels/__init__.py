"""Kernel lane selection: compiled extension when available, pure Python otherwise.

Set ``RETOK_PURE=1`` to force the pure lane (used by tests and benchmarks).
Both lanes are bit-for-bit interchangeable.
"""

import os

from . import pure
from .pure import ID_BITS, ID_MASK, pack_pair_lookup

if os.environ.get("RETOK_PURE"):
    _impl = pure
else:
    try:
        from . import _native as _impl
    except ImportError:
        _impl = pure

BACKEND = _impl.BACKEND
bpe_merge = _impl.bpe_merge
segment_counts = _impl.segment_counts

__all__ = [
    "BACKEND",
    "ID_BITS",
    "ID_MASK",
    "bpe_merge",
    "pack_pair_lookup",
    "pure",
    "segment_counts",
]
