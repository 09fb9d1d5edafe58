"""Kernel backend selection.

Imports the compiled Cython kernel when available, falling back to the
pure-NumPy implementation otherwise.  Setting the environment variable
``BANDITINDEX_NO_EXTENSION=1`` forces the fallback, which is useful for
testing and benchmarking the two implementations against each other.
"""
from __future__ import annotations

import os

from . import fallback

if os.environ.get("BANDITINDEX_NO_EXTENSION", "") == "1":
    advance_column = fallback.advance_column
    BACKEND = "fallback"
else:
    try:
        from ._core import advance_column

        BACKEND = "compiled"
    except ImportError:  # pragma: no cover - depends on build environment
        advance_column = fallback.advance_column
        BACKEND = "fallback"


def get_backend() -> str:
    """Return which kernel implementation is active: ``compiled`` or ``fallback``."""
    return BACKEND


__all__ = ["advance_column", "get_backend", "BACKEND", "fallback"]
