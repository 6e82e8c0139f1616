"""Kernel dispatch: the compiled extension when importable, else numpy.

Set ``CHEN_PURE_PYTHON=1`` to force the fallback.
"""
from __future__ import annotations

import os

BACKEND = "python"
if os.environ.get("CHEN_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from ._kernels import iterated_sum, polygon_linking  # noqa: F401

        BACKEND = "cython"
    except ImportError:  # pragma: no cover - depends on the build
        pass
if BACKEND == "python":
    from ._fallback import iterated_sum, polygon_linking  # noqa: F401
