"""Search-kernel selection.

The hot inner loops (two-phase search, shallow optimal search) exist twice:
as a compiled Cython extension and as pure Python.  Both expose the same
functions and explore in the same deterministic order.  The compiled kernel
is preferred when importable; set CUBEBOT_KERNEL=python or
CUBEBOT_KERNEL=compiled to force one (the latter raises if the extension is
missing).
"""

from __future__ import annotations

import os

KERNEL_ENV_VAR = "CUBEBOT_KERNEL"


def load_kernel(name: str = "auto"):
    if name not in ("auto", "python", "compiled"):
        raise ValueError(f"unknown kernel {name!r}")
    if name in ("auto", "compiled"):
        try:
            from cubebot import _twophase_cy

            return _twophase_cy
        except ImportError:
            if name == "compiled":
                raise
    from cubebot import _twophase_py

    return _twophase_py


active_kernel = load_kernel(os.environ.get(KERNEL_ENV_VAR, "auto"))
