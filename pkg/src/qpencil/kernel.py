"""Stepper kernel selection.

The compiled extension (_rk_c) is preferred when importable; the pure-Python
twin (_rk_py) is the fallback. PENCIL_KERNEL=python|compiled forces a choice,
which the benchmark and parity tests also use via get_kernel().
"""
from __future__ import annotations

import os

from . import _rk_py

try:
    from . import _rk_c
except ImportError:  # extension not built; pure Python carries on
    _rk_c = None


def available_kernels() -> dict:
    """Mapping of kernel name to its integrate_span callable."""
    table = {"python": _rk_py.integrate_span}
    if _rk_c is not None:
        table["compiled"] = _rk_c.integrate_span
    return table


def get_kernel(name: str):
    table = available_kernels()
    if name not in table:
        raise KeyError(
            f"kernel {name!r} not available (have: {sorted(table)})"
        )
    return table[name]


def _select():
    forced = os.environ.get("PENCIL_KERNEL", "").strip().lower()
    if forced:
        return forced, get_kernel(forced)
    if _rk_c is not None:
        return "compiled", _rk_c.integrate_span
    return "python", _rk_py.integrate_span


ACTIVE_KERNEL, integrate_span = _select()
