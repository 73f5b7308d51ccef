"""Bracketing root scan, bisection and golden-section search on [lo, hi]."""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

from .errors import InvalidParameterError

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def bisect(f: Callable[[float], float], lo: float, hi: float, tol: float, f_lo: float | None = None) -> float:
    """Root of ``f`` in a sign-change bracket ``[lo, hi]``.

    Stops once the bracket is narrower than ``tol``; ``tol = 0`` runs to
    floating-point resolution.
    """
    if f_lo is None:
        f_lo = f(lo)
    if f_lo == 0.0:
        return lo
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        f_mid = f(mid)
        if f_mid == 0.0:
            return mid
        if (f_mid > 0.0) == (f_lo > 0.0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def scan_roots(
    f: Callable[[np.ndarray], np.ndarray],
    tol: float,
    cells: int = 1024,
    lo: float = 0.0,
    hi: float = 1.0,
) -> tuple[list[float], np.ndarray, np.ndarray]:
    """All sign-change roots of a vectorised ``f`` strictly inside ``(lo, hi)``.

    Returns ``(roots, grid, values)``.  Each sign change between consecutive
    non-zero grid values yields exactly one root; grid points where ``f`` is
    exactly zero count as the root of the change they sit in.
    """
    if not tol >= 0:
        raise InvalidParameterError(f"tol must be non-negative, got {tol!r}")
    if cells < 1:
        raise InvalidParameterError(f"cells must be positive, got {cells!r}")
    grid = np.linspace(lo, hi, cells + 1)
    values = np.asarray(f(grid), dtype=float)
    scalar = lambda z: float(f(np.float64(z)))  # noqa: E731

    roots: list[float] = []
    last = None  # index of the last non-zero sample
    for i, v in enumerate(values):
        if v == 0.0:
            continue
        if last is not None and (v > 0.0) != (values[last] > 0.0):
            if i - last > 1:
                # exact zero(s) on grid between; take the middle one
                root = float(grid[(last + i) // 2])
            else:
                root = bisect(scalar, float(grid[last]), float(grid[i]), tol, float(values[last]))
            if lo < root < hi:
                roots.append(root)
        last = i
    return roots, grid, values


def golden_max(f: Callable[[float], float], lo: float, hi: float, tol: float) -> float:
    """Maximiser of a unimodal ``f`` on ``[lo, hi]`` by golden-section search."""
    if not tol > 0:
        raise InvalidParameterError(f"tol must be positive, got {tol!r}")
    a, b = lo, hi
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
    return 0.5 * (a + b)
