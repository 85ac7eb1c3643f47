"""Scalar root finding: guaranteed-bracket bisection with secant polish."""

from __future__ import annotations

from typing import Callable

from .errors import NoRootError


def scan_brackets(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    step: float,
) -> list[tuple[float, float, float, float]]:
    """Walk [lo, hi] in increments of ``step`` and collect sign-change brackets.

    Returns tuples (a, b, fa, fb).  A grid point that is exactly zero is
    returned as a degenerate bracket (x, x, 0, 0).
    """
    brackets = []
    n = max(1, int(round((hi - lo) / step)))
    xa = lo
    fa = f(xa)
    for i in range(1, n + 1):
        xb = lo + (hi - lo) * i / n
        fb = f(xb)
        if fa == 0.0:
            brackets.append((xa, xa, 0.0, 0.0))
        elif fa * fb < 0.0:
            brackets.append((xa, xb, fa, fb))
        xa, fa = xb, fb
    if fa == 0.0:
        brackets.append((xa, xa, 0.0, 0.0))
    return brackets


def bisect_root(
    f: Callable[[float], float],
    a: float,
    b: float,
    fa: float | None = None,
    fb: float | None = None,
    xtol: float = 1e-12,
    ftol: float = 1e-10,
    max_iter: int = 200,
) -> float:
    """Root of ``f`` on a sign-change bracket [a, b].

    Plain bisection down to ``xtol``, then a few secant steps (kept inside
    the bracket) to push the residual below ``ftol`` where the function is
    smooth enough to allow it.
    """
    fa = f(a) if fa is None else fa
    fb = f(b) if fb is None else fb
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if fa * fb > 0.0:
        raise NoRootError(f"no sign change on [{a!r}, {b!r}]")
    for _ in range(max_iter):
        m = 0.5 * (a + b)
        if b - a <= xtol:
            break
        fm = f(m)
        if fm == 0.0:
            return m
        if fa * fm < 0.0:
            b, fb = m, fm
        else:
            a, fa = m, fm
    x0, f0 = a, fa
    x1, f1 = b, fb
    best, fbest = (x0, f0) if abs(f0) < abs(f1) else (x1, f1)
    for _ in range(8):
        if abs(fbest) <= ftol or f1 == f0:
            break
        x2 = x1 - f1 * (x1 - x0) / (f1 - f0)
        if not a <= x2 <= b:
            break
        f2 = f(x2)
        x0, f0, x1, f1 = x1, f1, x2, f2
        if abs(f2) < abs(fbest):
            best, fbest = x2, f2
    return best
