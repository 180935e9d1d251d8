"""Bracketed one-dimensional minimization on an unbounded scale."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.optimize import brentq, minimize_scalar


@dataclass(frozen=True)
class LineMin:
    t: float
    value: float
    at_edge: Optional[str] = None  # "low"/"high" when no interior minimum was found


def minimize_line(
    f: Callable,
    center: float,
    dfdt: Optional[Callable] = None,
    width: float = 12.0,
    grid: int = 97,
    tol: float = 1e-10,
    max_expand: int = 6,
) -> LineMin:
    """Minimize ``f(t)`` over the real line.

    A vectorized grid scan around ``center`` picks the global basin, widening
    the window while the best point sits on its edge. Inside the basin the
    minimum is located with Brent's golden-section/parabolic method and,
    when ``dfdt`` is supplied, polished by solving ``dfdt(t) = 0`` on the
    bracket, which is what makes a 1e-10 parameter tolerance reachable.
    """
    lo, hi = center - width, center + width
    edge = None
    for _ in range(max_expand + 1):
        ts = np.linspace(lo, hi, grid)
        with np.errstate(all="ignore"):
            fs = np.asarray(f(ts), dtype=float)
        fs = np.where(np.isnan(fs), np.inf, fs)
        i = int(np.argmin(fs))
        if not np.isfinite(fs[i]):
            raise ArithmeticError("objective is not finite anywhere on the search grid")
        if i == 0:
            edge = "low"
            span = hi - lo
            hi, lo = ts[1], ts[0] - 2 * span
        elif i == grid - 1:
            edge = "high"
            span = hi - lo
            lo, hi = ts[-2], ts[-1] + 2 * span
        else:
            edge = None
            break
    if edge is not None:
        return LineMin(float(ts[i]), float(fs[i]), at_edge=edge)

    a, b = float(ts[i - 1]), float(ts[i + 1])
    res = minimize_scalar(f, bounds=(a, b), method="bounded", options={"xatol": tol})
    t_best, f_best = float(res.x), float(res.fun)
    if fs[i] < f_best:
        t_best, f_best = float(ts[i]), float(fs[i])

    if dfdt is not None:
        # shrink to a bracket where the derivative changes sign, then solve
        step = max(1e-6, 4 * abs(b - a) / grid)
        lo_t, hi_t = max(a, t_best - step), min(b, t_best + step)
        with np.errstate(all="ignore"):
            glo, ghi = dfdt(lo_t), dfdt(hi_t)
            if not (glo < 0 < ghi):
                lo_t, hi_t = a, b
                glo, ghi = dfdt(a), dfdt(b)
            if glo < 0 < ghi:
                t_root = brentq(dfdt, lo_t, hi_t, xtol=1e-14, rtol=4 * np.finfo(float).eps)
                f_root = float(f(t_root))
                if f_root <= f_best + 1e-12 * max(1.0, abs(f_best)):
                    t_best, f_best = t_root, f_root
    return LineMin(t_best, f_best)
