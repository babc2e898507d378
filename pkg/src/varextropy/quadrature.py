"""Numerical integration used by the exact-measure routines and estimators."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

__all__ = ["QuadratureConfig", "adaptive_simpson", "integrate", "composite_simpson"]


@dataclass(frozen=True)
class QuadratureConfig:
    """Settings for adaptive Simpson quadrature.

    Parameters
    ----------
    abs_tol : float
        Absolute error target for a whole integral.
    max_depth : int
        Maximum number of bisections of any panel.
    """

    abs_tol: float = 1e-10
    max_depth: int = 60
    scheme: str = "adaptive-simpson"

    def __post_init__(self):
        if not self.abs_tol > 0:
            raise ValueError("abs_tol must be positive")
        if self.max_depth < 1:
            raise ValueError("max_depth must be at least 1")
        if self.scheme != "adaptive-simpson":
            raise ValueError(f"unknown quadrature scheme {self.scheme!r}")


DEFAULT_QUADRATURE = QuadratureConfig()


def adaptive_simpson(
    func: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    abs_tol: float = 1e-10,
    max_depth: int = 60,
) -> float:
    """Integrate a vectorised ``func`` over ``[a, b]`` by adaptive Simpson.

    Panels are refined breadth first, all panels of one level in a single
    call of ``func``. A panel with tolerance ``tol`` is accepted when the
    two-half estimate differs from the whole-panel estimate by at most
    ``15 * tol`` (or at rounding level); its halves inherit ``tol / 2``. Accepted panels contribute
    the Richardson-corrected value.
    """
    if a == b:
        return 0.0
    if b < a:
        return -adaptive_simpson(func, b, a, abs_tol, max_depth)
    lo = np.array([a], dtype=float)
    hi = np.array([b], dtype=float)
    fa, fm, fb = np.asarray(func(np.array([a, 0.5 * (a + b), b])), dtype=float)
    fa, fm, fb = np.array([fa]), np.array([fm]), np.array([fb])
    whole = (hi - lo) / 6.0 * (fa + 4.0 * fm + fb)
    tol = np.array([abs_tol])
    parts = []
    for depth in range(1, max_depth + 1):
        mid = 0.5 * (lo + hi)
        k = lo.size
        fq = np.asarray(func(np.concatenate([0.5 * (lo + mid), 0.5 * (mid + hi)])), dtype=float)
        flm, frm = fq[:k], fq[k:]
        left = (mid - lo) / 6.0 * (fa + 4.0 * flm + fm)
        right = (hi - mid) / 6.0 * (fm + 4.0 * frm + fb)
        delta = left + right - whole
        # a panel whose error is at rounding level cannot be improved further
        done = np.abs(delta) <= 15.0 * np.maximum(tol, 64 * np.finfo(float).eps * np.abs(left + right))
        if depth == max_depth and not done.all():
            warnings.warn("adaptive Simpson reached max_depth before converging", RuntimeWarning)
            done[:] = True
        if done.any():
            parts.append(float(np.sum((left + right + delta / 15.0)[done])))
        keep = ~done
        if not keep.any():
            break
        lo, mid, hi = lo[keep], mid[keep], hi[keep]
        fa, flm, fm, frm, fb = fa[keep], flm[keep], fm[keep], frm[keep], fb[keep]
        left, right, tol = left[keep], right[keep], tol[keep] / 2.0
        lo, hi = np.concatenate([lo, mid]), np.concatenate([mid, hi])
        fa, fm, fb = np.concatenate([fa, fm]), np.concatenate([flm, frm]), np.concatenate([fm, fb])
        whole = np.concatenate([left, right])
        tol = np.concatenate([tol, tol])
    return math.fsum(parts)


def integrate(
    func: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    config: QuadratureConfig | None = None,
    breakpoints: Sequence[float] = (),
) -> float:
    """Adaptive Simpson over ``[a, b]`` split at interior ``breakpoints``.

    The tolerance is shared evenly between the resulting panels.
    """
    config = config or DEFAULT_QUADRATURE
    edges = [a] + sorted(p for p in set(breakpoints) if a < p < b) + [b]
    tol = config.abs_tol / (len(edges) - 1)
    return math.fsum(
        adaptive_simpson(func, lo, hi, tol, config.max_depth) for lo, hi in zip(edges[:-1], edges[1:])
    )


def composite_simpson(values: np.ndarray, a: float, b: float) -> float:
    """Composite Simpson rule for samples on a uniform grid of an even number of panels."""
    values = np.asarray(values, dtype=float)
    panels = values.size - 1
    if panels < 2 or panels % 2:
        raise ValueError("composite Simpson needs an even number of panels")
    step = (b - a) / panels
    return step / 3.0 * (values[0] + values[-1] + 4.0 * values[1:-1:2].sum() + 2.0 * values[2:-1:2].sum())
