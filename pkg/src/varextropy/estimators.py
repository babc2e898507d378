"""Nonparametric estimators of the interval varextropy from a sample.

Three estimators share the empirical window mass ``M = F_n(t2) - F_n(t1)``:

``spacing``
    m-spacing density proxies ``p_j = (m/(n+1)) / (X_{j+m:n} - X_{j:n})``,
    ``j = 1..n-m``, each weighted by the indicator sum
    ``c_j = I(t1 <= X_{j:n} <= t2) + I(t1 <= X_{j+m:n} <= t2)``. With
    ``T = sum(p_j**2 c_j) / (2(n-m))`` and ``T' = (sum(p_j c_j) / (2(n-m)))**2``
    the estimate is ``T / (4 M**3) - T' / (4 M**4)``.
``kde-integral``
    The defining integrals with ``f`` replaced by the kernel estimate
    ``f_n``, computed by composite Simpson over the window.
``kde-plugin``
    ``int f_n**k dF_n`` replaced by ``(1/n) sum f_n(X_i)**k I(t1 <= X_i <= t2)``:
    ``first / (4 M**3) - second**2 / (4 M**4)`` for ``k = 2, 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator

from ._validation import check_sample_array
from .empirical import KdeConfig, SampleData, _kde_sorted, bandwidth, kernel_half_width, m_rule
from .exceptions import DegenerateSampleError, DegenerateWindowError, DomainError, TieError
from .measures import Window
from .quadrature import composite_simpson

__all__ = [
    "ESTIMATORS",
    "EstimatorConfig",
    "window_mass",
    "estimate_spacing",
    "estimate_kde_integral",
    "estimate_kde_plugin",
    "estimate",
    "IntervalVarextropy",
]

ESTIMATORS = ("spacing", "kde-integral", "kde-plugin")


@dataclass(frozen=True)
class EstimatorConfig:
    """Estimator choice and its tuning.

    Parameters
    ----------
    kind : {"spacing", "kde-integral", "kde-plugin"}
    kde : KdeConfig
        Kernel settings for the two kernel estimators.
    m_override : int, optional
        Spacing order; ``m_rule(n)`` when omitted.
    quad_panels : int
        Even number (at least 16) of Simpson panels for ``kde-integral``.
    """

    kind: str = "spacing"
    kde: KdeConfig = field(default_factory=KdeConfig)
    m_override: int | None = None
    quad_panels: int = 2048

    def __post_init__(self):
        if self.kind not in ESTIMATORS:
            raise ValueError(f"unknown estimator {self.kind!r}; expected one of {', '.join(ESTIMATORS)}")
        if self.quad_panels < 16 or self.quad_panels % 2:
            raise ValueError("quad_panels must be even and at least 16")
        if self.m_override is not None and self.m_override < 1:
            raise ValueError("m must be at least 1")


def window_mass(s, w) -> float:
    """Empirical mass of ``[t1, t2]``; raises :class:`DegenerateWindowError` when zero."""
    s = SampleData.coerce(s)
    w = Window.coerce(w)
    return _mass(s.values, w.t1, w.t2)


def _mass(values, t1, t2):
    # closed window, matching the closed indicators: F_n(t2) - F_n(t1-)
    count = np.searchsorted(values, t2, side="right") - np.searchsorted(values, t1, side="left")
    if count <= 0:
        raise DegenerateWindowError(f"window ({t1:g}, {t2:g}) contains no sample mass")
    return float(count / values.size)


def _inside(x, t1, t2):
    return (x >= t1) & (x <= t2)


def estimate_spacing(s, w, m: int | None = None) -> float:
    """m-spacing estimate; ``m`` defaults to ``m_rule(n)`` and must satisfy ``1 <= m <= n-1``."""
    s = SampleData.coerce(s)
    w = Window.coerce(w)
    x = s.values
    n = x.size
    if m is None:
        m = m_rule(n)
    if not 1 <= m <= n - 1:
        raise DomainError(f"spacing order m={m} must lie in [1, n-1] = [1, {n - 1}]")
    mass = _mass(x, w.t1, w.t2)
    lower, upper = x[:-m], x[m:]
    weight = _inside(lower, w.t1, w.t2).astype(float) + _inside(upper, w.t1, w.t2)
    gap = upper - lower
    active = weight > 0
    bad = np.flatnonzero(active & (gap <= 0))
    if bad.size:
        j = int(bad[0]) + 1
        raise TieError(j, f"zero spacing X[{j + m}] = X[{j}] at index j={j} inside the window; consider jittering")
    proxy = np.zeros(n - m)
    proxy[active] = (m / (n + 1)) / gap[active]
    norm = 2.0 * (n - m)
    with np.errstate(over="ignore", invalid="ignore"):
        t = np.sum(proxy * proxy * weight) / norm
        t_prime = np.square(np.sum(proxy * weight) / norm)
        value = t / (4 * mass**3) - t_prime / (4 * mass**4)
    if not np.isfinite(value):
        raise DomainError("spacing estimate overflows: spacings inside the window are too small")
    return float(value)


def _radius(s, cfg: KdeConfig):
    return kernel_half_width(bandwidth(s, cfg), cfg)


def estimate_kde_integral(s, w, cfg: KdeConfig | None = None, quad_panels: int = 2048) -> float:
    """Kernel estimate with the window integrals done by composite Simpson.

    The integration range is ``[t1, t2]`` intersected with the support of
    ``f_n`` (outside it ``f_n`` is zero, so the integrals are unchanged).
    """
    cfg = cfg or KdeConfig()
    s = SampleData.coerce(s)
    w = Window.coerce(w)
    x = s.values
    mass = _mass(x, w.t1, w.t2)
    radius = _radius(s, cfg)
    lo, hi = max(w.t1, x[0] - radius), min(w.t2, x[-1] + radius)
    if not lo < hi:
        return 0.0
    grid = np.linspace(lo, hi, quad_panels + 1)
    dens = _kde_sorted(x, radius, grid)
    i2 = composite_simpson(dens * dens, lo, hi)
    i3 = composite_simpson(dens**3, lo, hi)
    return i3 / (4 * mass**3) - i2 * i2 / (4 * mass**4)


def estimate_kde_plugin(s, w, cfg: KdeConfig | None = None) -> float:
    """Kernel estimate with the ``dF_n`` integrals as sample averages."""
    cfg = cfg or KdeConfig()
    s = SampleData.coerce(s)
    w = Window.coerce(w)
    x = s.values
    mass = _mass(x, w.t1, w.t2)
    inside = x[_inside(x, w.t1, w.t2)]
    dens = _kde_sorted(x, _radius(s, cfg), inside)
    first = float(np.sum(dens * dens)) / x.size
    second = float(np.sum(dens)) / x.size
    return first / (4 * mass**3) - second * second / (4 * mass**4)


def estimate(s, w, cfg: EstimatorConfig | None = None) -> float:
    """Dispatch on ``cfg.kind``."""
    cfg = cfg or EstimatorConfig()
    if cfg.kind == "spacing":
        return estimate_spacing(s, w, cfg.m_override)
    if cfg.kind == "kde-integral":
        return estimate_kde_integral(s, w, cfg.kde, cfg.quad_panels)
    return estimate_kde_plugin(s, w, cfg.kde)


class IntervalVarextropy(BaseEstimator):
    """Estimate the interval varextropy of the law behind a sample.

    Parameters
    ----------
    estimator : {"spacing", "kde-integral", "kde-plugin"}, default="kde-plugin"
    t1, t2 : float, default=(0.0, 1.0)
        Truncation window.
    m : int, optional
        Spacing order (``spacing`` only); the m-rule when omitted.
    bandwidth : "silverman" or float, default="silverman"
    kernel_scale : {"support", "sd"}, default="support"
    quad_panels : int, default=2048

    Attributes
    ----------
    value_ : float
        The estimate for the fitted sample.
    n_ : int
    m_ : int or None
        Spacing order used.
    bandwidth_ : float or None
        Kernel bandwidth used.
    """

    def __init__(
        self,
        estimator="kde-plugin",
        t1=0.0,
        t2=1.0,
        m=None,
        bandwidth="silverman",
        kernel_scale="support",
        quad_panels=2048,
    ):
        self.estimator = estimator
        self.t1 = t1
        self.t2 = t2
        self.m = m
        self.bandwidth = bandwidth
        self.kernel_scale = kernel_scale
        self.quad_panels = quad_panels

    def _config(self) -> EstimatorConfig:
        kde_cfg = KdeConfig(bandwidth=self.bandwidth, kernel_scale=self.kernel_scale)
        return EstimatorConfig(self.estimator, kde_cfg, self.m, self.quad_panels)

    def fit(self, X, y=None):
        cfg = self._config()
        sample = SampleData(check_sample_array(X))
        self.n_ = sample.n
        self.m_ = None
        self.bandwidth_ = None
        if cfg.kind == "spacing":
            if sample.n < 2:
                raise DegenerateSampleError("the spacing estimator needs n >= 2")
            self.m_ = cfg.m_override if cfg.m_override is not None else m_rule(sample.n)
            cfg = EstimatorConfig(cfg.kind, cfg.kde, self.m_, cfg.quad_panels)
        else:
            self.bandwidth_ = bandwidth(sample, cfg.kde)
        self.value_ = float(estimate(sample, (self.t1, self.t2), cfg))
        if not math.isfinite(self.value_):
            raise DomainError("estimate is not finite")
        return self
