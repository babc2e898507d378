"""Parametric distribution catalogue.

Every model exposes a vectorised density, CDF, survival function, quantile
and density derivative, plus inverse-CDF sampling that consumes exactly one
uniform per draw. Densities and CDFs are clamped outside the support rather
than raising, because the estimators probe arbitrary reals.

Distributions are described on the command line by a small grammar::

    exp:rate=1   pareto1:a=1,b=2   power:a=1,b=2   squarecdf   example5
    uniform:lo=0,hi=1   gamma:shape=2,rate=1
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .exceptions import DomainError, ParseError

__all__ = [
    "Support",
    "Distribution",
    "Exponential",
    "ParetoI",
    "Power",
    "SquareCdf",
    "Example5",
    "Uniform",
    "Gamma",
    "AffineTransformed",
    "pdf",
    "cdf",
    "quantile",
    "sample",
    "parse_distribution",
]

# probability cut used as a stand-in for an infinite support endpoint
TAIL_PROBABILITY = 1e-12


@dataclass(frozen=True)
class Support:
    lower: float
    upper: float

    def __post_init__(self):
        if not self.lower < self.upper:
            raise ValueError("support requires lower < upper")

    def contains(self, x):
        x = np.asarray(x, dtype=float)
        return (x >= self.lower) & (x <= self.upper)


class Distribution:
    """Base class; subclasses implement the ``_pdf``/``_cdf``/``_ppf`` kernels
    on the interior of the support."""

    #: interior points where the density is not smooth
    breakpoints: tuple = ()

    @property
    def support(self) -> Support:
        raise NotImplementedError

    @property
    def spec(self) -> str:
        raise NotImplementedError

    def __str__(self):
        return self.spec

    # -- public, clamped evaluations ------------------------------------
    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        inside = self.support.contains(x)
        with np.errstate(all="ignore"):
            out = np.where(inside, self._pdf(np.where(inside, x, self._anchor)), 0.0)
        return out[()] if out.ndim == 0 else out

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        sup = self.support
        inside = (x > sup.lower) & (x < sup.upper)
        with np.errstate(all="ignore"):
            val = self._cdf(np.where(inside, x, self._anchor))
        out = np.where(x >= sup.upper, 1.0, np.where(inside, np.clip(val, 0.0, 1.0), 0.0))
        return out[()] if out.ndim == 0 else out

    def sf(self, x):
        x = np.asarray(x, dtype=float)
        sup = self.support
        inside = (x > sup.lower) & (x < sup.upper)
        with np.errstate(all="ignore"):
            val = self._sf(np.where(inside, x, self._anchor))
        out = np.where(x <= sup.lower, 1.0, np.where(inside, np.clip(val, 0.0, 1.0), 0.0))
        return out[()] if out.ndim == 0 else out

    def pdf_derivative(self, x):
        x = np.asarray(x, dtype=float)
        sup = self.support
        inside = (x > sup.lower) & (x < sup.upper)
        with np.errstate(all="ignore"):
            out = np.where(inside, self._dpdf(np.where(inside, x, self._anchor)), 0.0)
        return out[()] if out.ndim == 0 else out

    def quantile(self, u):
        u = np.asarray(u, dtype=float)
        if np.any(~((u > 0) & (u < 1))):
            raise DomainError("quantile requires 0 < u < 1")
        out = self._ppf(u)
        return out[()] if out.ndim == 0 else out

    def rvs(self, n: int, rng) -> np.ndarray:
        """``n`` draws in stream order; ``rng`` only needs a ``random(size)`` method."""
        if n < 1:
            raise DomainError("sample size must be at least 1")
        u = np.asarray(rng.random(n), dtype=float)
        return np.asarray(self._ppf(u), dtype=float)

    def effective_support(self) -> tuple[float, float]:
        """Finite integration range: infinite endpoints become extreme quantiles."""
        lo, hi = self.support.lower, self.support.upper
        if not math.isfinite(lo):
            lo = float(self._ppf(np.array(TAIL_PROBABILITY))[()])
        if not math.isfinite(hi):
            hi = float(self._ppf(np.array(1.0 - TAIL_PROBABILITY))[()])
        return lo, hi

    # -- subclass hooks ------------------------------------------------
    @property
    def _anchor(self) -> float:
        # any interior point, used to keep masked evaluations finite
        lo, hi = self.support.lower, self.support.upper
        if math.isfinite(lo) and math.isfinite(hi):
            return 0.5 * (lo + hi)
        return lo + 1.0 if math.isfinite(lo) else hi - 1.0

    def _sf(self, x):
        return 1.0 - self._cdf(x)

    def _pdf(self, x):
        raise NotImplementedError

    def _cdf(self, x):
        raise NotImplementedError

    def _ppf(self, u):
        raise NotImplementedError

    def _dpdf(self, x):
        raise NotImplementedError


def _positive(name, value):
    value = float(value)
    if not (value > 0 and math.isfinite(value)):
        raise DomainError(f"{name} must be a positive finite number, got {value!r}")
    return value


@dataclass(frozen=True)
class Exponential(Distribution):
    rate: float = 1.0

    def __post_init__(self):
        _positive("rate", self.rate)

    @property
    def support(self):
        return Support(0.0, math.inf)

    @property
    def spec(self):
        return f"exp:rate={self.rate:g}"

    def _pdf(self, x):
        return self.rate * np.exp(-self.rate * x)

    def _cdf(self, x):
        return -np.expm1(-self.rate * x)

    def _sf(self, x):
        return np.exp(-self.rate * x)

    def _ppf(self, u):
        return -np.log1p(-u) / self.rate

    def _dpdf(self, x):
        return -self.rate * self._pdf(x)


@dataclass(frozen=True)
class ParetoI(Distribution):
    """Pareto type I with survival function ``(a/x)**b`` for ``x > a``."""

    a: float = 1.0
    b: float = 1.0

    def __post_init__(self):
        _positive("a", self.a)
        _positive("b", self.b)

    @property
    def support(self):
        return Support(self.a, math.inf)

    @property
    def spec(self):
        return f"pareto1:a={self.a:g},b={self.b:g}"

    def _pdf(self, x):
        return self.b * self.a**self.b * x ** (-self.b - 1.0)

    def _sf(self, x):
        return (self.a / x) ** self.b

    def _cdf(self, x):
        return -np.expm1(self.b * np.log(self.a / x))

    def _ppf(self, u):
        return self.a * (1.0 - u) ** (-1.0 / self.b)

    def _dpdf(self, x):
        return -(self.b + 1.0) / x * self._pdf(x)


@dataclass(frozen=True)
class Power(Distribution):
    """Power law with CDF ``(x/a)**b`` on ``(0, a)``."""

    a: float = 1.0
    b: float = 1.0

    def __post_init__(self):
        _positive("a", self.a)
        _positive("b", self.b)

    @property
    def support(self):
        return Support(0.0, self.a)

    @property
    def spec(self):
        return f"power:a={self.a:g},b={self.b:g}"

    def _pdf(self, x):
        return self.b / self.a * (x / self.a) ** (self.b - 1.0)

    def _cdf(self, x):
        return (x / self.a) ** self.b

    def _ppf(self, u):
        return self.a * u ** (1.0 / self.b)

    def _dpdf(self, x):
        return (self.b - 1.0) / x * self._pdf(x)


@dataclass(frozen=True)
class SquareCdf(Distribution):
    """CDF ``x**2`` on ``(0, 1)``."""

    @property
    def support(self):
        return Support(0.0, 1.0)

    @property
    def spec(self):
        return "squarecdf"

    def _pdf(self, x):
        return 2.0 * x

    def _cdf(self, x):
        return x * x

    def _ppf(self, u):
        return np.sqrt(u)

    def _dpdf(self, x):
        return np.full_like(x, 2.0)


_E5_KNOT = math.exp(-1.5)


@dataclass(frozen=True)
class Example5(Distribution):
    """Piecewise law on ``(0, 2)`` with a density kink at ``x = 1``.

    ``F(x) = exp(-1/2 - 1/x)`` on ``(0, 1]`` and ``exp(-2 + x**2/2)`` on ``[1, 2)``.
    """

    breakpoints = (1.0,)

    @property
    def support(self):
        return Support(0.0, 2.0)

    @property
    def spec(self):
        return "example5"

    def _pdf(self, x):
        low = np.where(x > 0, np.exp(-0.5 - 1.0 / x) / (x * x), 0.0)
        high = x * np.exp(-2.0 + 0.5 * x * x)
        return np.where(x <= 1.0, low, high)

    def _cdf(self, x):
        return np.where(x <= 1.0, np.exp(-0.5 - 1.0 / x), np.exp(-2.0 + 0.5 * x * x))

    def _ppf(self, u):
        u = np.asarray(u, dtype=float)
        with np.errstate(divide="ignore"):
            logu = np.log(u)
            low = -1.0 / (logu + 0.5)
        high = np.sqrt(np.maximum(2.0 * (logu + 2.0), 0.0))
        return np.where(u <= _E5_KNOT, np.where(u > 0, low, 0.0), high)

    def _dpdf(self, x):
        low = self._pdf(x) * (1.0 / (x * x) - 2.0 / x)
        high = (1.0 + x * x) * np.exp(-2.0 + 0.5 * x * x)
        return np.where(x <= 1.0, low, high)


@dataclass(frozen=True)
class Uniform(Distribution):
    lower: float = 0.0
    upper: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.lower) and math.isfinite(self.upper) and self.lower < self.upper):
            raise DomainError("uniform requires finite lo < hi")

    @property
    def support(self):
        return Support(float(self.lower), float(self.upper))

    @property
    def spec(self):
        return f"uniform:lo={self.lower:g},hi={self.upper:g}"

    def _pdf(self, x):
        return np.full_like(x, 1.0 / (self.upper - self.lower))

    def _cdf(self, x):
        return (x - self.lower) / (self.upper - self.lower)

    def _ppf(self, u):
        return self.lower + u * (self.upper - self.lower)

    def _dpdf(self, x):
        return np.zeros_like(x)


@dataclass(frozen=True)
class Gamma(Distribution):
    """Gamma with shape ``k`` and rate ``theta``; inverse-CDF sampled."""

    shape: float = 2.0
    rate: float = 1.0

    def __post_init__(self):
        _positive("shape", self.shape)
        _positive("rate", self.rate)

    @property
    def support(self):
        return Support(0.0, math.inf)

    @property
    def spec(self):
        return f"gamma:shape={self.shape:g},rate={self.rate:g}"

    def _pdf(self, x):
        k, th = self.shape, self.rate
        return np.exp(special.xlogy(k - 1.0, x) - th * x + k * math.log(th) - special.gammaln(k))

    def _cdf(self, x):
        return special.gammainc(self.shape, self.rate * x)

    def _sf(self, x):
        return special.gammaincc(self.shape, self.rate * x)

    def _ppf(self, u):
        return special.gammaincinv(self.shape, u) / self.rate

    def _dpdf(self, x):
        return self._pdf(x) * ((self.shape - 1.0) / x - self.rate)


@dataclass(frozen=True)
class AffineTransformed(Distribution):
    """Law of ``scale * X + shift`` for ``scale > 0``."""

    base: Distribution
    scale: float
    shift: float = 0.0

    def __post_init__(self):
        _positive("scale", self.scale)

    @property
    def breakpoints(self):
        return tuple(self.scale * p + self.shift for p in self.base.breakpoints)

    @property
    def support(self):
        s = self.base.support
        return Support(self.scale * s.lower + self.shift, self.scale * s.upper + self.shift)

    @property
    def spec(self):
        return f"{self.base.spec}*{self.scale:g}+{self.shift:g}"

    def _x(self, y):
        return (y - self.shift) / self.scale

    def _pdf(self, y):
        return self.base._pdf(self._x(y)) / self.scale

    def _cdf(self, y):
        return self.base._cdf(self._x(y))

    def _sf(self, y):
        return self.base._sf(self._x(y))

    def _ppf(self, u):
        return self.scale * self.base._ppf(u) + self.shift

    def _dpdf(self, y):
        return self.base._dpdf(self._x(y)) / self.scale**2


# -- functional surface ---------------------------------------------------
def pdf(model: Distribution, x):
    return model.pdf(x)


def cdf(model: Distribution, x):
    return model.cdf(x)


def quantile(model: Distribution, u):
    return model.quantile(u)


def sample(model: Distribution, n: int, rng):
    """Draw ``n`` observations and wrap them as sorted :class:`SampleData`."""
    from .empirical import SampleData

    return SampleData(model.rvs(n, rng))


# -- spec grammar -----------------------------------------------------------
_GRAMMAR = {
    "exp": (Exponential, {"rate": "rate"}, True),
    "pareto1": (ParetoI, {"a": "a", "b": "b"}, True),
    "power": (Power, {"a": "a", "b": "b"}, True),
    "squarecdf": (SquareCdf, {}, True),
    "example5": (Example5, {}, True),
    "uniform": (Uniform, {"lo": "lower", "hi": "upper"}, False),
    "gamma": (Gamma, {"shape": "shape", "rate": "rate"}, True),
}


def parse_distribution(text: str) -> Distribution:
    """Parse ``name[:key=value,...]`` into a model.

    Raises :class:`ParseError` naming the offending token on unknown names,
    unknown or missing keys, non-numeric values or nonpositive parameters.
    """
    text = text.strip()
    name, _, rest = text.partition(":")
    name = name.strip().lower()
    if name not in _GRAMMAR:
        raise ParseError(f"unknown distribution {name!r} in {text!r}")
    cls, keys, positive = _GRAMMAR[name]
    kwargs = {}
    if rest.strip():
        for token in rest.split(","):
            key, eq, value = token.partition("=")
            key = key.strip()
            if not eq or key not in keys:
                raise ParseError(f"unknown parameter token {token.strip()!r} for {name}")
            if keys[key] in kwargs:
                raise ParseError(f"duplicate parameter token {token.strip()!r}")
            try:
                val = float(value)
            except ValueError:
                raise ParseError(f"non-numeric value in token {token.strip()!r}") from None
            if not math.isfinite(val) or (positive and val <= 0):
                raise ParseError(f"parameter must be positive and finite in token {token.strip()!r}")
            kwargs[keys[key]] = val
    missing = set(keys.values()) - set(kwargs)
    if missing:
        raise ParseError(f"missing parameter(s) {sorted(k for k, v in keys.items() if v in missing)} for {name}")
    try:
        return cls(**kwargs)
    except DomainError as exc:
        raise ParseError(f"{text!r}: {exc}") from None
