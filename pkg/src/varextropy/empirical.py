"""Samples, the empirical CDF and the Epanechnikov kernel density estimator."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Union

import numpy as np
from sklearn.base import BaseEstimator

from ._validation import check_sample_array
from .exceptions import DegenerateSampleError, DomainError, ParseError

__all__ = [
    "SampleData",
    "KdeConfig",
    "empirical_cdf",
    "sample_var_std",
    "bandwidth",
    "kernel_half_width",
    "kde",
    "m_rule",
    "epanechnikov",
    "EpanechnikovKDE",
    "read_sample",
]

# the Epanechnikov kernel on [-1, 1] has variance 1/5
SQRT5 = math.sqrt(5.0)


class SampleData:
    """Immutable sorted sample ``X_{1:n} <= ... <= X_{n:n}``."""

    __slots__ = ("_values",)

    def __init__(self, values):
        arr = np.sort(np.asarray(values, dtype=float).ravel())
        if arr.size < 1:
            raise DegenerateSampleError("a sample needs at least one observation")
        if not np.all(np.isfinite(arr)):
            raise DomainError("sample values must be finite")
        arr.setflags(write=False)
        self._values = arr

    @classmethod
    def coerce(cls, values) -> "SampleData":
        return values if isinstance(values, cls) else cls(values)

    @property
    def values(self) -> np.ndarray:
        return self._values

    @property
    def n(self) -> int:
        return self._values.size

    def __len__(self):
        return self._values.size

    def __repr__(self):
        return f"SampleData(n={self.n}, min={self._values[0]:g}, max={self._values[-1]:g})"

    def ecdf(self, x):
        return empirical_cdf(self, x)


@dataclass(frozen=True)
class KdeConfig:
    """Kernel density settings.

    Parameters
    ----------
    bandwidth : "silverman" or float
        ``"silverman"`` is ``1.06 * s * n**(-1/5)`` with ``s`` the sample
        standard deviation; a float is used as is.
    kernel_scale : {"support", "sd"}
        How the bandwidth ``h`` scales the kernel. ``"support"`` uses
        ``K(u/h)/h``, so the kernel vanishes beyond ``|x - X_i| >= h``.
        ``"sd"`` treats ``h`` as the kernel's standard deviation (the
        convention of R's ``density()``), stretching the support to
        ``sqrt(5) * h``.
    """

    bandwidth: Union[str, float] = "silverman"
    kernel_scale: str = "support"
    kernel: str = "epanechnikov"

    def __post_init__(self):
        if self.kernel != "epanechnikov":
            raise ValueError(f"unsupported kernel {self.kernel!r}")
        if self.kernel_scale not in ("support", "sd"):
            raise ValueError("kernel_scale must be 'support' or 'sd'")
        if isinstance(self.bandwidth, str):
            if self.bandwidth != "silverman":
                raise ValueError(f"unknown bandwidth rule {self.bandwidth!r}")
        elif not (float(self.bandwidth) > 0 and math.isfinite(float(self.bandwidth))):
            raise ValueError("a fixed bandwidth must be positive and finite")


def empirical_cdf(s, x):
    """``F_n(x) = #{X_i <= x} / n`` (right-continuous, ties counted)."""
    s = SampleData.coerce(s)
    out = np.searchsorted(s.values, np.asarray(x, dtype=float), side="right") / s.n
    return out[()] if np.ndim(out) == 0 else out


def sample_var_std(s) -> tuple[float, float]:
    s = SampleData.coerce(s)
    if s.n < 2:
        raise DegenerateSampleError("variance needs at least two observations")
    var = float(np.var(s.values, ddof=1))
    return var, math.sqrt(var)


def bandwidth(s, cfg: KdeConfig | None = None) -> float:
    cfg = cfg or KdeConfig()
    if not isinstance(cfg.bandwidth, str):
        return float(cfg.bandwidth)
    s = SampleData.coerce(s)
    if s.n < 2:
        raise DegenerateSampleError("the bandwidth rule needs at least two observations")
    _, sd = sample_var_std(s)
    if sd == 0:
        raise DegenerateSampleError("the bandwidth rule needs a nonzero standard deviation")
    return 1.06 * sd * s.n ** (-0.2)


def kernel_half_width(h: float, cfg: KdeConfig | None = None) -> float:
    """Radius of the kernel support for bandwidth ``h``."""
    cfg = cfg or KdeConfig()
    return h * SQRT5 if cfg.kernel_scale == "sd" else h


def epanechnikov(u):
    u = np.asarray(u, dtype=float)
    return np.where(np.abs(u) < 1.0, 0.75 * (1.0 - u * u), 0.0)


def _kde_sorted(values: np.ndarray, radius: float, x: np.ndarray) -> np.ndarray:
    # f_n(x) = 3/(4nR) * sum_{|x-X_i|<R} (1 - (x-X_i)^2/R^2), with the in-window
    # count and power sums read off prefix sums of the sorted sample
    n = values.size
    center = 0.5 * (values[0] + values[-1])
    v = values - center
    x = np.asarray(x, dtype=float) - center
    s1 = np.concatenate(([0.0], np.cumsum(v)))
    s2 = np.concatenate(([0.0], np.cumsum(v * v)))
    lo = np.searchsorted(v, x - radius, side="right")
    hi = np.searchsorted(v, x + radius, side="left")
    count = hi - lo
    sq = count * x * x - 2.0 * x * (s1[hi] - s1[lo]) + (s2[hi] - s2[lo])
    dens = 0.75 * (count - sq / (radius * radius)) / (n * radius)
    return np.maximum(dens, 0.0)


def kde(s, cfg: KdeConfig | None, x):
    """Epanechnikov kernel density estimate ``f_n`` evaluated at ``x``."""
    cfg = cfg or KdeConfig()
    s = SampleData.coerce(s)
    radius = kernel_half_width(bandwidth(s, cfg), cfg)
    out = _kde_sorted(s.values, radius, x)
    return out[()] if np.ndim(out) == 0 else out


def m_rule(n: int) -> int:
    """Spacing order ``m = floor(sqrt(n) + 0.5)``, clamped to ``[1, n-1]``."""
    if n < 2:
        raise DegenerateSampleError("the m-rule needs n >= 2")
    m = int(math.floor(math.sqrt(n) + 0.5))
    return min(max(m, 1), n - 1)


class EpanechnikovKDE(BaseEstimator):
    """Epanechnikov kernel density estimator with the 1.06 rule-of-thumb bandwidth.

    Parameters
    ----------
    bandwidth : "silverman" or float, default="silverman"
    kernel_scale : {"support", "sd"}, default="support"

    Attributes
    ----------
    sample_ : SampleData
    bandwidth_ : float
        Bandwidth ``h`` as produced by the rule (or the fixed value).
    radius_ : float
        Half-width of the kernel support.
    """

    def __init__(self, bandwidth="silverman", kernel_scale="support"):
        self.bandwidth = bandwidth
        self.kernel_scale = kernel_scale

    def _config(self):
        return KdeConfig(bandwidth=self.bandwidth, kernel_scale=self.kernel_scale)

    def fit(self, X, y=None):
        cfg = self._config()
        self.sample_ = SampleData(check_sample_array(X))
        self.n_ = self.sample_.n
        self.bandwidth_ = bandwidth(self.sample_, cfg)
        self.radius_ = kernel_half_width(self.bandwidth_, cfg)
        return self

    def _check_fitted(self):
        if not hasattr(self, "sample_"):
            from sklearn.exceptions import NotFittedError

            raise NotFittedError("EpanechnikovKDE is not fitted yet; call fit first")

    def density(self, X):
        self._check_fitted()
        x = check_sample_array(X, allow_empty=True)
        return _kde_sorted(self.sample_.values, self.radius_, x)

    def score_samples(self, X):
        """Log density (``-inf`` outside the kernel support)."""
        with np.errstate(divide="ignore"):
            return np.log(self.density(X))

    def score(self, X, y=None):
        return float(np.sum(self.score_samples(X)))


def read_sample(path, column=None) -> SampleData:
    """Read observations from a text or CSV file.

    Without ``column`` each nonblank line must hold one number. With
    ``column`` (a header name or a 0-based index) the file is parsed as CSV;
    a first row that is non-numeric in the selected column is a header.
    Raises :class:`ParseError` with the line number of a bad token, or when
    nothing was parsed.
    """
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None
    values = []
    if column is None:
        for lineno, line in enumerate(text.splitlines(), 1):
            token = line.strip()
            if not token:
                continue
            values.append(_parse_float(token, lineno))
    else:
        rows = list(csv.reader(text.splitlines()))
        index = None
        start = 0
        col = str(column)
        if col.lstrip("-").isdigit():
            index = int(col)
        for lineno, row in enumerate(rows, 1):
            if not any(cell.strip() for cell in row):
                continue
            if index is None:
                names = [c.strip() for c in row]
                if col not in names:
                    raise ParseError(f"line {lineno}: column {col!r} not found in header")
                index = names.index(col)
                start = lineno
                continue
            if index >= len(row) or index < -len(row):
                raise ParseError(f"line {lineno}: no column {index}")
            token = row[index].strip()
            if lineno == 1 and start == 0:
                try:
                    float(token)
                except ValueError:
                    continue
            if not token:
                continue
            values.append(_parse_float(token, lineno))
    if not values:
        raise ParseError(f"no observations parsed from {path}")
    try:
        return SampleData(values)
    except DomainError as exc:
        raise ParseError(f"{path}: {exc}") from None


def _parse_float(token, lineno):
    try:
        value = float(token)
    except ValueError:
        raise ParseError(f"line {lineno}: non-numeric token {token!r}") from None
    if not math.isfinite(value):
        raise ParseError(f"line {lineno}: non-finite value {token!r}")
    return value
