"""Goodness-of-fit tests for uniformity on [0, 1].

A law on [0, 1] is uniform exactly when its density is constant, i.e. when
the interval varextropy over (0, 1) vanishes. The statistics

* ``GV``: spacing estimate over (0, 1)
* ``GD``: kernel estimate with integrals over (0, 1)
* ``GB``: kernel plug-in estimate over (0, 1)

are therefore near zero under the null and large otherwise; the test
rejects when the statistic reaches its Monte Carlo ``1 - alpha`` critical
value. ``KS`` is the Kolmogorov-Smirnov statistic, calibrated the same way.

The kernel statistics default to treating the bandwidth as the kernel's
standard deviation (``kernel_scale="sd"``), the convention under which the
published percentage points of these statistics are recovered.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from sklearn.base import BaseEstimator

from ._validation import check_sample_array, check_sample_batch
from .empirical import KdeConfig, SampleData
from .estimators import EstimatorConfig, estimate
from .exceptions import CalibrationRequiredError, DomainError, ParseError
from .montecarlo import STREAM_ALTERNATIVE, STREAM_CALIBRATION, map_replications, replication_rng

__all__ = [
    "STATISTICS",
    "UNIFORMITY_KDE",
    "AlternativeLaw",
    "parse_alternative",
    "sample_alternative",
    "ks_statistic",
    "statistic_value",
    "null_statistics",
    "critical_value",
    "Calibration",
    "calibrate",
    "PowerRow",
    "PowerReport",
    "power_study",
    "TestDecision",
    "test_uniformity",
    "UniformityTest",
]

STATISTICS = ("GV", "GD", "GB", "KS")
_ESTIMATOR_OF = {"GV": "spacing", "GD": "kde-integral", "GB": "kde-plugin"}
UNIFORMITY_KDE = KdeConfig(kernel_scale="sd")
_UNIT = (0.0, 1.0)


def _check_kind(kind: str) -> str:
    if kind not in STATISTICS:
        raise DomainError(f"unknown statistic {kind!r}; expected one of {', '.join(STATISTICS)}")
    return kind


# -- alternatives ------------------------------------------------------------
@dataclass(frozen=True)
class AlternativeLaw:
    """Alternatives to uniformity on [0, 1].

    * ``A_k``: ``F(x) = 1 - (1 - x)**k``
    * ``B_k``: ``2**(k-1) x**k`` below 1/2, ``1 - 2**(k-1) (1 - x)**k`` above
    * ``C_k``: ``1/2 - 2**(k-1) (1/2 - x)**k`` below 1/2, ``1/2 + 2**(k-1) (x - 1/2)**k`` above
    * ``U``: the uniform law itself (``k`` is ignored)
    """

    family: str
    k: float = 1.0

    def __post_init__(self):
        if self.family not in ("A", "B", "C", "U"):
            raise DomainError(f"unknown alternative family {self.family!r}")
        if self.family != "U" and not self.k > 1:
            raise DomainError("alternative parameter k must exceed 1")

    @property
    def label(self) -> str:
        return "U" if self.family == "U" else f"{self.family}{self.k:g}"

    def cdf(self, x):
        x = np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
        k, c = self.k, 2.0 ** (self.k - 1.0)
        if self.family == "U":
            out = x
        elif self.family == "A":
            out = 1.0 - (1.0 - x) ** k
        elif self.family == "B":
            out = np.where(x <= 0.5, c * x**k, 1.0 - c * (1.0 - x) ** k)
        else:
            d = np.abs(x - 0.5)
            out = 0.5 + np.sign(x - 0.5) * c * d**k
        # pin the endpoints, which rounding can miss by an ulp
        out = np.where(x <= 0.0, 0.0, np.where(x >= 1.0, 1.0, np.clip(out, 0.0, 1.0)))
        return out[()] if out.ndim == 0 else out

    def ppf(self, u):
        u = np.asarray(u, dtype=float)
        k, c = self.k, 2.0 ** (self.k - 1.0)
        if self.family == "U":
            out = u.copy()
        elif self.family == "A":
            out = 1.0 - (1.0 - u) ** (1.0 / k)
        elif self.family == "B":
            out = np.where(u <= 0.5, (u / c) ** (1.0 / k), 1.0 - ((1.0 - u) / c) ** (1.0 / k))
        else:
            out = 0.5 + np.sign(u - 0.5) * (np.abs(u - 0.5) / c) ** (1.0 / k)
        return out[()] if out.ndim == 0 else out

    def rvs(self, n: int, rng) -> np.ndarray:
        return self.ppf(rng.random(n))


def parse_alternative(text: str) -> AlternativeLaw:
    """``"A1.5"``, ``"B3"``, ``"C2"`` or ``"U"``."""
    token = text.strip()
    if token.upper() in ("U", "UNIFORM"):
        return AlternativeLaw("U")
    family, rest = token[:1].upper(), token[1:].lstrip("_")
    if family not in ("A", "B", "C") or not rest:
        raise ParseError(f"bad alternative {text!r}; expected e.g. A1.5, B3, C2 or U")
    try:
        k = float(rest)
    except ValueError:
        raise ParseError(f"bad alternative parameter in {text!r}") from None
    try:
        return AlternativeLaw(family, k)
    except DomainError as exc:
        raise ParseError(f"{text!r}: {exc}") from None


def sample_alternative(law, n: int, rng) -> SampleData:
    """``n`` inverse-CDF draws from ``law`` (an :class:`AlternativeLaw` or its label)."""
    law = law if isinstance(law, AlternativeLaw) else parse_alternative(law)
    return SampleData(law.rvs(int(n), rng))


# -- statistics --------------------------------------------------------------
def ks_statistic(s) -> float:
    """``max_i max(i/n - X_(i), X_(i) - (i-1)/n)`` for a sample in [0, 1]."""
    s = SampleData.coerce(s)
    x = s.values
    if x[0] < 0 or x[-1] > 1:
        raise DomainError("Kolmogorov-Smirnov statistic needs values in [0, 1]")
    i = np.arange(1, x.size + 1)
    return float(max(np.max(i / x.size - x), np.max(x - (i - 1) / x.size)))


def _default_config() -> EstimatorConfig:
    return EstimatorConfig(kde=UNIFORMITY_KDE)


def statistic_value(kind: str, s, cfg: EstimatorConfig | None = None) -> float:
    """Value of a uniformity statistic; the kernel and spacing ones use window (0, 1)."""
    _check_kind(kind)
    s = SampleData.coerce(s)
    if kind == "KS":
        return ks_statistic(s)
    cfg = cfg or _default_config()
    return float(estimate(s, _UNIT, replace(cfg, kind=_ESTIMATOR_OF[kind])))


@dataclass(frozen=True)
class _StatisticTask:
    kinds: tuple
    n: int
    seed: int
    stream: int
    law: AlternativeLaw
    cfg: EstimatorConfig

    def __call__(self, rep: int) -> tuple:
        rng = replication_rng(self.seed, self.stream, self.n, rep)
        sample = SampleData(self.law.rvs(self.n, rng))
        out = []
        for kind in self.kinds:
            try:
                out.append(statistic_value(kind, sample, self.cfg))
            except DomainError:
                out.append(math.nan)
        return tuple(out)


def _simulate(kinds, n, reps, seed, stream, law, cfg, workers) -> np.ndarray:
    kinds = tuple(_check_kind(k) for k in kinds)
    task = _StatisticTask(kinds, int(n), int(seed), stream, law, cfg or _default_config())
    return np.array(map_replications(task, reps, workers), dtype=float).reshape(reps, len(kinds))


def null_statistics(kinds, n: int, reps: int, seed: int, cfg=None, workers=None) -> np.ndarray:
    """Statistics of ``reps`` uniform samples of size ``n`` (one column per kind)."""
    return _simulate(kinds, n, reps, seed, STREAM_CALIBRATION, AlternativeLaw("U"), cfg, workers)


def _order_statistic_quantile(values: np.ndarray, alpha: float) -> float:
    values = np.sort(values[np.isfinite(values)])
    if values.size == 0:
        raise DomainError("no successful null replications")
    rank = math.ceil((1.0 - alpha) * values.size)
    return float(values[min(max(rank, 1), values.size) - 1])


def _check_alpha(alpha):
    if not 0 < alpha < 1:
        raise DomainError("alpha must lie in (0, 1)")


def critical_value(kind, n, alpha=0.05, reps=100_000, seed=0, cfg=None, workers=None) -> float:
    """The ``ceil((1 - alpha) * reps)``-th order statistic of the simulated null."""
    _check_alpha(alpha)
    if reps < 1000:
        raise DomainError("calibration needs reps >= 1000")
    return _order_statistic_quantile(null_statistics([kind], n, reps, seed, cfg, workers)[:, 0], alpha)


def _alpha_key(alpha: float) -> str:
    return f"{float(alpha):.10g}"


@dataclass
class Calibration:
    """Critical values indexed by ``(statistic, n, alpha)``; CSV ``stat,n,alpha,critical``."""

    entries: dict = field(default_factory=dict)

    CSV_FIELDS = ("stat", "n", "alpha", "critical")

    def add(self, kind: str, n: int, alpha: float, critical: float) -> None:
        self.entries[(_check_kind(kind), int(n), _alpha_key(alpha))] = float(critical)

    def get(self, kind: str, n: int, alpha: float) -> float:
        try:
            return self.entries[(kind, int(n), _alpha_key(alpha))]
        except KeyError:
            raise CalibrationRequiredError(
                f"no critical value for {kind} at n={n}, alpha={alpha:g}; run critvals first"
            ) from None

    def __contains__(self, key) -> bool:
        kind, n, alpha = key
        return (kind, int(n), _alpha_key(alpha)) in self.entries

    def rows(self):
        for (kind, n, alpha), crit in sorted(
            self.entries.items(), key=lambda kv: (STATISTICS.index(kv[0][0]), kv[0][1], float(kv[0][2]))
        ):
            yield kind, n, alpha, crit

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.CSV_FIELDS)
        for kind, n, alpha, crit in self.rows():
            writer.writerow([kind, n, alpha, repr(crit)])
        return buf.getvalue()

    def save(self, path) -> None:
        Path(path).write_text(self.to_csv())

    @classmethod
    def from_csv(cls, text: str, source: str = "calibration") -> "Calibration":
        cal = cls()
        reader = csv.DictReader(io.StringIO(text))
        if reader.fieldnames is None or any(f not in reader.fieldnames for f in cls.CSV_FIELDS):
            raise ParseError(f"{source}: expected header {','.join(cls.CSV_FIELDS)}")
        for lineno, row in enumerate(reader, 2):
            try:
                cal.add(row["stat"].strip(), int(row["n"]), float(row["alpha"]), float(row["critical"]))
            except (ValueError, DomainError) as exc:
                raise ParseError(f"{source} line {lineno}: {exc}") from None
        return cal

    @classmethod
    def load(cls, path) -> "Calibration":
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ParseError(f"cannot read {path}: {exc.strerror}") from None
        return cls.from_csv(text, str(path))


def calibrate(kinds, sizes, alphas=(0.05,), reps=100_000, seed=0, cfg=None, workers=None) -> Calibration:
    """Critical values for every ``(kind, n, alpha)``; all kinds share the null samples."""
    for alpha in alphas:
        _check_alpha(alpha)
    if reps < 1000:
        raise DomainError("calibration needs reps >= 1000")
    kinds = list(kinds)
    cal = Calibration()
    for n in sizes:
        stats = null_statistics(kinds, n, reps, seed, cfg, workers)
        for j, kind in enumerate(kinds):
            for alpha in alphas:
                cal.add(kind, n, alpha, _order_statistic_quantile(stats[:, j], alpha))
    return cal


# -- power ---------------------------------------------------------------------
@dataclass(frozen=True)
class PowerRow:
    stat: str
    law: str
    n: int
    alpha: float
    critical: float
    power: float
    failures: int


@dataclass(frozen=True)
class PowerReport:
    rows: tuple
    seed: int
    reps: int

    CSV_FIELDS = ("stat", "alt", "n", "alpha", "critical", "power", "failures")

    def power(self, stat: str, law: str, n: int) -> float:
        for r in self.rows:
            if (r.stat, r.law, r.n) == (stat, law, n):
                return r.power
        raise KeyError((stat, law, n))

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.CSV_FIELDS)
        for r in self.rows:
            writer.writerow([r.stat, r.law, r.n, _alpha_key(r.alpha), repr(r.critical), repr(r.power), r.failures])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "reps": self.reps,
            "rows": [
                {"stat": r.stat, "alt": r.law, "n": r.n, "alpha": r.alpha, "critical": r.critical,
                 "power": r.power if math.isfinite(r.power) else None, "failures": r.failures}
                for r in self.rows
            ],
        }


def power_study(
    kinds: Sequence[str],
    laws: Iterable,
    n,
    alpha: float = 0.05,
    reps: int = 100_000,
    seed: int = 0,
    calibration: Calibration | None = None,
    cfg: EstimatorConfig | None = None,
    workers: int | None = None,
    calibration_reps: int | None = None,
) -> PowerReport:
    """Rejection rates of each statistic under each law.

    Critical values come from ``calibration``; without one they are simulated
    first on the calibration stream (independent of the alternative samples)
    with ``calibration_reps`` (default ``reps``) replications. Replications
    whose statistic fails (zero spacing) are excluded from the rate and
    reported in ``failures``; the power is NaN when every replication fails.
    """
    _check_alpha(alpha)
    kinds = [_check_kind(k) for k in kinds]
    laws = [law if isinstance(law, AlternativeLaw) else parse_alternative(law) for law in laws]
    sizes = [n] if np.isscalar(n) else list(n)
    rows = []
    for size in sizes:
        if calibration is None:
            cal = calibrate(kinds, [size], [alpha], calibration_reps or reps, seed, cfg, workers)
        else:
            cal = calibration
        crits = [cal.get(kind, size, alpha) for kind in kinds]
        for law in laws:
            stats = _simulate(kinds, size, reps, seed, STREAM_ALTERNATIVE, law, cfg, workers)
            for j, kind in enumerate(kinds):
                col = stats[:, j]
                ok = np.isfinite(col)
                good = int(ok.sum())
                power = float(np.count_nonzero(col[ok] >= crits[j])) / good if good else math.nan
                rows.append(PowerRow(kind, law.label, int(size), alpha, crits[j], power, int(reps - ok.sum())))
    return PowerReport(tuple(rows), int(seed), int(reps))


# -- single test -------------------------------------------------------------
@dataclass(frozen=True)
class TestDecision:
    statistic: str
    n: int
    statistic_value: float
    critical_value: float
    alpha: float
    reject: bool

    __test__ = False  # not a pytest test class

    def to_dict(self) -> dict:
        return {
            "statistic": self.statistic,
            "n": self.n,
            "statistic_value": self.statistic_value,
            "critical_value": self.critical_value,
            "alpha": self.alpha,
            "reject": self.reject,
        }


def test_uniformity(kind: str, s, alpha: float, calibration: Calibration, cfg=None) -> TestDecision:
    """Reject uniformity when the statistic reaches the calibrated critical value."""
    _check_kind(kind)
    _check_alpha(alpha)
    s = SampleData.coerce(s)
    if calibration is None:
        raise CalibrationRequiredError("a calibration is required")
    crit = calibration.get(kind, s.n, alpha)
    value = statistic_value(kind, s, cfg)
    return TestDecision(kind, s.n, value, crit, alpha, bool(value >= crit))


test_uniformity.__test__ = False


class UniformityTest(BaseEstimator):
    """Monte Carlo calibrated uniformity test.

    ``fit`` calibrates the critical value for the sample size of ``X`` (a
    single sample, or a 2-D batch with one sample per row). ``transform``
    returns statistic values, ``decision_function`` their excess over the
    critical value and ``predict`` 1 where uniformity is rejected.

    Parameters
    ----------
    statistic : {"GV", "GD", "GB", "KS"}, default="GD"
    alpha : float, default=0.05
    reps : int, default=20000
        Null replications used when calibrating.
    seed : int, default=0
    m : int, optional
        Spacing order for ``GV``.
    bandwidth : "silverman" or float, default="silverman"
    kernel_scale : {"sd", "support"}, default="sd"
    calibration : Calibration, optional
        Precomputed critical values; consulted before simulating.
    workers : int, optional

    Attributes
    ----------
    n_ : int
    critical_value_ : float
    """

    def __init__(
        self,
        statistic="GD",
        alpha=0.05,
        reps=20_000,
        seed=0,
        m=None,
        bandwidth="silverman",
        kernel_scale="sd",
        calibration=None,
        workers=None,
    ):
        self.statistic = statistic
        self.alpha = alpha
        self.reps = reps
        self.seed = seed
        self.m = m
        self.bandwidth = bandwidth
        self.kernel_scale = kernel_scale
        self.calibration = calibration
        self.workers = workers

    def _config(self) -> EstimatorConfig:
        return EstimatorConfig(kde=KdeConfig(self.bandwidth, self.kernel_scale), m_override=self.m)

    @staticmethod
    def _batch(X):
        arr = np.asarray(X, dtype=float)
        if arr.ndim == 1:
            return check_sample_array(arr)[None, :]
        return check_sample_batch(arr)

    def fit(self, X, y=None):
        _check_kind(self.statistic)
        batch = self._batch(X)
        self.n_ = batch.shape[1]
        if self.calibration is not None and (self.statistic, self.n_, self.alpha) in self.calibration:
            self.critical_value_ = self.calibration.get(self.statistic, self.n_, self.alpha)
        else:
            self.critical_value_ = critical_value(
                self.statistic, self.n_, self.alpha, self.reps, self.seed, self._config(), self.workers
            )
        return self

    def _check_fitted(self, batch):
        if not hasattr(self, "critical_value_"):
            from sklearn.exceptions import NotFittedError

            raise NotFittedError("UniformityTest is not fitted yet; call fit first")
        if batch.shape[1] != self.n_:
            raise CalibrationRequiredError(f"calibrated for n={self.n_}, got samples of size {batch.shape[1]}")

    def transform(self, X):
        batch = self._batch(X)
        self._check_fitted(batch)
        cfg = self._config()
        return np.array([statistic_value(self.statistic, row, cfg) for row in batch])

    def decision_function(self, X):
        return self.transform(X) - self.critical_value_

    def predict(self, X):
        return (self.decision_function(X) >= 0).astype(int)
