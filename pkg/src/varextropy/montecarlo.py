"""Reproducible Monte Carlo studies of estimator bias and MSE.

Every replication draws from its own counter-based stream keyed on
``(seed, stream tag)`` with the counter set from ``(n, replication)``, so the
random numbers of a replication do not depend on how replications are
scheduled across worker processes. Results are reduced in replication
order.
"""

from __future__ import annotations

import csv
import io
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .distributions import Distribution
from .empirical import KdeConfig, SampleData
from .estimators import ESTIMATORS, EstimatorConfig, estimate
from .exceptions import DomainError
from .measures import Window, interval_varextropy

__all__ = [
    "STREAM_CALIBRATION",
    "STREAM_ALTERNATIVE",
    "STREAM_STUDY",
    "replication_rng",
    "resolve_workers",
    "map_replications",
    "true_iv",
    "SimulationPlan",
    "StudyRow",
    "StudyReport",
    "run_study",
]

STREAM_CALIBRATION = 0
STREAM_ALTERNATIVE = 1
STREAM_STUDY = 2

_MASK64 = (1 << 64) - 1


def replication_rng(seed: int, stream: int, n: int, rep: int) -> np.random.Generator:
    """Independent generator for replication ``rep`` at sample size ``n``."""
    key = np.array([int(seed) & _MASK64, int(stream) & _MASK64], dtype=np.uint64)
    counter = np.array([0, 0, int(n), int(rep)], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key, counter=counter))


def resolve_workers(workers: int | None = None) -> int:
    """Explicit value, else ``$IV_WORKERS``, else 1."""
    if workers is None:
        env = os.environ.get("IV_WORKERS", "").strip()
        if not env:
            return 1
        try:
            workers = int(env)
        except ValueError:
            raise DomainError(f"IV_WORKERS must be an integer, got {env!r}") from None
    if workers < 1:
        raise DomainError("worker count must be at least 1")
    return workers


def _run_chunk(task, start, stop):
    return [task(r) for r in range(start, stop)]


def map_replications(task: Callable[[int], object], reps: int, workers: int | None = None) -> list:
    """``[task(0), ..., task(reps - 1)]``, optionally spread over processes.

    ``task`` must be picklable when more than one worker is used.
    """
    workers = resolve_workers(workers)
    if workers == 1 or reps < 2 * workers:
        return _run_chunk(task, 0, reps)
    bounds = np.linspace(0, reps, 4 * workers + 1).astype(int)
    out = []
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(_run_chunk, task, int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]
        for fut in futures:
            out.extend(fut.result())
    return out


def true_iv(model: Distribution, w) -> float:
    """Exact interval varextropy: closed form when available, else quadrature."""
    return float(interval_varextropy(model, w))


@dataclass(frozen=True)
class SimulationPlan:
    """What to simulate.

    Parameters
    ----------
    model : Distribution
    window : Window
    sizes : sequence of int
    reps : int
    estimators : sequence of str
        Any of ``"spacing"``, ``"kde-integral"``, ``"kde-plugin"``.
    seed : int
    true_value : float, optional
        Target value; :func:`true_iv` when omitted.
    kde : KdeConfig
    quad_panels : int
    """

    model: Distribution
    window: Window
    sizes: Sequence[int]
    reps: int = 10_000
    estimators: Sequence[str] = ESTIMATORS
    seed: int = 0
    true_value: float | None = None
    kde: KdeConfig = field(default_factory=KdeConfig)
    quad_panels: int = 2048

    def __post_init__(self):
        object.__setattr__(self, "window", Window.coerce(self.window))
        object.__setattr__(self, "sizes", tuple(int(n) for n in self.sizes))
        object.__setattr__(self, "estimators", tuple(self.estimators))
        if self.reps < 1:
            raise DomainError("reps must be at least 1")
        if not self.sizes:
            raise DomainError("sizes must be nonempty")
        if any(n < 2 for n in self.sizes):
            raise DomainError("sample sizes must be at least 2")
        for kind in self.estimators:
            if kind not in ESTIMATORS:
                raise DomainError(f"unknown estimator {kind!r}")
        if self.true_value is not None and not math.isfinite(self.true_value):
            raise DomainError("true_value must be finite")

    def target(self) -> float:
        return self.true_value if self.true_value is not None else true_iv(self.model, self.window)

    def configs(self) -> list[EstimatorConfig]:
        return [EstimatorConfig(kind, self.kde, None, self.quad_panels) for kind in self.estimators]


@dataclass(frozen=True)
class _StudyTask:
    model: Distribution
    window: Window
    n: int
    configs: tuple
    seed: int

    def __call__(self, rep: int) -> tuple:
        rng = replication_rng(self.seed, STREAM_STUDY, self.n, rep)
        sample = SampleData(self.model.rvs(self.n, rng))
        out = []
        for cfg in self.configs:
            try:
                out.append(estimate(sample, self.window, cfg))
            except DomainError:
                out.append(math.nan)
        return tuple(out)


@dataclass(frozen=True)
class StudyRow:
    n: int
    estimator: str
    bias: float
    mse: float
    failures: int


@dataclass(frozen=True)
class StudyReport:
    """Bias and MSE per sample size and estimator, with seed provenance."""

    rows: tuple
    seed: int
    reps: int
    true_value: float
    model: str = ""
    window: tuple = ()

    CSV_FIELDS = ("n", "estimator", "bias", "mse", "failures")

    def row(self, n: int, estimator: str) -> StudyRow:
        for r in self.rows:
            if r.n == n and r.estimator == estimator:
                return r
        raise KeyError((n, estimator))

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.CSV_FIELDS)
        for r in self.rows:
            writer.writerow([r.n, r.estimator, _fmt(r.bias), _fmt(r.mse), r.failures])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "model": self.model,
            "window": list(self.window),
            "seed": self.seed,
            "reps": self.reps,
            "true_value": self.true_value,
            "rows": [
                {"n": r.n, "estimator": r.estimator, "bias": _finite_or_none(r.bias),
                 "mse": _finite_or_none(r.mse), "failures": r.failures}
                for r in self.rows
            ],
        }


def _fmt(x: float) -> str:
    return "nan" if not math.isfinite(x) else repr(float(x))


def _finite_or_none(x):
    return float(x) if math.isfinite(x) else None


def run_study(plan: SimulationPlan, workers: int | None = None) -> StudyReport:
    """Bias and MSE of each estimator over ``plan.reps`` replications per size.

    Replications in which an estimator raises a domain error (empty window,
    zero spacing) are excluded from that estimator's averages and counted in
    ``failures``.
    """
    target = plan.target()
    configs = tuple(plan.configs())
    rows = []
    for n in plan.sizes:
        task = _StudyTask(plan.model, plan.window, n, configs, int(plan.seed))
        values = np.array(map_replications(task, plan.reps, workers), dtype=float).reshape(plan.reps, len(configs))
        for j, kind in enumerate(plan.estimators):
            col = values[:, j]
            ok = np.isfinite(col)
            err = col[ok] - target
            failures = int(plan.reps - ok.sum())
            if err.size:
                bias, mse = float(np.mean(err)), float(np.mean(err * err))
            else:
                bias = mse = math.nan
            rows.append(StudyRow(n, kind, bias, mse, failures))
    return StudyReport(tuple(rows), int(plan.seed), plan.reps, target, plan.model.spec, (plan.window.t1, plan.window.t2))
