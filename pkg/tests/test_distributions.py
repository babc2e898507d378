import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate as sp_integrate
from scipy import stats

from varextropy.distributions import (
    AffineTransformed,
    Example5,
    Exponential,
    Gamma,
    ParetoI,
    Power,
    SquareCdf,
    Uniform,
    parse_distribution,
    pdf,
    cdf,
    quantile,
    sample,
)
from varextropy.exceptions import DomainError, ParseError

CATALOGUE = [
    Exponential(1.0),
    Exponential(2.5),
    ParetoI(1.0, 2.0),
    ParetoI(2.0, 3.0),
    Power(1.0, 2.0),
    Power(2.0, 0.5),
    SquareCdf(),
    Example5(),
    Uniform(0.0, 1.0),
    Uniform(-1.0, 3.0),
    Gamma(2.0, 1.0),
    Gamma(0.7, 3.0),
]


class FixedStream:
    def __init__(self, values):
        self.values = np.asarray(values, dtype=float)

    def random(self, n):
        return self.values[:n]


@pytest.mark.parametrize("model", CATALOGUE, ids=str)
def test_density_integrates_to_one(model):
    lo, hi = model.support.lower, model.support.upper
    pts = [p for p in model.breakpoints]
    total = sp_integrate.quad(lambda x: float(model.pdf(x)), lo, hi, points=pts or None, limit=200, epsabs=1e-12)[0] \
        if math.isfinite(hi) else sp_integrate.quad(lambda x: float(model.pdf(x)), lo, hi, limit=200, epsabs=1e-12)[0]
    assert total == pytest.approx(1.0, abs=1e-8)


@pytest.mark.parametrize("model", CATALOGUE, ids=str)
def test_cdf_quantile_round_trip(model):
    u = np.linspace(0.001, 0.999, 199)
    assert np.max(np.abs(model.cdf(model.quantile(u)) - u)) <= 1e-9


@pytest.mark.parametrize("model", CATALOGUE, ids=str)
def test_cdf_monotone_and_clamped(model):
    lo, hi = model.effective_support()
    x = np.linspace(lo - 1, hi + 1, 500)
    f = model.cdf(x)
    assert np.all(np.diff(f) >= -1e-15)
    assert model.cdf(lo - 1) == 0.0 and model.cdf(hi + 1) == pytest.approx(1.0, abs=1e-11)
    assert np.all(model.pdf(x) >= 0)


@pytest.mark.parametrize("model", CATALOGUE, ids=str)
def test_derivative_matches_finite_difference(model):
    lo, hi = model.effective_support()
    x = np.linspace(lo, min(hi, lo + 10), 41)[1:-1]
    x = x[np.abs(x - 1.0) > 1e-3] if isinstance(model, Example5) else x
    eps = 1e-6
    fd = (model.pdf(x + eps) - model.pdf(x - eps)) / (2 * eps)
    np.testing.assert_allclose(model.pdf_derivative(x), fd, rtol=1e-5, atol=1e-6)


def test_pdf_fixtures():
    assert pdf(Exponential(1.0), 0.0) == 1.0
    assert pdf(SquareCdf(), 0.5) == 1.0
    e5 = Example5()
    low = math.exp(-0.5 - 1.0) / 1.0
    high = 1.0 * math.exp(-2.0 + 0.5)
    assert low == pytest.approx(high, abs=1e-15)
    assert pdf(e5, 1.0) == pytest.approx(math.exp(-1.5), abs=1e-15)
    assert pdf(e5, 1.0 - 1e-9) == pytest.approx(pdf(e5, 1.0 + 1e-9), abs=1e-8)


def test_cdf_fixtures():
    assert cdf(ParetoI(1.0, 2.0), 2.0) == pytest.approx(0.75, abs=1e-15)
    assert cdf(Example5(), 2.0) == 1.0
    assert cdf(Uniform(0.0, 1.0), 0.3) == pytest.approx(0.3, abs=1e-15)


def test_quantile_fixtures():
    assert quantile(Exponential(1.0), 1 - math.exp(-1)) == pytest.approx(1.0, abs=1e-12)
    assert quantile(SquareCdf(), 0.25) == pytest.approx(0.5, abs=1e-15)
    assert quantile(Example5(), math.exp(-1.5)) == pytest.approx(1.0, abs=1e-12)
    for u in (0.0, 1.0, -0.1, 1.5):
        with pytest.raises(DomainError):
            quantile(Exponential(1.0), u)


def test_sampling_fixtures():
    draws = Uniform(0.0, 1.0).rvs(3, FixedStream([0.2, 0.9, 0.5]))
    np.testing.assert_array_equal(draws, [0.2, 0.9, 0.5])
    assert Exponential(1.0).rvs(1, FixedStream([0.5]))[0] == pytest.approx(math.log(2), abs=1e-15)
    s = sample(Gamma(2.0, 1.0), 10_000, np.random.default_rng(7))
    assert abs(s.values.mean() - 2.0) <= 3 * math.sqrt(2.0 / 10_000)
    assert np.all(np.diff(s.values) >= 0)


def test_gamma_against_scipy():
    g = Gamma(2.5, 1.5)
    x = np.linspace(0.01, 8, 50)
    ref = stats.gamma(a=2.5, scale=1 / 1.5)
    np.testing.assert_allclose(g.pdf(x), ref.pdf(x), rtol=1e-12)
    np.testing.assert_allclose(g.cdf(x), ref.cdf(x), rtol=1e-12)


def test_power_b2_is_squarecdf():
    x = np.linspace(0.001, 0.999, 301)
    assert np.max(np.abs(Power(1.0, 2.0).pdf(x) - SquareCdf().pdf(x))) <= 1e-12
    assert np.max(np.abs(Power(1.0, 2.0).cdf(x) - SquareCdf().cdf(x))) <= 1e-12


def test_affine_transform():
    base = Exponential(1.0)
    y = AffineTransformed(base, 2.0, 1.0)
    x = np.linspace(1.1, 9, 20)
    np.testing.assert_allclose(y.pdf(x), base.pdf((x - 1) / 2) / 2)
    np.testing.assert_allclose(y.cdf(x), base.cdf((x - 1) / 2))


@pytest.mark.parametrize(
    "text, expected",
    [
        ("exp:rate=1", Exponential(1.0)),
        ("pareto1:a=1,b=2", ParetoI(1.0, 2.0)),
        ("power:a=1,b=2", Power(1.0, 2.0)),
        ("squarecdf", SquareCdf()),
        ("example5", Example5()),
        ("uniform:lo=0,hi=1", Uniform(0.0, 1.0)),
        ("gamma:shape=2,rate=1", Gamma(2.0, 1.0)),
    ],
)
def test_grammar(text, expected):
    model = parse_distribution(text)
    assert model == expected
    assert parse_distribution(model.spec) == model


@pytest.mark.parametrize(
    "text, token",
    [("expo:rate=1", "expo"), ("exp:lam=1", "lam"), ("exp:rate=-1", "rate=-1"), ("gamma:shape=2,rate=x", "rate=x")],
)
def test_grammar_errors_name_token(text, token):
    with pytest.raises(ParseError, match=token):
        parse_distribution(text)


@settings(max_examples=50, deadline=None)
@given(rate=st.floats(0.05, 20), u=st.floats(1e-6, 1 - 1e-6))
def test_exponential_quantile_property(rate, u):
    m = Exponential(rate)
    assert m.cdf(m.quantile(u)) == pytest.approx(u, abs=1e-12)
