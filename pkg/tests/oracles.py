"""Independent reference computations (scipy quadrature, brute force)."""

import math

import numpy as np
from scipy import integrate


def quad(f, a, b, points=None):
    pts = [p for p in (points or ()) if a < p < b] or None
    if not (math.isfinite(a) and math.isfinite(b)):
        pts = None
    return integrate.quad(f, a, b, points=pts, limit=500, epsabs=1e-14, epsrel=1e-13)[0]


def clip(model, t1, t2):
    return max(t1, model.support.lower), min(t2, model.support.upper)


def density_integrals(model, t1, t2):
    a, b = clip(model, t1, t2)
    pts = model.breakpoints
    f = lambda x: float(model.pdf(x))
    mass = quad(f, a, b, pts)
    i2 = quad(lambda x: f(x) ** 2, a, b, pts)
    i3 = quad(lambda x: f(x) ** 3, a, b, pts)
    return mass, i2, i3


def oracle_ij(model, t1, t2):
    mass, i2, _ = density_integrals(model, t1, t2)
    return -0.5 * i2 / mass**2


def oracle_iv(model, t1, t2):
    mass, i2, i3 = density_integrals(model, t1, t2)
    return 0.25 * i3 / mass**3 - 0.25 * i2**2 / mass**4


def oracle_cp_lower_bound(model, t1, t2):
    """``C**2 / (4 s2)`` with ``C = int (m - x) g(x)**2 dx``, ``g`` the truncated density.

    Integrating the weighted expectation by parts turns the weight-function
    form of the bound into this single integral.
    """
    a, b = clip(model, t1, t2)
    pts = model.breakpoints
    mass = quad(lambda x: float(model.pdf(x)), a, b, pts)
    g = lambda x: float(model.pdf(x)) / mass
    m = quad(lambda x: x * g(x), a, b, pts)
    s2 = quad(lambda x: (x - m) ** 2 * g(x), a, b, pts)
    c = quad(lambda x: (m - x) * g(x) ** 2, a, b, pts)
    return c * c / (4 * s2)


def brute_kde(sample, radius, x):
    """Direct Epanechnikov sum ``(1/(n R)) sum K((x - X_i)/R)``."""
    sample = np.asarray(sample, dtype=float)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    u = (x[:, None] - sample[None, :]) / radius
    k = np.where(np.abs(u) < 1, 0.75 * (1 - u * u), 0.0)
    return k.sum(axis=1) / (sample.size * radius)
