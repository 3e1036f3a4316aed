"""Shared numerical oracles for the test suite.

These deliberately avoid the library's own evaluation paths: quadrature is
plain Gauss-Legendre on numpy arrays, derivatives come from Richardson-
extrapolated central differences.
"""

import numpy as np


def gauss_legendre(f, a: float, b: float, n: int = 2000):
    """Integrate f over [a, b] with an n-point Gauss-Legendre rule.

    f must accept a numpy array and may return complex values.  Spectrally
    accurate for smooth integrands once oscillations are resolved.
    """
    nodes, weights = np.polynomial.legendre.leggauss(n)
    half = 0.5 * (b - a)
    mid = 0.5 * (b + a)
    return half * np.sum(weights * f(mid + half * nodes))


def richardson_derivative(f, x: float, h: float):
    """Central-difference derivative with one Richardson step, O(h^4)."""

    def central(step):
        return (f(x + step) - f(x - step)) / (2.0 * step)

    d1 = central(h)
    d2 = central(h / 2.0)
    return (4.0 * d2 - d1) / 3.0


def ks_distance(samples: np.ndarray, cdf_x: np.ndarray, cdf_y: np.ndarray) -> float:
    """One-sample Kolmogorov-Smirnov distance of samples against a tabulated CDF."""
    s = np.sort(samples)
    n = s.size
    f_at = np.interp(s, cdf_x, cdf_y)
    upper = np.max(np.arange(1, n + 1) / n - f_at)
    lower = np.max(f_at - np.arange(0, n) / n)
    return float(max(upper, lower))
