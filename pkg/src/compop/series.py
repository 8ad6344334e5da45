"""Truncated power-series arithmetic in double precision.

All functions take coefficient arrays ``a[0], a[1], ...`` and return the first
``n`` coefficients of the result.
"""

import numpy as np


def _pad(a, n):
    a = np.asarray(a, dtype=complex)[:n]
    return np.concatenate([a, np.zeros(n - a.size, dtype=complex)])


def mul(a, b, n: int) -> np.ndarray:
    return np.convolve(_pad(a, n), _pad(b, n))[:n]


def div(a, b, n: int) -> np.ndarray:
    """Quotient ``a / b``; requires ``b[0] != 0``."""
    a, b = _pad(a, n), _pad(b, n)
    if b[0] == 0:
        raise ZeroDivisionError("series division needs a nonzero constant term")
    q = np.zeros(n, dtype=complex)
    rb = b[1:][::-1]
    for k in range(n):
        acc = a[k] - (np.dot(rb[n - 1 - k:], q[:k]) if k else 0.0)
        q[k] = acc / b[0]
    return q


def power(f, alpha: complex, n: int) -> np.ndarray:
    """``f ** alpha`` with the principal branch at the constant term.

    Uses the recurrence ``k f0 g_k = sum_{j=1..k} ((alpha+1) j - k) f_j g_{k-j}``.
    """
    f = _pad(f, n)
    if f[0] == 0:
        raise ZeroDivisionError("series power needs a nonzero constant term")
    g = np.zeros(n, dtype=complex)
    g[0] = f[0] ** alpha
    j = np.arange(1, n)
    for k in range(1, n):
        w = ((alpha + 1) * j[:k] - k) * f[1:k + 1]
        g[k] = np.dot(w, g[k - 1::-1][:k]) / (k * f[0])
    return g


def binomial(alpha: complex, sign: float, n: int) -> np.ndarray:
    """Coefficients of ``(1 + sign z) ** alpha``."""
    c = np.zeros(n, dtype=complex)
    c[0] = 1.0
    for k in range(1, n):
        c[k] = c[k - 1] * (alpha - k + 1) / k * sign
    return c


def evaluate(c, z):
    """Horner evaluation of a truncated series at ``z`` (scalar or array)."""
    z = np.asarray(z, dtype=complex)
    out = np.zeros_like(z)
    for a in np.asarray(c, dtype=complex)[::-1]:
        out = out * z + a
    return out


def contour_coefficients(func, n: int, radius: float = 0.9, points: int = 4096) -> np.ndarray:
    """Taylor coefficients of an analytic ``func`` by the trapezoid rule on ``|z| = radius``."""
    t = np.arange(points) * (2 * np.pi / points)
    vals = func(radius * np.exp(1j * t))
    c = np.fft.fft(vals) / points
    return c[:n] / radius ** np.arange(n)
