"""Jacobi polynomials and the confluent hypergeometric function 1F1."""
import math

import numpy as np


class SeriesDomainError(ValueError):
    pass


def jacobi_P(n, alpha, beta, x):
    """P_n^(alpha, beta)(x) by the three-term recurrence; x may be an array."""
    if not isinstance(n, (int, np.integer)) or n < 0:
        raise ValueError("degree must be a non-negative integer")
    x = as_real(x)
    p0 = np.ones_like(x)
    if n == 0:
        return p0 if p0.ndim else p0[()]
    ab = alpha + beta
    p1 = ((ab + 2) * x + (alpha - beta)) / 2
    for k in range(2, n + 1):
        # k P_k from P_{k-1}, P_{k-2}
        c = 2 * k + ab
        a1 = 2 * k * (k + ab) * (c - 2)
        a2 = (c - 1) * (alpha * alpha - beta * beta)
        a3 = (c - 2) * (c - 1) * c
        a4 = 2 * (k + alpha - 1) * (k + beta - 1) * c
        p0, p1 = p1, ((a2 + a3 * x) * p1 - a4 * p0) / a1
    return p1 if p1.ndim else p1[()]


def as_real(x):
    """float64 array, or extended precision when the caller passes it in."""
    x = np.asarray(x)
    return x if x.dtype == np.longdouble else x.astype(float)


def _is_nonpos_int(v):
    return float(v).is_integer() and v <= 0


def hyp1F1(a, b, z, rtol=1e-14, max_terms=100000):
    """Kummer's function M(a, b, z).

    Terminates exactly when a is a non-positive integer; otherwise the power
    series is summed until the term falls below ``rtol`` times the sum.
    """
    if _is_nonpos_int(b) and not (_is_nonpos_int(a) and a > b):
        raise SeriesDomainError(f"1F1 undefined for b={b} with a={a}")
    z = as_real(z)
    out_type = z.dtype
    if _is_nonpos_int(a):
        # alternating polynomial: accumulate in extended precision so the
        # cancellation near its zeros does not eat the double result
        zl = z.astype(np.longdouble)
        term = np.ones_like(zl)
        total = np.ones_like(zl)
        for k in range(int(-a)):
            term = term * np.longdouble(a + k) / np.longdouble(b + k) * zl / (k + 1)
            total = total + term
        total = total.astype(out_type)
        return total if total.ndim else total[()]
    term = np.ones_like(z)
    total = np.ones_like(z)
    for k in range(max_terms):
        term = term * (a + k) / (b + k) * z / (k + 1)
        total = total + term
        if np.all(np.abs(term) <= rtol * np.abs(total)) and k > abs(float(np.max(np.abs(z)))):
            return total if total.ndim else float(total)
    raise SeriesDomainError("1F1 series did not converge")


def log_gamma(x):
    return math.lgamma(x)
