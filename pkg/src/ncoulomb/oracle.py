"""Finite-volume eigensolvers for the separated radial and angular equations.

Both problems are brought to Sturm-Liouville form -(p w')'/rho + q w = lam w
after peeling off the exact power behaviour at the singular endpoints, so the
unknown w is smooth and the discretization keeps its second order.  Cells
are centred on uniform nodes; masses are exact integrals of the weight and
fluxes use the weight at the faces.  The symmetrized tridiagonal matrix is
diagonalized by Sturm-count multisection (our own, no LAPACK).

Radial:   u = r^{(N-1)/2} R = r^nu w,  nu (nu - 1) = A + (N-1)(N-3)/4,
          -1/2 r^{-2nu} (r^{2nu} w')' - c0'/r w = E' w,  E = hbar^2 E'.
Angular:  z = cos phi, Theta = (1+z)^a (1-z)^b g,
          -(rho (1-z^2) g')'/rho = mu g,  rho = (1+z)^{2a+(N-3)/2} (1-z)^{2b+(N-3)/2},
          A = mu + (a+b)(a+b+N-2).
"""
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.special import betainc, betaln

from .spectrum import (
    FallToCenterError,
    SpectrumLine,
    energy_parabolic,
    energy_spherical,
    separation_constant_A,
    solve_constraint_set,
)


class PartialSpectrumWarning(UserWarning):
    pass


# --------------------------------------------------------------------------
# Sturm multisection


def sturm_count(d, e2, x):
    """Number of eigenvalues below each entry of x (d diagonal, e2 squared off-diagonal)."""
    x = np.asarray(x, dtype=float)
    count = np.zeros(x.shape, dtype=np.int64)
    tiny = np.finfo(float).tiny ** 0.5
    q = d[0] - x
    count += q < 0
    for i in range(1, len(d)):
        q = np.where(q == 0, tiny, q)
        q = d[i] - x - e2[i - 1] / q
        count += q < 0
    return count


def lowest_eigenvalues(d, e, k, rtol=1e-15, split=63):
    """The k lowest eigenvalues of a symmetric tridiagonal matrix."""
    d = np.asarray(d, dtype=float)
    e = np.asarray(e, dtype=float)
    k = min(k, len(d))
    rad = np.zeros_like(d)
    rad[:-1] += np.abs(e)
    rad[1:] += np.abs(e)
    lo0, hi0 = float(np.min(d - rad)), float(np.max(d + rad))
    e2 = e * e
    lo = np.full(k, lo0)
    hi = np.full(k, hi0)
    target = np.arange(k)
    frac = np.linspace(0, 1, split + 2)[1:-1]
    for _ in range(200):
        width = hi - lo
        if np.all(width <= rtol * np.maximum(np.abs(lo), np.abs(hi)) + 1e-300):
            break
        pts = lo[:, None] + width[:, None] * frac[None, :]
        c = sturm_count(d, e2, pts)
        # first point with more than j eigenvalues below it bounds eigenvalue j from above
        above = c > target[:, None]
        idx = np.where(above.any(axis=1), above.argmax(axis=1), split)
        new_hi = np.where(idx < split, pts[np.arange(k), np.minimum(idx, split - 1)], hi)
        new_lo = np.where(idx > 0, pts[np.arange(k), np.maximum(idx - 1, 0)], lo)
        lo, hi = new_lo, new_hi
    return (lo + hi) / 2


# --------------------------------------------------------------------------


@dataclass
class RadialProblem:
    params: object
    A_eff: float
    r_min: float = 0.0
    r_max: float = None
    M: int = 4000

    def __post_init__(self):
        if self.M < 200:
            raise ValueError("need at least 200 grid points")
        if self.r_max is not None and self.r_max <= self.r_min:
            raise ValueError("r_max must exceed r_min")

    @property
    def centrifugal(self):
        N = self.params.N
        return self.A_eff + (N - 1) * (N - 3) / 4

    @property
    def nu(self):
        g = self.centrifugal
        if g < -0.25:
            raise FallToCenterError(
                f"A + (N-1)(N-3)/4 = {g:.6g} < -1/4: inverse-square attraction too strong"
            )
        return 0.5 + math.sqrt(0.25 + g)


@dataclass
class EigenResult:
    values: np.ndarray
    coarse: np.ndarray
    fine: np.ndarray
    error: np.ndarray
    grid: dict = field(default_factory=dict)


def _radial_matrix(nu, c0p, r_max, M):
    h = r_max / M
    r = h * np.arange(M)  # node M sits on the Dirichlet wall
    lo = np.maximum(r - h / 2, 0.0)
    hi = r + h / 2
    p2 = 2 * nu
    mass = (hi ** (p2 + 1) - lo ** (p2 + 1)) / (p2 + 1)
    coul = (hi**p2 - lo**p2) / p2
    faces = (r + h / 2) ** p2
    # quadratic form 1/2 sum rho_f (w_{i+1}-w_i)^2 / h - c0' sum coul_i w_i^2
    diag = np.empty(M)
    diag[:] = faces / h
    diag[1:] += faces[:-1] / h
    diag = 0.5 * diag - c0p * coul
    off = -0.5 * faces[:-1] / h
    s = np.sqrt(mass)
    return diag / mass, off / (s[:-1] * s[1:])


def solve_radial(problem, k):
    """k lowest bound energies, Richardson-extrapolated over grids M and 2M."""
    v = problem.params.numeric()
    hbar2 = v["hbar"] ** 2
    c0p = v["c0"] / hbar2
    nu = problem.nu
    r_max = problem.r_max or default_r_max(nu, c0p, k)
    res = []
    for M in (problem.M, 2 * problem.M):
        d, e = _radial_matrix(nu, c0p, r_max, M)
        res.append(lowest_eigenvalues(d, e, k) * hbar2)
    coarse, fine = res
    extrap = (4 * fine - coarse) / 3
    bound = extrap < 0
    if not np.all(bound):
        warnings.warn(f"only {int(bound.sum())} of {k} levels are bound in the box", PartialSpectrumWarning)
    return EigenResult(
        extrap[bound],
        coarse[bound],
        fine[bound],
        np.abs(fine - extrap)[bound],
        {"r_max": r_max, "M": problem.M, "nu": nu},
    )


def richardson_ratio(problem, k):
    """(E_M - E_2M) / (E_2M - E_4M) per level; 4 for a clean second-order scheme."""
    v = problem.params.numeric()
    c0p = v["c0"] / v["hbar"] ** 2
    nu = problem.nu
    r_max = problem.r_max or default_r_max(nu, c0p, k)
    E = [lowest_eigenvalues(*_radial_matrix(nu, c0p, r_max, m), k) for m in (problem.M, 2 * problem.M, 4 * problem.M)]
    return (E[0] - E[1]) / (E[1] - E[2])


def default_r_max(nu, c0p, k):
    """Box large enough that the k-th state's tail is below e^{-30}."""
    n_eff = nu + k - 1
    return 30.0 * n_eff**2 / c0p * (1 + 1.0 / n_eff)


def radial_problem(params, l, I, M=4000, r_max=None):
    return RadialProblem(params, separation_constant_A(params, l, I), M=M, r_max=r_max)


# --------------------------------------------------------------------------


def angular_exponents(params, I):
    """Endpoint exponents (a, b): larger roots of 2a^2 + (N-3)a = 2c' + I(I+N-3)/2."""
    v = params.numeric()
    N = params.N
    out = []
    for c in (v["c1"], v["c2"]):
        rhs = 2 * c / v["hbar"] ** 2 + I * (I + N - 3) / 2
        disc = (N - 3) ** 2 + 8 * rhs
        if disc < 0:
            raise FallToCenterError(f"angular endpoint exponent is complex (discriminant {disc:.6g})")
        out.append((-(N - 3) + math.sqrt(disc)) / 4)
    return tuple(out)


def _angular_matrix(alpha, beta, M):
    # weight rho = (1-z)^alpha (1+z)^beta on [-1, 1]; t = (1+z)/2
    h = 2.0 / M
    z = -1 + h * np.arange(M + 1)
    lo = np.clip(z - h / 2, -1, 1)
    hi = np.clip(z + h / 2, -1, 1)
    logB = betaln(beta + 1, alpha + 1) + (alpha + beta + 1) * math.log(2)
    tl, th = (lo + 1) / 2, (hi + 1) / 2
    # right half through I_t(p, q) = 1 - I_{1-t}(q, p), which avoids cancellation near z = 1
    left = (betainc(beta + 1, alpha + 1, th) - betainc(beta + 1, alpha + 1, tl)) * math.exp(logB)
    right = (betainc(alpha + 1, beta + 1, 1 - tl) - betainc(alpha + 1, beta + 1, 1 - th)) * math.exp(logB)
    mass = np.where(z < 0, left, right)
    zf = z[:-1] + h / 2
    flux = (1 - zf) ** (alpha + 1) * (1 + zf) ** (beta + 1) / h
    diag = np.zeros(M + 1)
    diag[:-1] += flux
    diag[1:] += flux
    s = np.sqrt(mass)
    return diag / mass, -flux / (s[:-1] * s[1:])


def solve_angular(params, I, k, M=4000):
    """k lowest separation constants A for the given I (l = I, I+1, ...)."""
    if not isinstance(I, int) or I < 0:
        raise ValueError("I must be a non-negative integer")
    N = params.N
    a, b = angular_exponents(params, I)
    g0 = (N - 3) / 2
    alpha, beta = 2 * b + g0, 2 * a + g0
    shift = (a + b) * (a + b + N - 2)
    res = []
    for m in (M, 2 * M):
        d, e = _angular_matrix(alpha, beta, m)
        res.append(lowest_eigenvalues(d, e, k) + shift)
    coarse, fine = res
    extrap = (4 * fine - coarse) / 3
    return EigenResult(extrap, coarse, fine, np.abs(fine - extrap), {"M": M, "a": a, "b": b})


# --------------------------------------------------------------------------


def compare_spectrum(params, I, levels, include_printed=False, M=4000, A_source="formula"):
    """One SpectrumLine per level n = I+1, ..., I+levels (radial quantum number l = I)."""
    l = I
    if A_source == "oracle":
        A = float(solve_angular(params, I, 1, M=M).values[0])
    else:
        A = separation_constant_A(params, l, I)
    problem = RadialProblem(params, A, M=M)
    v = params.numeric()
    problem.r_max = default_r_max(problem.nu, v["c0"] / v["hbar"] ** 2, levels)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", PartialSpectrumWarning)
        eig = solve_radial(problem, levels)
    lines = []
    for j in range(levels):
        n = l + 1 + j
        p = n - I - 1
        sol = solve_constraint_set(params, I, p, set_id=1)
        E_num = float(eig.values[j]) if j < len(eig.values) else math.nan
        err = float(eig.error[j]) if j < len(eig.error) else math.nan
        lines.append(
            SpectrumLine(
                n=n,
                I=I,
                E_formula=energy_spherical(params, n, I),
                E_parabolic=energy_parabolic(params, p, 0, I),
                E_algebraic=sol.E,
                E_numeric=E_num,
                E_parabolic_printed=energy_parabolic(params, p, 0, I, mode="as-printed") if include_printed else None,
                numeric_error=err,
            )
        )
    return lines
