"""Separated eigenfunctions and their ODE-residual and normalization audits.

Angular: Theta(phi) = F (1+cos)^a (1-cos)^b P^(alpha,beta)_{l-I}(cos phi) with
2a = delta_1 + I, 2b = delta_2 + I.  The displayed Jacobi parameters are
(delta_2 + I, delta_1 + I); the ones that solve the angular equation for every
N are shifted by (N-3)/2.  ``form`` selects between them.

Radial: R(r) = F (eps r)^L e^{-eps r/2} 1F1(-n+l+1, 2L+N-1; eps r), with
L = l + (delta_1+delta_2)/2 and E/hbar^2 = -eps^2/8.

Parabolic: f_i(t) = F_i (eps t/2)^{s_i} e^{-eps t/4} 1F1(-n_i, 2 s_i + (N-1)/2; eps t/2),
2 s_i = I + delta_i, solving t f'' + (N-1)/2 f' + (-c_i'/t - I(I+N-3)/(4t)
+ E' t/2 + v_i) f = 0.
"""
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import roots_genlaguerre, roots_jacobi

from .spectrum import delta_pair, separation_constant_A
from .special import as_real, hyp1F1, jacobi_P, log_gamma

ANGULAR_FORMS = ("printed", "corrected")


class QuantumNumberError(ValueError):
    pass


def fd_derivatives(f, x, h):
    """First and second derivatives by 4th-order central differences.

    The stencil is evaluated in extended precision; in doubles the roundoff of
    the second difference, ~eps/h^2, would sit near 1e-10 at h = 1e-3.
    """
    x = np.asarray(x, dtype=np.longdouble)
    h = np.asarray(h, dtype=np.longdouble)
    fm2, fm1, f0, fp1, fp2 = (f(x + k * h) for k in (-2, -1, 0, 1, 2))
    d1 = (-fp2 + 8 * fp1 - 8 * fm1 + fm2) / (12 * h)
    d2 = (-fp2 + 16 * fp1 - 30 * f0 + 16 * fm1 - fm2) / (12 * h * h)
    return tuple(np.asarray(v, dtype=float) for v in (f0, d1, d2))


def _relative(terms, floor=0.0):
    """|sum of terms| over (sum of |terms| + floor).

    ``floor`` is the operator scale lead * (|f'|/ell + |f|/ell^2); it keeps the
    ratio meaningful at nodes and for solutions where every term vanishes.
    """
    terms = np.asarray(terms, dtype=float)
    scale = np.sum(np.abs(terms), axis=0) + floor
    return np.abs(np.sum(terms, axis=0)) / scale


def _floor(f0, d1, ell, lead=1.0):
    return lead * (np.abs(d1) / ell + np.abs(f0) / ell**2)


# --------------------------------------------------------------------------


@dataclass
class AngularSolution:
    N: int
    l: int
    I: int
    delta1: float
    delta2: float
    c1p: float
    c2p: float
    form: str
    constant: float
    A: float

    @property
    def a(self):
        return (self.delta1 + self.I) / 2

    @property
    def b(self):
        return (self.delta2 + self.I) / 2

    @property
    def jacobi_params(self):
        shift = 0.0 if self.form == "printed" else (self.N - 3) / 2
        return self.delta2 + self.I + shift, self.delta1 + self.I + shift

    def unnormalized(self, phi):
        z = np.cos(phi)
        al, be = self.jacobi_params
        return (1 + z) ** self.a * (1 - z) ** self.b * jacobi_P(self.l - self.I, al, be, z)

    def __call__(self, phi):
        return self.constant * self.unnormalized(phi)

    def _derivs(self, phi, h):
        phi = np.asarray(phi, dtype=float)
        ell = np.minimum(1.0, np.minimum(phi, math.pi - phi))
        return phi, ell, fd_derivatives(self.unnormalized, phi, 1e-3 * ell if h is None else h)

    def residual_terms(self, phi, h=None):
        """Terms of the angular equation applied to Theta at phi."""
        phi, _, (f0, d1, d2) = self._derivs(phi, h)
        s = np.sin(phi)
        c = np.cos(phi)
        N, I = self.N, self.I
        return [
            d2,
            (N - 2) * c / s * d1,
            -2 * self.c1p / (1 + c) * f0,
            -2 * self.c2p / (1 - c) * f0,
            self.A * f0,
            -I * (I + N - 3) / s**2 * f0,
        ]

    def residual(self, phi, h=None):
        _, ell, (f0, d1, _) = self._derivs(phi, h)
        return _relative(self.residual_terms(phi, h), _floor(f0, d1, ell))

    def squared_norm(self, nodes=None):
        """Integral of Theta^2 sin^{N-2} phi dphi by Gauss-Jacobi quadrature."""
        nodes = nodes or (self.l - self.I + 4)
        # Theta^2 sin^{N-2} dphi = (1+z)^{2a}(1-z)^{2b} P^2 (1-z^2)^{(N-3)/2} dz
        g = (self.N - 3) / 2
        z, w = roots_jacobi(nodes, 2 * self.b + g, 2 * self.a + g)
        al, be = self.jacobi_params
        vals = jacobi_P(self.l - self.I, al, be, z)
        return self.constant**2 * float(np.sum(w * vals * vals))


def printed_angular_constant(N, l, I, d1, d2):
    absI = abs(I)
    sign = (-1) ** ((I - absI) // 2)
    log_num = math.log(2 * l + d1 + d2 + N - 2) + log_gamma(l - absI + 1) + log_gamma(l + I + d1 + d2 + N - 2)
    log_den = (d1 + d2 + N - 1) * math.log(2) + math.log(math.pi) + log_gamma(l + d1 + N - 2) + log_gamma(l + d2 + N - 2)
    return sign / 2**absI * math.exp(0.5 * (log_num - log_den))


def build_angular(params, l, I, form="printed", constant=None):
    if not (isinstance(l, int) and isinstance(I, int) and l >= I >= 0):
        raise QuantumNumberError(f"need l >= I >= 0, got l={l}, I={I}")
    if form not in ANGULAR_FORMS:
        raise ValueError(f"unknown angular form {form!r}")
    v = params.numeric()
    d1, d2 = delta_pair(params, I)
    F = printed_angular_constant(params.N, l, I, d1, d2) if constant is None else constant
    return AngularSolution(
        params.N,
        l,
        I,
        d1,
        d2,
        v["c1"] / v["hbar"] ** 2,
        v["c2"] / v["hbar"] ** 2,
        form,
        F,
        separation_constant_A(params, l, I),
    )


# --------------------------------------------------------------------------


@dataclass
class RadialSolution:
    N: int
    n: int
    l: int
    I: int
    delta1: float
    delta2: float
    eps: float
    c0p: float
    A: float
    constant: float

    @property
    def L(self):
        return self.l + (self.delta1 + self.delta2) / 2

    @property
    def energy_prime(self):
        return -self.eps**2 / 8

    def _poly(self, x):
        return hyp1F1(-self.n + self.l + 1, 2 * self.L + self.N - 1, x)

    def unnormalized(self, r):
        x = self.eps * as_real(r)
        return x**self.L * np.exp(-x / 2) * self._poly(x)

    def __call__(self, r):
        return self.constant * self.unnormalized(r)

    def residual_terms(self, r, h=None):
        r, _, (f0, d1, d2) = self._derivs(r, h)
        return [
            d2,
            (self.N - 1) / r * d1,
            2 * self.c0p / r * f0,
            2 * self.energy_prime * f0,
            -self.A / r**2 * f0,
        ]

    def _derivs(self, r, h):
        r = np.asarray(r, dtype=float)
        # length scale: distance to the origin, capped by the decay length 2/eps
        ell = np.minimum(r, 2 / self.eps)
        return r, ell, fd_derivatives(self.unnormalized, r, 1e-3 * ell if h is None else h)

    def residual(self, r, h=None):
        _, ell, (f0, d1, _) = self._derivs(r, h)
        return _relative(self.residual_terms(r, h), _floor(f0, d1, ell))

    def squared_norm(self, nodes=None):
        """Integral of R^2 r^{N-1} dr, exact by generalized Gauss-Laguerre."""
        k = nodes or (self.n - self.l + 4)
        x, w = roots_genlaguerre(k, 2 * self.L + self.N - 1)
        # x = eps r: R^2 r^{N-1} dr = x^{2L+N-1} e^{-x} poly^2 dx / eps^N
        vals = self._poly(x)
        return self.constant**2 * float(np.sum(w * vals * vals)) / self.eps**self.N

    def nodes(self, r_max=None, samples=20000):
        r_max = r_max or 40 * (self.n + self.L + self.N) / self.eps
        r = np.linspace(r_max / samples, r_max, samples)
        v = self.unnormalized(r)
        return int(np.sum(np.sign(v[1:]) * np.sign(v[:-1]) < 0))


def radial_overlap(R1, R2, nodes=None):
    """Integral of R1 R2 r^{N-1} dr (exact Gauss-Laguerre after rescaling)."""
    if R1.N != R2.N or R1.L != R2.L:
        raise ValueError("overlap needs solutions of the same N and angular exponent")
    s = (R1.eps + R2.eps) / 2
    k = nodes or (R1.n + R2.n + 4)
    y, w = roots_genlaguerre(k, 2 * R1.L + R1.N - 1)
    r = y / s
    # R_i(r) = C_i (eps_i r)^L e^{-eps_i r/2} poly_i ; the exponentials combine to e^{-y}
    pref = (R1.eps * R2.eps) ** R1.L / s ** (2 * R1.L + R1.N)
    v = R1._poly(R1.eps * r) * R2._poly(R2.eps * r)
    return R1.constant * R2.constant * pref * float(np.sum(w * v))


def printed_radial_constant(N, n, l, d1, d2, c0p):
    """Displayed normalization constant; |c0'| replaces the negative base (-c0')^{3/2}."""
    s = d1 + d2
    log_sq = log_gamma(n + l + s + N - 2) - log_gamma(n - l)
    return 2 * abs(c0p) ** 1.5 / (n + s / 2) ** 2 / math.exp(log_gamma(2 * l + s + N - 1)) * math.exp(0.5 * log_sq)


def build_radial(params, n, l, I, constant=None):
    if not (isinstance(n, int) and isinstance(l, int) and n >= l + 1 and l >= I >= 0):
        raise QuantumNumberError(f"need n >= l+1 and l >= I >= 0, got n={n}, l={l}, I={I}")
    v = params.numeric()
    N = params.N
    d1, d2 = delta_pair(params, I)
    hbar = v["hbar"]
    eps = 2 * v["c0"] / (hbar**2 * (n + (d1 + d2) / 2 + (N - 3) / 2))
    c0p = v["c0"] / hbar**2
    F = printed_radial_constant(N, n, l, d1, d2, c0p) if constant is None else constant
    return RadialSolution(N, n, l, I, d1, d2, eps, c0p, separation_constant_A(params, l, I), F)


# --------------------------------------------------------------------------


@dataclass
class ParabolicFactor:
    """One of the two factors f_i(t) of the parabolic eigenfunction."""

    N: int
    n: int
    I: int
    delta: float
    cp: float
    eps: float
    v: float
    constant: float

    @property
    def s(self):
        return (self.I + self.delta) / 2

    @property
    def kummer_b(self):
        return self.I + self.delta + (self.N - 1) / 2

    def unnormalized(self, t):
        z = self.eps * as_real(t) / 2
        return z**self.s * np.exp(-z / 2) * hyp1F1(-self.n, self.kummer_b, z)

    def __call__(self, t):
        return self.constant * self.unnormalized(t)

    def residual_terms(self, t, h=None):
        """Terms of t f'' + (N-1)/2 f' - c'/t f + E' t/2 f - I(I+N-3)/(4t) f + v f."""
        t, _, (f0, d1, d2) = self._derivs(t, h)
        Ep = -self.eps**2 / 8
        I, N = self.I, self.N
        return [
            t * d2,
            (N - 1) / 2 * d1,
            -self.cp / t * f0,
            Ep / 2 * t * f0,
            -I * (I + N - 3) / (4 * t) * f0,
            self.v * f0,
        ]

    def _derivs(self, t, h):
        t = np.asarray(t, dtype=float)
        ell = np.minimum(t, 4 / self.eps)
        return t, ell, fd_derivatives(self.unnormalized, t, 1e-3 * ell if h is None else h)

    def residual(self, t, h=None):
        t, ell, (f0, d1, _) = self._derivs(t, h)
        return _relative(self.residual_terms(t, h), _floor(f0, d1, ell, lead=t))

    def nodes(self, t_max=None, samples=20000):
        t_max = t_max or 80 * (self.n + self.kummer_b + 2) / self.eps
        t = np.linspace(t_max / samples, t_max, samples)
        v = self.unnormalized(t)
        return int(np.sum(np.sign(v[1:]) * np.sign(v[:-1]) < 0))


@dataclass
class ParabolicSolution:
    N: int
    n1: int
    n2: int
    I: int
    eps: float
    c0p: float
    f1: ParabolicFactor
    f2: ParabolicFactor

    @property
    def separation_sum(self):
        """v1 + v2, which must equal c0' for the two equations to add up."""
        return self.f1.v + self.f2.v


def printed_parabolic_constant(N, n, I, delta):
    b = I + delta + (N - 1) / 2
    return math.exp(0.5 * (log_gamma(n + b) - log_gamma(n + 1)) - log_gamma(b))


def build_parabolic(params, n1, n2, I):
    """Parabolic factors with eps from the reconciled energy (E' = -eps^2/8).

    The separation constants are v_i = (eps/2) (n_i + (delta_i + I + (N-1)/2)/2),
    the quantization condition written in the variable eps t/2 of f_i.
    """
    if min(n1, n2) < 0 or I < 0:
        raise QuantumNumberError("n1, n2, I must be non-negative")
    v = params.numeric()
    N = params.N
    hbar = v["hbar"]
    d1, d2 = delta_pair(params, I)
    n_eff = n1 + n2 + (d1 + d2 + 2 * I + N - 1) / 2
    c0p = v["c0"] / hbar**2
    eps = 2 * c0p / n_eff
    factors = []
    for n, d, c in ((n1, d1, v["c1"]), (n2, d2, v["c2"])):
        vi = eps / 2 * (n + (d + I + (N - 1) / 2) / 2)
        factors.append(ParabolicFactor(N, n, I, d, c / hbar**2, eps, vi, printed_parabolic_constant(N, n, I, d)))
    return ParabolicSolution(N, n1, n2, I, eps, c0p, *factors)


# --------------------------------------------------------------------------


def norm_check(solution, nodes=None):
    """Squared norm with the solution's constant (radial r^{N-1}dr, angular sin^{N-2}phi dphi)."""
    return solution.squared_norm(nodes)


def norm_audit(solution, nodes=None):
    """Printed constant versus the constant that normalizes the solution."""
    sq = solution.squared_norm(nodes)
    c = solution.constant
    correct = abs(c) / math.sqrt(sq) if sq > 0 else math.nan
    return {
        "squared_norm": sq,
        "printed_constant": c,
        "correct_constant": correct,
        "ratio_printed_sq_over_correct_sq": (c / correct) ** 2 if correct else math.nan,
        "confirmed": abs(sq - 1) < 1e-6,
    }
