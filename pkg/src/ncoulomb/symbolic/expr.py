"""Exact canonical rational expressions in x_1..x_N, p_1..p_N and r = |x|.

An expression is ``(P0 + r*P1) / (r**a * (r + x_N)**b * (r - x_N)**c)`` where
P0, P1 are polynomials in the coordinates, momenta and the parameters
hbar, c0, c1, c2 (the imaginary unit is carried as a separate block).  Since
r**2 = sum(x_i**2) the numerator never needs a higher power of r, and the
three denominator factors are prime in Q[x][r]/(r^2 - |x|^2), so dividing
them out whenever they divide the numerator yields a unique normal form.
"""
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import flint
from flint.utils.flint_exceptions import DomainError

from .coeff import PARAM_NAMES, ParamCoeff

FACTOR_NAMES = ("r", "r+xN", "r-xN")
_R, _Q, _M = 0, 1, 2


class UnsupportedDenominatorError(ValueError):
    pass


class PoleError(ZeroDivisionError):
    pass


class DimensionMismatchError(ValueError):
    pass


class Ring:
    """Polynomial context shared by all expressions of one dimension N."""

    def __init__(self, N):
        if N < 2:
            raise ValueError("dimension must be at least 2")
        self.N = N
        self.names = (
            PARAM_NAMES
            + tuple(f"x{k}" for k in range(1, N + 1))
            + tuple(f"p{k}" for k in range(1, N + 1))
        )
        self.ctx = flint.fmpq_mpoly_ctx.get(self.names, "deglex")
        gens = self.ctx.gens()
        self.gens = gens
        self.param_gens = gens[:4]
        self.x = gens[4 : 4 + N]
        self.p = gens[4 + N :]
        self.zero = self.ctx.constant(0)
        self.one = self.ctx.constant(1)
        self.s = sum(xi**2 for xi in self.x)
        self.xN = self.x[-1]
        self.rho2 = self.s - self.xN**2

    def x_index(self, k):
        return 4 + k - 1

    def p_index(self, k):
        return 4 + self.N + k - 1

    def var_index(self, variable):
        """Context index of 'x3' / 'p1' / ('x', 3)."""
        if isinstance(variable, str):
            kind, k = variable[0], int(variable[1:])
        else:
            kind, k = variable
        if not 1 <= k <= self.N or kind not in "xp":
            raise ValueError(f"unknown variable {variable!r} for N={self.N}")
        return self.x_index(k) if kind == "x" else self.p_index(k)


@lru_cache(maxsize=None)
def ring(N):
    return Ring(N)


# --------------------------------------------------------------------------
# numerator block algebra: dict (r_bit, i_bit) -> nonzero fmpq_mpoly


def _clean(num):
    return {k: v for k, v in num.items() if not v.is_zero()}


def _num_add_into(acc, num, sign=1):
    for k, v in num.items():
        if k in acc:
            acc[k] = acc[k] + v if sign > 0 else acc[k] - v
        else:
            acc[k] = v if sign > 0 else -v


def _num_mul(R, n1, n2):
    out = {}
    rr = {}
    for (r1, i1), P in n1.items():
        for (r2, i2), Q in n2.items():
            prod = P * Q
            ib = i1 + i2
            if ib == 2:
                prod = -prod
                ib = 0
            if r1 + r2 == 2:
                rr[ib] = rr[ib] + prod if ib in rr else prod
            else:
                key = (r1 + r2, ib)
                out[key] = out[key] + prod if key in out else prod
    for ib, P in rr.items():
        key = (0, ib)
        P = P * R.s
        out[key] = out[key] + P if key in out else P
    return _clean(out)


def _num_scale(num, poly):
    return _clean({k: v * poly for k, v in num.items()})


def _pairs(R, num):
    for ib in (0, 1):
        P0 = num.get((0, ib))
        P1 = num.get((1, ib))
        if P0 is None and P1 is None:
            continue
        yield ib, (P0 if P0 is not None else R.zero), (P1 if P1 is not None else R.zero)


def _num_from_pairs(pairs):
    out = {}
    for ib, P0, P1 in pairs:
        if not P0.is_zero():
            out[(0, ib)] = P0
        if not P1.is_zero():
            out[(1, ib)] = P1
    return out


def _num_mul_factor(R, num, which):
    xN, s = R.xN, R.s
    pairs = []
    for ib, P0, P1 in _pairs(R, num):
        if which == _R:
            pairs.append((ib, s * P1, P0))
        elif which == _Q:
            pairs.append((ib, xN * P0 + s * P1, P0 + xN * P1))
        else:
            pairs.append((ib, s * P1 - xN * P0, P0 - xN * P1))
    return _num_from_pairs(pairs)


def _exact_div(P, D):
    if P.is_zero():
        return P
    try:
        return P / D
    except DomainError:
        return None


def _num_try_div(R, num, which):
    """Quotient of the numerator by one denominator factor, or None."""
    xN, s = R.xN, R.s
    pairs = []
    for ib, P0, P1 in _pairs(R, num):
        if which == _R:
            # (P0 + r P1)/r = P1 + r * P0/s
            q = _exact_div(P0, s)
            if q is None:
                return None
            pairs.append((ib, P1, q))
            continue
        if which == _Q:
            # multiply by the conjugate (r - xN); (r + xN)(r - xN) = rho^2
            T1 = P0 - xN * P1
            T0 = s * P1 - xN * P0
        else:
            T1 = P0 + xN * P1
            T0 = s * P1 + xN * P0
        q1 = _exact_div(T1, R.rho2)
        if q1 is None:
            return None
        q0 = _exact_div(T0, R.rho2)
        if q0 is None:
            return None
        pairs.append((ib, q0, q1))
    return _num_from_pairs(pairs)


def _canonical(R, num, den):
    num = _clean(num)
    if not num:
        return CanonicalExpr(R, {}, (0, 0, 0))
    den = list(den)
    for which in (_R, _Q, _M):
        while den[which] > 0:
            q = _num_try_div(R, num, which)
            if q is None:
                break
            num = q
            den[which] -= 1
    return CanonicalExpr(R, num, tuple(den))


def _lift(R, num, den, target):
    for which in (_R, _Q, _M):
        for _ in range(target[which] - den[which]):
            num = _num_mul_factor(R, num, which)
    return num


def combine(R, parts):
    """Canonical sum of (numerator, denominator) parts over a common denominator."""
    parts = [(n, d) for n, d in parts if n]
    if not parts:
        return CanonicalExpr(R, {}, (0, 0, 0))
    target = tuple(max(d[i] for _, d in parts) for i in range(3))
    acc = {}
    for num, den in parts:
        _num_add_into(acc, _lift(R, num, den, target))
    return _canonical(R, acc, target)


def sum_exprs(exprs, N=None):
    exprs = list(exprs)
    if not exprs:
        if N is None:
            raise ValueError("empty sum needs an explicit dimension")
        return zero(N)
    R = exprs[0].ring
    for e in exprs:
        _check_same(e.ring, R)
    return combine(R, [(e.num, e.den) for e in exprs])


def _check_same(R1, R2):
    if R1.N != R2.N:
        raise DimensionMismatchError(f"dimension mismatch: N={R1.N} vs N={R2.N}")


# --------------------------------------------------------------------------


class CanonicalExpr:
    """Immutable canonical rational expression; build with the module helpers."""

    __slots__ = ("ring", "num", "den")

    def __init__(self, R, num, den):
        self.ring = R
        self.num = num
        self.den = den

    @property
    def N(self):
        return self.ring.N

    # -- arithmetic ---------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, CanonicalExpr):
            _check_same(self.ring, other.ring)
            return other
        if isinstance(other, (int, Fraction, ParamCoeff)):
            return const(self.N, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return combine(self.ring, [(self.num, self.den), (other.num, other.den)])

    __radd__ = __add__

    def __neg__(self):
        return CanonicalExpr(self.ring, {k: -v for k, v in self.num.items()}, self.den)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        R = self.ring
        num = _num_mul(R, self.num, other.num)
        den = tuple(a + b for a, b in zip(self.den, other.den))
        return _canonical(R, num, den)

    __rmul__ = __mul__

    def __pow__(self, k):
        if not isinstance(k, int) or k < 0:
            raise ValueError("only non-negative integer powers are supported")
        out = const(self.N, 1)
        base = self
        while k:
            if k & 1:
                out = out * base
            k >>= 1
            if k:
                base = base * base
        return out

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * reciprocal(other)

    # -- predicates -----------------------------------------------------------
    def is_zero(self):
        return not self.num

    def __eq__(self, other):
        other = self._coerce(other) if not isinstance(other, CanonicalExpr) else other
        if other is NotImplemented or not isinstance(other, CanonicalExpr):
            return False
        if other.N != self.N:
            return False
        return (self - other).is_zero()

    __hash__ = None

    def is_constant(self):
        """True for a pure parameter coefficient (no x, p or r)."""
        if self.den != (0, 0, 0):
            return False
        for (rb, _), P in self.num.items():
            if rb:
                return False
            for exps in P.monoms():
                if any(exps[4:]):
                    return False
        return True

    def has_momenta(self):
        lo = 4 + self.N
        return any(any(e[lo:]) for P in self.num.values() for e in P.monoms())

    def as_coeff(self):
        if not self.is_constant():
            raise ValueError("expression is not constant")
        return ParamCoeff(*_param_parts(self))

    # -- structure --------------------------------------------------------------
    def terms(self):
        """Canonical term list ((r_bit, i_bit, exponents), Fraction), sorted."""
        out = []
        for (rb, ib), P in self.num.items():
            for exps, c in P.terms():
                out.append(((rb, ib, tuple(exps)), Fraction(int(c.p), int(c.q))))
        out.sort()
        return out

    def size(self):
        return sum(len(P) for P in self.num.values())

    def dump(self):
        """Plain-text canonical listing: a header line then one monomial per line."""
        names = self.ring.names
        lines = [f"N={self.N} den r^{self.den[0]} (r+xN)^{self.den[1]} (r-xN)^{self.den[2]}"]
        for (rb, ib, exps), c in self.terms():
            mono = "*".join(
                f"{n}^{e}" if e > 1 else n for n, e in zip(names, exps) if e
            )
            factors = [f for f, on in (("r", rb), ("i", ib)) if on]
            if mono:
                factors.append(mono)
            lines.append(f"{c} {'*'.join(factors) or '1'}")
        return "\n".join(lines) + "\n"

    def __repr__(self):
        body = self.dump().splitlines()
        if len(body) > 6:
            body = body[:6] + [f"... ({len(body) - 1} terms)"]
        return "CanonicalExpr(" + "; ".join(body) + ")"

    # -- transformations ----------------------------------------------------------
    def derivative(self, variable):
        return partial_derivative(self, variable)

    def map_polys(self, fn):
        return _canonical(self.ring, {k: fn(v) for k, v in self.num.items()}, self.den)

    def conj(self):
        return CanonicalExpr(
            self.ring,
            {k: (-v if k[1] else v) for k, v in self.num.items()},
            self.den,
        )

    def reflect(self, k):
        """Substitute x_k -> -x_k, p_k -> -p_k (k < N keeps r and x_N fixed)."""
        R = self.ring
        if k == R.N:
            raise ValueError("reflection of x_N changes the denominator factors")
        gens = list(R.gens)
        gens[R.x_index(k)] = -gens[R.x_index(k)]
        gens[R.p_index(k)] = -gens[R.p_index(k)]
        return self.map_polys(lambda P: P.compose(*gens))

    def bind(self, values):
        """Substitute rational values for any of hbar, c0, c1, c2."""
        R = self.ring
        gens = list(R.gens)
        for name, v in values.items():
            v = Fraction(v)
            gens[PARAM_NAMES.index(name)] = R.ctx.constant(flint.fmpq(v.numerator, v.denominator))
        return self.map_polys(lambda P: P.compose(*gens))


def _param_parts(e):
    from .coeff import PARAM_CTX

    parts = []
    for ib in (0, 1):
        P = e.num.get((0, ib))
        d = {}
        if P is not None:
            for exps, c in P.terms():
                d[tuple(exps[:4])] = c
        parts.append(PARAM_CTX.from_dict(d) if d else PARAM_CTX.constant(0))
    return parts


# --------------------------------------------------------------------------
# constructors


def zero(N):
    return CanonicalExpr(ring(N), {}, (0, 0, 0))


def const(N, value):
    R = ring(N)
    if isinstance(value, ParamCoeff):
        num = {}
        for ib, P in ((0, value.re), (1, value.im)):
            if not P.is_zero():
                d = {tuple(e) + (0,) * (2 * N): c for e, c in P.terms()}
                num[(0, ib)] = R.ctx.from_dict(d)
        return CanonicalExpr(R, num, (0, 0, 0))
    value = Fraction(value)
    if value == 0:
        return zero(N)
    return CanonicalExpr(
        R, {(0, 0): R.ctx.constant(flint.fmpq(value.numerator, value.denominator))}, (0, 0, 0)
    )


def param(N, name):
    R = ring(N)
    return CanonicalExpr(R, {(0, 0): R.param_gens[PARAM_NAMES.index(name)]}, (0, 0, 0))


def imag_unit(N):
    R = ring(N)
    return CanonicalExpr(R, {(0, 1): R.one}, (0, 0, 0))


def x(N, k):
    R = ring(N)
    return CanonicalExpr(R, {(0, 0): R.x[k - 1]}, (0, 0, 0))


def p(N, k):
    R = ring(N)
    return CanonicalExpr(R, {(0, 0): R.p[k - 1]}, (0, 0, 0))


def r(N):
    R = ring(N)
    return CanonicalExpr(R, {(1, 0): R.one}, (0, 0, 0))


def inverse_factor(N, which, power=1):
    """1 / factor**power for factor in ('r', 'r+xN', 'r-xN')."""
    R = ring(N)
    den = [0, 0, 0]
    den[FACTOR_NAMES.index(which)] = power
    return CanonicalExpr(R, {(0, 0): R.one}, tuple(den))


def reciprocal(e):
    """1/e when e is a nonzero rational multiple of r^a (r+xN)^b (r-xN)^c."""
    R = e.ring
    num = dict(e.num)
    if not num:
        raise ZeroDivisionError("reciprocal of zero")
    stripped = [0, 0, 0]
    for which in (_R, _Q, _M):
        while True:
            q = _num_try_div(R, num, which)
            if q is None:
                break
            num = q
            stripped[which] += 1
    if set(num) != {(0, 0)} or not num[(0, 0)].is_constant():
        raise UnsupportedDenominatorError(
            "denominator is not a product of r, r+x_N, r-x_N and a rational constant"
        )
    c = num[(0, 0)].leading_coefficient()
    # 1/(c * F / D) = D / (c * F): D's factors move to the numerator
    out = CanonicalExpr(R, {(0, 0): R.ctx.constant(1 / c)}, tuple(stripped))
    for which, k in enumerate(e.den):
        for _ in range(k):
            out = CanonicalExpr(R, _num_mul_factor(R, out.num, which), out.den)
    return _canonical(R, out.num, out.den)


# --------------------------------------------------------------------------
# differentiation and brackets


def partial_derivative(e, variable):
    R = e.ring
    idx = R.var_index(variable)
    if not e.num:
        return e
    if idx >= 4 + R.N:  # momentum: r and the denominators do not depend on p
        return _canonical(R, {k: v.derivative(idx) for k, v in e.num.items()}, e.den)
    k = idx - 4 + 1
    xk = R.x[k - 1]
    is_last = k == R.N
    a, b, c = e.den
    parts = []
    # d(P0 + r P1) = dP0 + r dP1 + (x_k / r) P1  ->  [(s dP1 + x_k P1) + r dP0] / r
    pairs = []
    for ib, P0, P1 in _pairs(R, e.num):
        dP0 = P0.derivative(idx)
        dP1 = P1.derivative(idx)
        pairs.append((ib, R.s * dP1 + xk * P1, dP0))
    parts.append((_num_from_pairs(pairs), (a + 1, b, c)))
    if a:
        # -a x_k / r^2 * N / D
        parts.append((_num_scale(e.num, -a * xk), (a + 2, b, c)))
    if b:
        # -b (x_k + [k=N] r) / (r (r+xN)) * N / D
        fac = {(0, 0): -b * xk}
        if is_last:
            fac[(1, 0)] = R.ctx.constant(-b)
        parts.append((_num_mul(R, e.num, fac), (a + 1, b + 1, c)))
    if c:
        fac = {(0, 0): -c * xk}
        if is_last:
            fac[(1, 0)] = R.ctx.constant(c)
        parts.append((_num_mul(R, e.num, fac), (a + 1, b, c + 1)))
    return combine(R, parts)


def poisson_bracket(f, g, convention="paper"):
    """Poisson bracket.

    ``convention="paper"`` is sum_j (df/dp_j dg/dx_j - df/dx_j dg/dp_j), so
    that {x_1, p_1} = -1; ``"standard"`` flips the overall sign.
    """
    _check_same(f.ring, g.ring)
    if convention not in ("paper", "standard"):
        raise ValueError(f"unknown bracket convention {convention!r}")
    N = f.N
    parts = []
    for j in range(1, N + 1):
        dfp = partial_derivative(f, f"p{j}")
        dgx = partial_derivative(g, f"x{j}")
        if dfp.num and dgx.num:
            parts.append(dfp * dgx)
        dfx = partial_derivative(f, f"x{j}")
        dgp = partial_derivative(g, f"p{j}")
        if dfx.num and dgp.num:
            parts.append(-(dfx * dgp))
    out = sum_exprs(parts, N)
    return -out if convention == "standard" else out


def is_zero(e):
    return e.is_zero()


# --------------------------------------------------------------------------
# evaluation


@dataclass(frozen=True)
class EvalPoint:
    """Phase-space point; r is always derived as +sqrt(sum x_i^2)."""

    x: tuple
    p: tuple = None

    def __post_init__(self):
        object.__setattr__(self, "x", tuple(self.x))
        if self.p is not None:
            object.__setattr__(self, "p", tuple(self.p))
        if sum(v * v for v in self.x) == 0:
            raise PoleError("r = 0 at the evaluation point")


def _exact_sqrt(q):
    q = Fraction(q)
    n, d = q.numerator, q.denominator
    rn, rd = math.isqrt(n), math.isqrt(d)
    if rn * rn != n or rd * rd != d:
        return None
    return Fraction(rn, rd)


def _check_poles(e, r_val, xN):
    a, b, c = e.den
    if (a and r_val == 0) or (b and r_val + xN == 0) or (c and r_val - xN == 0):
        raise PoleError("expression has a pole at the evaluation point")


def _point_args(e, point, params, convert):
    N = e.N
    if len(point.x) != N:
        raise DimensionMismatchError(f"point has {len(point.x)} coordinates, expected {N}")
    pv = point.p if point.p is not None else (0,) * N
    missing = [n for n in PARAM_NAMES if n not in params]
    if missing:
        # unbound parameters only matter if they appear
        used = set()
        for P in e.num.values():
            for exps in P.monoms():
                used.update(i for i in range(4) if exps[i])
        if any(PARAM_NAMES[i] in missing for i in used):
            raise ValueError(f"missing parameter values: {missing}")
    return [convert(params.get(n, 0)) for n in PARAM_NAMES] + [convert(v) for v in point.x] + [
        convert(v) for v in pv
    ]


def eval_exact(e, point, params=None):
    """Exact value as (real, imag) Fractions; r must be rational at the point."""
    params = params or {}
    s = sum(Fraction(v) ** 2 for v in point.x)
    r_val = _exact_sqrt(s)
    if r_val is None:
        raise ValueError("r is irrational at this point; use a Pythagorean point")
    xN = Fraction(point.x[-1])
    _check_poles(e, r_val, xN)

    def conv(v):
        v = Fraction(v)
        return flint.fmpq(v.numerator, v.denominator)

    args = _point_args(e, point, params, conv)
    re = Fraction(0)
    im = Fraction(0)
    for (rb, ib), P in e.num.items():
        v = P(*args)
        v = Fraction(int(v.p), int(v.q)) * (r_val if rb else 1)
        if ib:
            im += v
        else:
            re += v
    a, b, c = e.den
    D = r_val**a * (r_val + xN) ** b * (r_val - xN) ** c
    return re / D, im / D


def eval_numeric(e, point, params=None):
    """Floating-point value (complex) with r = +sqrt(sum x_i^2)."""
    params = params or {}
    args = _point_args(e, point, params, complex)
    r_val = math.sqrt(sum(float(v) ** 2 for v in point.x))
    xN = float(point.x[-1])
    a, b, c = e.den
    if (a and r_val == 0) or (b and r_val + xN == 0) or (c and r_val - xN == 0):
        raise PoleError("expression has a pole at the evaluation point")
    total = 0j
    for (rb, ib), P in e.num.items():
        acc = 0j
        for exps, coef in P.terms():
            term = complex(int(coef.p) / int(coef.q))
            for v, k in zip(args, exps):
                if k:
                    term *= v ** int(k)
            acc += term
        if rb:
            acc *= r_val
        if ib:
            acc *= 1j
        total += acc
    return total / (r_val**a * (r_val + xN) ** b * (r_val - xN) ** c)
