"""Scalar coefficients: polynomials in i, hbar, c0, c1, c2 over the rationals.

The imaginary unit is kept as a formal generator reduced by i**2 = -1, so a
coefficient is stored as a pair ``re + i*im`` of rational polynomials in the
four physical parameters.
"""
from fractions import Fraction

import flint
import sympy as sp

PARAM_NAMES = ("hbar", "c0", "c1", "c2")

PARAM_CTX = flint.fmpq_mpoly_ctx.get(PARAM_NAMES, "deglex")


def _to_fraction(q):
    return Fraction(int(q.p), int(q.q))


class ParamCoeff:
    """Element of Q[i, hbar, c0, c1, c2] / (i^2 + 1)."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = _as_param_poly(re)
        self.im = _as_param_poly(im)

    @classmethod
    def param(cls, name):
        return cls(PARAM_CTX.gens()[PARAM_NAMES.index(name)])

    @classmethod
    def i(cls):
        return cls(0, 1)

    def is_zero(self):
        return self.re.is_zero() and self.im.is_zero()

    def __bool__(self):
        return not self.is_zero()

    def __add__(self, other):
        other = _as_coeff(other)
        if other is NotImplemented:
            return other
        return ParamCoeff(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __neg__(self):
        return ParamCoeff(-self.re, -self.im)

    def __sub__(self, other):
        other = _as_coeff(other)
        if other is NotImplemented:
            return other
        return ParamCoeff(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = _as_coeff(other)
        if other is NotImplemented:
            return other
        re = self.re * other.re - self.im * other.im
        im = self.re * other.im + self.im * other.re
        return ParamCoeff(re, im)

    __rmul__ = __mul__

    def __pow__(self, k):
        out = ParamCoeff(1)
        for _ in range(k):
            out = out * self
        return out

    def conj(self):
        return ParamCoeff(self.re, -self.im)

    def terms(self):
        """Canonical term list: ((i_exp, param_exps), Fraction), sorted."""
        out = []
        for iexp, poly in ((0, self.re), (1, self.im)):
            for exps, c in poly.terms():
                out.append(((iexp, tuple(exps)), _to_fraction(c)))
        out.sort()
        return out

    def __eq__(self, other):
        other = _as_coeff(other)
        if other is NotImplemented:
            return False
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash(tuple(self.terms()))

    def evaluate(self, values):
        """Numeric value (complex) with parameters taken from ``values``."""
        args = [values[name] for name in PARAM_NAMES]
        total = 0j
        for (iexp, exps), c in self.terms():
            term = float(c)
            for a, e in zip(args, exps):
                if e:
                    term = term * a**e
            total += term * (1j if iexp else 1)
        return total

    def to_sympy(self):
        syms = sp.symbols(PARAM_NAMES)
        out = sp.Integer(0)
        for (iexp, exps), c in self.terms():
            term = sp.Rational(c.numerator, c.denominator)
            for s, e in zip(syms, exps):
                term *= s**e
            out += term * (sp.I if iexp else 1)
        return sp.expand(out)

    @classmethod
    def from_sympy(cls, expr):
        syms = sp.symbols(PARAM_NAMES)
        expr = sp.expand(expr)
        # symbols are treated as real: split on the explicit imaginary unit
        re = sp.expand(expr.subs(sp.I, 0))
        im = sp.expand((expr - re) / sp.I)
        out = []
        for part in (re, im):
            poly = sp.Poly(part, *syms, domain="QQ")
            d = {}
            for monom, c in poly.terms():
                d[tuple(monom)] = flint.fmpq(int(c.p), int(c.q))
            out.append(PARAM_CTX.from_dict(d) if d else PARAM_CTX.constant(0))
        return cls(*out)

    def __str__(self):
        s = str(self.to_sympy())
        return s.replace("hbar", "ħ")

    def __repr__(self):
        return f"ParamCoeff({self.to_sympy()})"


def _as_param_poly(v):
    if isinstance(v, flint.fmpq_mpoly):
        return v
    if isinstance(v, Fraction):
        return PARAM_CTX.constant(flint.fmpq(v.numerator, v.denominator))
    if isinstance(v, int):
        return PARAM_CTX.constant(v)
    raise TypeError(f"cannot use {type(v).__name__} as a parameter polynomial")


def _as_coeff(v):
    if isinstance(v, ParamCoeff):
        return v
    if isinstance(v, (int, Fraction)):
        return ParamCoeff(v)
    return NotImplemented
