"""Linear differential operators with canonical rational coefficients.

An operator sum_a c_a(x) d^a is stored through its symbol, a
:class:`CanonicalExpr` in which the momentum slot p_j stands for the partial
derivative d/dx_j written to the right of every coefficient.  Composition
uses the exact finite Leibniz expansion on symbols

    sigma(P o Q) = sum_a 1/a! * d_xi^a sigma(P) * d_x^a sigma(Q)

so nothing needs to be applied to test functions.
"""
import time
from fractions import Fraction
from math import factorial

from .coeff import ParamCoeff
from .expr import (
    CanonicalExpr,
    _check_same,
    const,
    imag_unit,
    param,
    partial_derivative,
    sum_exprs,
    zero,
)


class Cancelled(RuntimeError):
    pass


class CancelToken:
    """Cooperative cancellation, polled between expansion terms."""

    def __init__(self, deadline=None):
        self._cancelled = False
        self.deadline = deadline

    @classmethod
    def with_timeout(cls, seconds):
        return cls(time.monotonic() + seconds)

    def cancel(self):
        self._cancelled = True

    @property
    def cancelled(self):
        if self.deadline is not None and time.monotonic() > self.deadline:
            self._cancelled = True
        return self._cancelled

    def check(self):
        if self.cancelled:
            raise Cancelled("operation cancelled")


def _xi_degree(sym):
    lo = 4 + sym.N
    deg = [0] * sym.N
    for P in sym.num.values():
        for e in P.monoms():
            for j in range(sym.N):
                deg[j] = max(deg[j], e[lo + j])
    return deg


class DiffOp:
    """Differential operator; ``*`` composes, scalars and functions multiply."""

    __slots__ = ("symbol",)

    def __init__(self, symbol):
        if not isinstance(symbol, CanonicalExpr):
            raise TypeError("DiffOp needs a CanonicalExpr symbol")
        self.symbol = symbol

    @property
    def N(self):
        return self.symbol.N

    # -- constructors -------------------------------------------------------
    @classmethod
    def multiplication(cls, f):
        if f.has_momenta():
            raise ValueError("a multiplication operator cannot depend on momenta")
        return cls(f)

    @classmethod
    def scalar(cls, N, value):
        return cls(const(N, value))

    @classmethod
    def partial(cls, N, j):
        from .expr import p

        return cls(p(N, j))

    @classmethod
    def momentum(cls, N, j):
        """Quantum momentum -i*hbar*d/dx_j."""
        from .expr import p

        return cls(-(imag_unit(N) * param(N, "hbar") * p(N, j)))

    # -- algebra --------------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, DiffOp):
            _check_same(self.symbol.ring, other.symbol.ring)
            return other
        if isinstance(other, (int, Fraction, ParamCoeff)):
            return DiffOp(const(self.N, other))
        if isinstance(other, CanonicalExpr):
            return DiffOp.multiplication(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return DiffOp(self.symbol + other.symbol)

    __radd__ = __add__

    def __neg__(self):
        return DiffOp(-self.symbol)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return DiffOp(self.symbol - other.symbol)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return compose(self, other)

    def __rmul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return compose(other, self)

    def __pow__(self, k):
        out = DiffOp.scalar(self.N, 1)
        for _ in range(k):
            out = out * self
        return out

    def is_zero(self):
        return self.symbol.is_zero()

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return False
        return (self.symbol - other.symbol).is_zero()

    __hash__ = None

    def order(self):
        return max((sum(e[4 + self.N :]) for P in self.symbol.num.values() for e in P.monoms()), default=0)

    def terms(self):
        """{multi-index: coefficient CanonicalExpr} with the d-powers split off."""
        R = self.symbol.ring
        lo = 4 + self.N
        groups = {}
        for key, P in self.symbol.num.items():
            for exps, c in P.terms():
                alpha = tuple(exps[lo:])
                base = tuple(exps[:lo]) + (0,) * self.N
                groups.setdefault(alpha, {}).setdefault(key, {})[base] = c
        out = {}
        for alpha, blocks in sorted(groups.items()):
            num = {k: R.ctx.from_dict(d) for k, d in blocks.items()}
            from .expr import _canonical

            out[alpha] = _canonical(R, num, self.symbol.den)
        return out

    def apply(self, f):
        """Apply to a function given as a momentum-free CanonicalExpr."""
        if f.has_momenta():
            raise ValueError("operand must not depend on momenta")
        parts = []
        for alpha, coef in self.terms().items():
            g = f
            for j, k in enumerate(alpha, start=1):
                for _ in range(k):
                    g = partial_derivative(g, f"x{j}")
            parts.append(coef * g)
        return sum_exprs(parts, self.N)

    def dump(self):
        return self.symbol.dump()

    def __repr__(self):
        return f"DiffOp({self.symbol!r})"


def _multi_indices(deg):
    """Multi-indices a <= deg (componentwise), each once, with a = 0 first."""
    N = len(deg)
    out = [(0,) * N]
    # breadth-first over nondecreasing index sequences
    frontier = [((0,) * N, 0)]
    while frontier:
        nxt = []
        for alpha, start in frontier:
            for j in range(start, N):
                if alpha[j] < deg[j]:
                    beta = alpha[:j] + (alpha[j] + 1,) + alpha[j + 1 :]
                    out.append(beta)
                    nxt.append((beta, j))
        frontier = nxt
    return out


def _parent(alpha):
    """(parent multi-index, j) with alpha = parent + e_j, j the last nonzero slot."""
    j = max(i for i, a in enumerate(alpha) if a)
    parent = alpha[:j] + (alpha[j] - 1,) + alpha[j + 1 :]
    return parent, j


def _inv_factorial(alpha):
    d = 1
    for a in alpha:
        d *= factorial(a)
    return Fraction(1, d)


def compose(P, Q, token=None, skip_zero_order=False):
    """Symbol of P o Q (``skip_zero_order`` drops the a = 0 term)."""
    _check_same(P.symbol.ring, Q.symbol.ring)
    N = P.N
    sp, sq = P.symbol, Q.symbol
    if sp.is_zero() or sq.is_zero():
        return DiffOp(zero(N))
    d_xi = {(0,) * N: sp}
    d_x = {(0,) * N: sq}
    parts = []
    for alpha in _multi_indices(_xi_degree(sp)):
        if token is not None:
            token.check()
        if any(alpha):
            parent, j = _parent(alpha)
            a = d_xi.get(parent)
            b = d_x.get(parent)
            if a is None or b is None:
                continue
            a = partial_derivative(a, f"p{j + 1}")
            if a.is_zero():
                continue
            b = partial_derivative(b, f"x{j + 1}")
            if b.is_zero():
                continue
            d_xi[alpha] = a
            d_x[alpha] = b
        elif skip_zero_order:
            continue
        term = d_xi[alpha] * d_x[alpha]
        w = _inv_factorial(alpha)
        parts.append(term if w == 1 else term * w)
    return DiffOp(sum_exprs(parts, N))


def commutator(P, Q, token=None):
    """[P, Q]; the a = 0 Leibniz terms cancel and are skipped."""
    pq = compose(P, Q, token, skip_zero_order=True)
    qp = compose(Q, P, token, skip_zero_order=True)
    return DiffOp(pq.symbol - qp.symbol)


def anticommutator(P, Q, token=None):
    return DiffOp(compose(P, Q, token).symbol + compose(Q, P, token).symbol)


def adjoint(P, token=None):
    """Formal adjoint with respect to Lebesgue measure."""
    N = P.N
    R = P.symbol.ring
    gens = list(R.gens)
    for j in range(1, N + 1):
        gens[R.p_index(j)] = -gens[R.p_index(j)]
    base = P.symbol.conj().map_polys(lambda poly: poly.compose(*gens))
    derivs = {(0,) * N: base}
    parts = [base]
    for beta in _multi_indices(_xi_degree(base))[1:]:
        if token is not None:
            token.check()
        parent, j = _parent(beta)
        prev = derivs.get(parent)
        if prev is None:
            continue
        d = partial_derivative(partial_derivative(prev, f"p{j + 1}"), f"x{j + 1}")
        if d.is_zero():
            continue
        derivs[beta] = d
        parts.append(d * _inv_factorial(beta))
    return DiffOp(sum_exprs(parts, N))
