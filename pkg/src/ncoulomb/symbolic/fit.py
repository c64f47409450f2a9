"""Exact fitting of a target expression as a linear combination of a basis.

Coefficients may be polynomials (or ratios of polynomials) in i, hbar, c0,
c1, c2.  Rows of the linear system are the (r, x, p)-monomials of the
numerators over a common denominator; a random numeric specialization of the
parameters picks an independent subset of rows, the small system is solved
exactly, and the answer is checked against the full target exactly.
"""
import random
from dataclasses import dataclass, field

import numpy as np
import sympy as sp

from .coeff import PARAM_NAMES, ParamCoeff
from .diffop import DiffOp
from .expr import _lift, sum_exprs


class FitError(ValueError):
    pass


@dataclass
class FitResult:
    success: bool
    coefficients: dict
    free_parameters: list = field(default_factory=list)
    residual: object = None
    rank: int = 0

    def coefficient(self, name):
        return self.coefficients[name]


def _symbol(e):
    return e.symbol if isinstance(e, DiffOp) else e


def _rows(e, target):
    """row key (r_bit, x/p exponents) -> {(i_bit, param exponents): fmpq}."""
    num = _lift(e.ring, e.num, e.den, target)
    rows = {}
    for (rb, ib), P in num.items():
        for exps, c in P.terms():
            exps = tuple(exps)
            rows.setdefault((rb, exps[4:]), {})[(ib, exps[:4])] = c
    return rows


def _row_value(entry, pvals):
    total = 0j
    for (ib, pe), c in entry.items():
        v = int(c.p) / int(c.q)
        for base, k in zip(pvals, pe):
            if k:
                v *= base ** int(k)
        total += v * (1j if ib else 1)
    return total


def _row_sympy(entry):
    syms = sp.symbols(PARAM_NAMES)
    out = sp.Integer(0)
    for (ib, pe), c in entry.items():
        term = sp.Rational(int(c.p), int(c.q))
        for s, k in zip(syms, pe):
            if k:
                term *= s ** int(k)
        out += term * (sp.I if ib else 1)
    return out


def fit_linear_combination(target, basis, seed=0, validate=True):
    """Find coefficients with sum(lambda_k * basis_k) == target exactly.

    ``basis`` is a sequence of (name, expr) pairs; expressions may be
    CanonicalExpr or DiffOp.  A dependent basis gives a family of solutions:
    free coefficients are set to zero and listed in ``free_parameters``.
    """
    names = [n for n, _ in basis]
    exprs = [_symbol(b) for _, b in basis]
    t = _symbol(target)
    if not exprs:
        raise FitError("empty basis")
    den = tuple(max(e.den[i] for e in exprs + [t]) for i in range(3))
    cols = [_rows(e, den) for e in exprs]
    trow = _rows(t, den)
    keys = sorted(set().union(trow, *cols))
    rng = random.Random(seed)
    pvals = [rng.uniform(0.6, 1.7) for _ in PARAM_NAMES]

    n = len(exprs)
    chosen = []
    mat = np.zeros((0, n), dtype=complex)
    rank = 0
    # rows independent in the basis columns; consistency is settled exactly later
    for key in keys:
        row = np.array([_row_value(c.get(key, {}), pvals) for c in cols])
        scale = np.max(np.abs(row))
        if scale == 0:
            continue
        trial = np.vstack([mat, row / scale])
        new_rank = np.linalg.matrix_rank(trial, tol=1e-9 * max(1.0, trial.shape[0]))
        if new_rank > rank:
            mat, rank = trial, new_rank
            chosen.append(key)
            if rank == n:
                break

    lam = sp.symbols(f"lam0:{n}")
    eqs = []
    for key in chosen:
        lhs = sum(_row_sympy(c.get(key, {})) * lam[i] for i, c in enumerate(cols))
        eqs.append(sp.expand(lhs - _row_sympy(trow.get(key, {}))))
    sols = sp.linsolve(eqs, lam) if eqs else sp.FiniteSet(tuple(sp.Integer(0) for _ in lam))
    if not sols:
        # cannot happen for independent rows, kept as a guard
        return FitResult(False, {}, residual=t, rank=rank)
    sol = next(iter(sols))
    free = sorted({s for v in sol for s in v.free_symbols if s in lam}, key=str)
    sol = [sp.factor(sp.simplify(v.subs({s: 0 for s in free}))) for v in sol]
    coeffs = dict(zip(names, sol))
    free_names = [names[lam.index(s)] for s in free]
    result = FitResult(True, coeffs, free_names, rank=rank)
    if validate:
        residual = fit_residual(target, basis, coeffs)
        result.residual = residual
        result.success = residual.is_zero()
        if not result.success:
            result.coefficients = {}
    return result


def fit_residual(target, basis, coeffs):
    """Exact target - sum(lambda_k * basis_k), scaled by the common denominator of the lambdas."""
    t = _symbol(target)
    together = [sp.together(coeffs[name]) for name, _ in basis]
    dens = [sp.fraction(v)[1] for v in together]
    common = sp.lcm(dens) if dens else sp.Integer(1)
    parts = []
    for (name, b), v in zip(basis, together):
        c = sp.expand(sp.cancel(v * common))
        if c != 0:
            parts.append(-(_symbol(b) * ParamCoeff.from_sympy(c)))
    parts.append(t * ParamCoeff.from_sympy(sp.expand(common)))
    return sum_exprs(parts, t.N)
