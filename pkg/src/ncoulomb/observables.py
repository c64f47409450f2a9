"""Classical phase-space functions and quantum operators of the model.

H = p^2/2 - c0/r + c1/(r(r+x_N)) + c2/(r(r-x_N)) together with the
integrals A, B, the angular momenta L_ij, J^2 and the Casimir combinations.
Couplings stay symbolic unless ``ModelParams`` binds them.
"""
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

from .symbolic.diffop import DiffOp, anticommutator, compose
from .symbolic.expr import (
    CanonicalExpr,
    const,
    imag_unit,
    inverse_factor,
    param,
    poisson_bracket,
    r,
    sum_exprs,
    x,
)
from .symbolic.expr import p as p_sym

RUNGE_LENZ_FORMS = ("first", "second")


@dataclass(frozen=True)
class ModelParams:
    """One instance of the model; couplings left as None stay symbolic."""

    N: int
    c0: object = None
    c1: object = None
    c2: object = None
    hbar: object = None

    def __post_init__(self):
        if not isinstance(self.N, int) or self.N < 3:
            raise ValueError(f"N must be an integer >= 3, got {self.N!r}")

    def bindings(self):
        out = {}
        for name in ("hbar", "c0", "c1", "c2"):
            v = getattr(self, name)
            if v is not None:
                out[name] = Fraction(v) if not isinstance(v, float) else Fraction(str(v))
        return out

    def numeric(self):
        """(c0, c1, c2, hbar) as floats, hbar defaulting to 1."""
        vals = {}
        for name in ("c0", "c1", "c2"):
            v = getattr(self, name)
            if v is None:
                raise ValueError(f"{name} must be bound for numeric work")
            vals[name] = float(v)
        vals["hbar"] = 1.0 if self.hbar is None else float(self.hbar)
        return vals


@dataclass
class ObservableSet:
    kind: str
    params: ModelParams
    H: object
    A: object
    B: object
    J2: object
    L: dict
    MN: object
    C_printed: object
    extras: dict = field(default_factory=dict)

    @property
    def N(self):
        return self.params.N


def _bind(e, params):
    values = params.bindings()
    if not values:
        return e
    if isinstance(e, DiffOp):
        return DiffOp(e.symbol.bind(values))
    return e.bind(values)


def _pieces(N):
    rr = r(N)
    inv_r = inverse_factor(N, "r")
    inv_q = inverse_factor(N, "r+xN")
    inv_m = inverse_factor(N, "r-xN")
    c0, c1, c2 = (param(N, n) for n in ("c0", "c1", "c2"))
    xN = x(N, N)
    return rr, inv_r, inv_q, inv_m, c0, c1, c2, xN


def potential(N):
    rr, inv_r, inv_q, inv_m, c0, c1, c2, _ = _pieces(N)
    return -c0 * inv_r + c1 * inv_r * inv_q + c2 * inv_r * inv_m


def _a_potential(N):
    rr, inv_r, inv_q, inv_m, c0, c1, c2, _ = _pieces(N)
    return 2 * rr * c1 * inv_q + 2 * rr * c2 * inv_m


def _b_potential(N):
    rr, inv_r, inv_q, inv_m, c0, c1, c2, xN = _pieces(N)
    return c1 * (rr - xN) * inv_r * inv_q - c2 * (rr + xN) * inv_r * inv_m


# --------------------------------------------------------------------------
# classical


def build_classical(params, runge_lenz="first"):
    """Classical observables as CanonicalExpr.

    ``runge_lenz="first"`` uses M_j = sum_i L_ji p_i - c0 x_j/r; ``"second"``
    uses the alternative displayed form -x_j(p^2/2 + H_0) + (x.p) p_j - c0 x_j/r
    with H_0 = p^2/2 - c0/r, kept for comparison only.
    """
    N = params.N
    X = [x(N, k) for k in range(1, N + 1)]
    P = [p_sym(N, k) for k in range(1, N + 1)]
    rr, inv_r, inv_q, inv_m, c0, c1, c2, xN = _pieces(N)
    p2 = sum_exprs([pk * pk for pk in P])
    xp = sum_exprs([xk * pk for xk, pk in zip(X, P)])
    L = {(i, j): X[i - 1] * P[j - 1] - X[j - 1] * P[i - 1] for i, j in combinations(range(1, N + 1), 2)}

    H = Fraction(1, 2) * p2 + potential(N)
    A = sum_exprs([L[k] * L[k] for k in L]) + _a_potential(N)
    J2 = sum_exprs([L[(i, j)] * L[(i, j)] for i, j in L if j <= N - 1], N)
    M = classical_runge_lenz(N, N, runge_lenz)
    B = -M + _b_potential(N)

    # closed form of C as displayed for the classical algebra
    terms = []
    for i in range(N):
        for j in range(N):
            terms.append(-2 * X[i] * X[j] * P[i] * P[j] * P[N - 1])
    for i in range(N):
        terms.append(2 * rr * rr * P[i] * P[i] * P[N - 1])
        terms.append(2 * c0 * inv_r * X[i] * xN * P[i])
        terms.append(-2 * c1 * inv_r * X[i] * P[i])
        terms.append(2 * c2 * inv_r * X[i] * P[i])
    terms += [
        -2 * c0 * rr * P[N - 1],
        4 * c1 * rr * P[N - 1] * inv_q,
        4 * c2 * rr * P[N - 1] * inv_m,
    ]
    C_printed = sum_exprs(terms)

    obs = ObservableSet("classical", params, H, A, B, J2, L, M, C_printed)
    obs.extras["p2"] = p2
    obs.extras["xp"] = xp
    return _bind_set(obs)


def classical_runge_lenz(N, j, form="first"):
    X = [x(N, k) for k in range(1, N + 1)]
    P = [p_sym(N, k) for k in range(1, N + 1)]
    c0 = param(N, "c0")
    inv_r = inverse_factor(N, "r")
    p2 = sum_exprs([pk * pk for pk in P])
    xp = sum_exprs([xk * pk for xk, pk in zip(X, P)])
    xj, pj = X[j - 1], P[j - 1]
    if form == "first":
        return xj * p2 - xp * pj - c0 * xj * inv_r
    if form == "second":
        H0 = Fraction(1, 2) * p2 - c0 * inv_r
        return -xj * (Fraction(1, 2) * p2 + H0) + xp * pj - c0 * xj * inv_r
    raise ValueError(f"unknown Runge-Lenz form {form!r}")


def classical_bracket_C(obs, convention="paper"):
    return poisson_bracket(obs.A, obs.B, convention)


# --------------------------------------------------------------------------
# quantum


def _ops(N):
    X = [DiffOp(x(N, k)) for k in range(1, N + 1)]
    P = [DiffOp.momentum(N, k) for k in range(1, N + 1)]
    return X, P


def quantum_runge_lenz(N, j, form="first"):
    """Quantum M_j as an operator product in the displayed ordering."""
    X, P = _ops(N)
    c0 = param(N, "c0")
    hbar = param(N, "hbar")
    i_ = imag_unit(N)
    inv_r = inverse_factor(N, "r")
    coulomb = DiffOp(-c0 * x(N, j) * inv_r)
    if form == "first":
        # 1/2 sum_i (L_ji p_i - p_i L_ij)
        parts = []
        for i in range(1, N + 1):
            if i == j:
                continue
            Lji = X[j - 1] * P[i - 1] - X[i - 1] * P[j - 1]
            Lij = -Lji
            parts.append(Lji * P[i - 1] - P[i - 1] * Lij)
        acc = parts[0]
        for t in parts[1:]:
            acc = acc + t
        return acc * Fraction(1, 2) + coulomb
    if form == "second":
        p2 = _sum_ops([Pk * Pk for Pk in P], N)
        H0 = p2 * Fraction(1, 2) + DiffOp(-c0 * inv_r)
        out = -(X[j - 1] * (p2 * Fraction(1, 2) + H0))
        out = out + _sum_ops([X[i] * P[i] * P[j - 1] for i in range(N)], N)
        out = out - DiffOp(Fraction(N - 1, 2) * i_ * hbar) * P[j - 1]
        return out + coulomb
    raise ValueError(f"unknown Runge-Lenz form {form!r}")


def _sum_ops(ops, N):
    return DiffOp(sum_exprs([o.symbol for o in ops], N))


def build_quantum(params, runge_lenz="first"):
    """Quantum observables as DiffOp with p_j = -i hbar d_j.

    ``runge_lenz`` selects the Runge-Lenz form entering B; see
    :func:`quantum_runge_lenz`.  Both forms are stored in ``extras``.
    """
    N = params.N
    X, P = _ops(N)
    rr, inv_r, inv_q, inv_m, c0, c1, c2, xN = _pieces(N)
    hbar = param(N, "hbar")
    i_ = imag_unit(N)
    L = {(i, j): X[i - 1] * P[j - 1] - X[j - 1] * P[i - 1] for i, j in combinations(range(1, N + 1), 2)}
    p2 = _sum_ops([Pk * Pk for Pk in P], N)
    H = p2 * Fraction(1, 2) + DiffOp(potential(N))
    A = _sum_ops([L[k] * L[k] for k in L], N) + DiffOp(_a_potential(N))
    J2 = _sum_ops([L[(i, j)] * L[(i, j)] for i, j in L if j <= N - 1], N)
    forms = {f: quantum_runge_lenz(N, N, f) for f in RUNGE_LENZ_FORMS}
    M = forms[runge_lenz]
    B = -M + DiffOp(_b_potential(N))

    obs = ObservableSet("quantum", params, H, A, B, J2, L, M, quantum_C_printed(N))
    obs.extras["runge_lenz_forms"] = forms
    obs.extras["C_printed_xj"] = quantum_C_printed(N, first_sum="x_i x_j")
    return _bind_set(obs)


def quantum_C_printed(N, first_sum="x_i x_N"):
    """Displayed closed form of the quantum C.

    The first double sum is displayed as x_i x_N p_i p_j p_N; pass
    ``first_sum="x_i x_j"`` for the variant matching the classical form.
    """
    X, P = _ops(N)
    rr, inv_r, inv_q, inv_m, c0, c1, c2, xN = _pieces(N)
    hbar = param(N, "hbar")
    ih = imag_unit(N) * hbar
    h2 = hbar * hbar
    R = DiffOp(rr)
    terms = []
    for i in range(N):
        for j in range(N):
            second = X[N - 1] if first_sum == "x_i x_N" else X[j]
            terms.append(DiffOp(-2 * ih) * X[i] * second * P[i] * P[j] * P[N - 1])
    for i in range(N):
        terms.append(DiffOp(2 * ih * rr * rr) * P[i] * P[i] * P[N - 1])
        terms.append(DiffOp(2 * h2 * xN) * P[i] * P[i])
        terms.append(DiffOp(-2 * N * h2) * X[i] * P[i] * P[N - 1])
        terms.append(DiffOp(2 * ih * c0 * inv_r * x(N, i + 1) * xN) * P[i])
        terms.append(DiffOp(-2 * ih * c1 * inv_r * x(N, i + 1)) * P[i])
        terms.append(DiffOp(2 * ih * c2 * inv_r * x(N, i + 1)) * P[i])
    terms.append(DiffOp(Fraction((N - 1) ** 2, 2) * ih * h2) * P[N - 1])
    terms.append(DiffOp(-2 * ih * c0) * R * P[N - 1])
    terms.append(DiffOp(4 * rr * c1 * inv_q * ih) * P[N - 1])
    terms.append(DiffOp(4 * rr * c2 * inv_m * ih) * P[N - 1])
    terms.append(DiffOp((N - 1) * c0 * inv_r * h2 * xN))
    terms.append(DiffOp(-((N + 1) * rr + (N - 3) * xN) * inv_r * inv_q * c1 * h2))
    terms.append(DiffOp(((N + 1) * rr - (N - 3) * xN) * inv_r * inv_m * c2 * h2))
    return _sum_ops(terms, N)


def _bind_set(obs):
    pr = obs.params
    if not pr.bindings():
        return obs
    for name in ("H", "A", "B", "J2", "MN", "C_printed"):
        setattr(obs, name, _bind(getattr(obs, name), pr))
    obs.L = {k: _bind(v, pr) for k, v in obs.L.items()}
    for k, v in list(obs.extras.items()):
        if isinstance(v, dict):
            obs.extras[k] = {kk: _bind(vv, pr) for kk, vv in v.items()}
        else:
            obs.extras[k] = _bind(v, pr)
    return obs


# --------------------------------------------------------------------------
# Casimirs


def _scal(obs, e):
    """Lift a scalar CanonicalExpr to the observable kind."""
    return DiffOp(e) if obs.kind == "quantum" else e


def casimir_classical(obs, C=None, form="printed", convention="paper"):
    """K = C^2 + 4AB^2 - 8(c1-c2)c0 B - 8HA^2 + [16(c1+c2)H + 8 J2 (H) - 4c0^2] A.

    ``form="printed"`` multiplies 8 J^2 alone into A as displayed;
    ``form="derived"`` uses 8 J^2 H, the combination forced by centrality.
    """
    if obs.kind != "classical":
        raise ValueError("classical observables required")
    N = obs.N
    C = classical_bracket_C(obs, convention) if C is None else C
    c0, c1, c2 = (_bound_param(obs, n) for n in ("c0", "c1", "c2"))
    A, B, H, J2 = obs.A, obs.B, obs.H, obs.J2
    j_term = 8 * J2 if form == "printed" else 8 * J2 * H
    if form not in ("printed", "derived"):
        raise ValueError(f"unknown Casimir form {form!r}")
    bracket = 16 * (c1 + c2) * H + j_term - 4 * c0 * c0
    return sum_exprs(
        [C * C, 4 * A * B * B, -8 * (c1 - c2) * c0 * B, -8 * H * A * A, bracket * A], N
    )


def casimir_classical_reduced(obs):
    """Central-element value 8(c1-c2)^2 H - 8(c1+c2)c0^2 - 4c0^2 J^2."""
    c0, c1, c2 = (_bound_param(obs, n) for n in ("c0", "c1", "c2"))
    return 8 * (c1 - c2) * (c1 - c2) * obs.H - 8 * (c1 + c2) * c0 * c0 - 4 * c0 * c0 * obs.J2


def _bound_param(obs, name):
    e = param(obs.N, name)
    vals = obs.params.bindings()
    return e.bind(vals) if vals else e


def casimir_quantum(obs, C=None, form="printed", token=None):
    """Quantum Casimir with C = [A, B] computed.

    ``form="printed"`` keeps the displayed (c1+c2) H^2 inside the A
    coefficient; ``form="derived"`` has (c1+c2) H, as required for K to be
    central given the commutation relations.
    """
    if obs.kind != "quantum":
        raise ValueError("quantum observables required")
    from .symbolic.diffop import commutator

    if form not in ("printed", "derived"):
        raise ValueError(f"unknown Casimir form {form!r}")
    N = obs.N
    C = commutator(obs.A, obs.B, token) if C is None else C
    hb, c0, c1, c2 = (_bound_param(obs, n) for n in ("hbar", "c0", "c1", "c2"))
    h2 = hb * hb
    h4 = h2 * h2
    A, B, H, J2 = obs.A, obs.B, obs.H, obs.J2
    B2 = compose(B, B, token)
    HH = compose(H, H, token) if form == "printed" else H
    coeffA = (
        compose(DiffOp(-4 * h2) * J2, H, token)
        + DiffOp((N - 1) ** 2 * h4) * H
        - compose(DiffOp(8 * h2 * (c1 + c2)), HH, token)
        + DiffOp(2 * h2 * c0 * c0)
    )
    parts = [
        compose(C, C, token),
        -(DiffOp(2 * h2) * anticommutator(A, B2, token)),
        DiffOp((4 - (N - 1) * (N - 3)) * h4) * B2,
        DiffOp(8 * (c1 - c2) * h2 * c0) * B,
        compose(DiffOp(8 * h2) * H, compose(A, A, token), token),
        DiffOp(const(N, 2)) * compose(coeffA, A, token),
    ]
    return _sum_ops(parts, N)


def casimir_quantum_reduced(obs):
    """Displayed central-element value of the quantum Casimir."""
    N = obs.N
    hb, c0, c1, c2 = (_bound_param(obs, n) for n in ("hbar", "c0", "c1", "c2"))
    h2 = hb * hb
    h4 = h2 * h2
    H, J2 = obs.H, obs.J2
    k = (N - 3) * (N - 1)
    parts = [
        compose(DiffOp(2 * k * h4) * H, J2),
        DiffOp(-8 * h2 * (c1 - c2) * (c1 - c2)) * H,
        DiffOp(4 * k * (c1 + c2) * h4) * H,
        DiffOp(-(N - 3) * (N - 1) ** 2 * h4 * h2) * H,
        DiffOp(4 * h2 * c0 * c0) * J2,
        DiffOp(8 * h2 * (c1 + c2) * c0 * c0),
        DiffOp(const(N, -2 * (N - 3)) * h4 * c0 * c0),
    ]
    return _sum_ops(parts, N)
