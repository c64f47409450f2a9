"""Exact checks of conservation, the quadratic algebra, so(N-1) and the Casimir."""
import time
from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path

import sympy as sp

from .observables import (
    casimir_classical,
    casimir_classical_reduced,
    casimir_quantum,
    casimir_quantum_reduced,
)
from .symbolic.diffop import DiffOp, anticommutator, commutator, compose
from .symbolic.expr import const, param, poisson_bracket, sum_exprs
from .symbolic.fit import fit_linear_combination

CONVENTIONS = ("paper", "standard")


@dataclass
class VerificationReport:
    """Outcome of one identity check.

    ``verdict`` is "pass", "residual" or "fitted"; ``data`` holds the residual
    size, dump file name or fitted coefficients.  ``wall_time`` is kept out
    of serialized reports so that they are deterministic.
    """

    id: str
    kind: str
    N: int
    verdict: str
    data: dict = field(default_factory=dict)
    wall_time: float = 0.0

    @property
    def passed(self):
        return self.verdict in ("pass", "fitted")

    def as_dict(self):
        return {"id": self.id, "kind": self.kind, "N": self.N, "verdict": self.verdict, "data": self.data}


class Checker:
    """Bracket, product and dump helpers shared by all checks for one ObservableSet."""

    def __init__(self, obs, convention="paper", dump_dir=None, token=None):
        if convention not in CONVENTIONS:
            raise ValueError(f"unknown bracket convention {convention!r}")
        self.obs = obs
        self.kind = obs.kind
        self.N = obs.N
        self.convention = convention
        self.dump_dir = Path(dump_dir) if dump_dir is not None else None
        self.token = token
        self._C = {}

    @property
    def quantum(self):
        return self.kind == "quantum"

    def bracket(self, f, g, convention=None):
        if self.quantum:
            return commutator(f, g, self.token)
        return poisson_bracket(f, g, convention or self.convention)

    def mul(self, f, g):
        return compose(f, g, self.token) if self.quantum else f * g

    def scalar(self, e):
        vals = self.obs.params.bindings()
        if vals:
            e = e.bind(vals)
        return DiffOp(e) if self.quantum else e

    def par(self, name):
        e = param(self.N, name)
        vals = self.obs.params.bindings()
        return e.bind(vals) if vals else e

    def C(self, convention=None):
        conv = "quantum" if self.quantum else (convention or self.convention)
        if conv not in self._C:
            self._C[conv] = self.bracket(self.obs.A, self.obs.B, convention)
        return self._C[conv]

    def zero_report(self, ident, diff, t0, **data):
        sym = diff.symbol if isinstance(diff, DiffOp) else diff
        out = dict(data)
        if sym.is_zero():
            verdict = "pass"
        else:
            verdict = "residual"
            out["terms"] = sym.size()
            out["dump"] = self.write_dump(ident, sym)
        return VerificationReport(ident, self.kind, self.N, verdict, out, time.monotonic() - t0)

    def write_dump(self, ident, sym):
        name = f"{self.kind}-N{self.N}-{ident}.txt".replace("/", "_")
        if self.dump_dir is not None:
            self.dump_dir.mkdir(parents=True, exist_ok=True)
            (self.dump_dir / name).write_text(sym.dump())
        return name


def _checker(obs, convention="paper", dump_dir=None, token=None):
    if isinstance(obs, Checker):
        return obs
    return Checker(obs, convention, dump_dir, token)


def _sub_so_pairs(N):
    return [(i, j) for i, j in combinations(range(1, N), 2)]


def check_conservation(obs, convention="paper", dump_dir=None, token=None):
    ck = _checker(obs, convention, dump_dir, token)
    o = ck.obs
    reports = []
    named = [("H", o.H), ("A", o.A), ("B", o.B)]
    for (n1, f), (n2, g) in (
        (named[0], named[1]),
        (named[0], named[2]),
    ):
        t0 = time.monotonic()
        reports.append(ck.zero_report(f"conservation.{n1}{n2}", ck.bracket(f, g), t0))
    for n1, f in named:
        t0 = time.monotonic()
        reports.append(ck.zero_report(f"conservation.{n1}J2", ck.bracket(f, o.J2), t0))
    for n1, f in named:
        t0 = time.monotonic()
        nonzero = []
        worst = None
        for i, j in _sub_so_pairs(ck.N):
            d = ck.bracket(f, o.L[(i, j)])
            sym = d.symbol if isinstance(d, DiffOp) else d
            if not sym.is_zero():
                nonzero.append(f"L{i}{j}")
                worst = d
        data = {"pairs": len(_sub_so_pairs(ck.N))}
        if nonzero:
            data["failing"] = nonzero
        reports.append(ck.zero_report(f"conservation.{n1}L", worst if worst is not None else ck.scalar(const(ck.N, 0)), t0, **data))
    return reports


def so_expected(obs, i, j, k, l):
    """delta pattern d_ik L_jl + d_jl L_ik - d_il L_jk - d_jk L_il (times i hbar when quantum)."""
    L = obs.L

    def Lget(a, b):
        if a == b:
            return None
        return L[(a, b)] if a < b else -L[(b, a)]

    terms = []
    for cond, a, b, sign in ((i == k, j, l, 1), (j == l, i, k, 1), (i == l, j, k, -1), (j == k, i, l, -1)):
        if cond:
            t = Lget(a, b)
            if t is not None:
                terms.append(t if sign > 0 else -t)
    N = obs.N
    if obs.kind == "quantum":
        syms = [t.symbol for t in terms]
        s = sum_exprs(syms, N)
        ih = param(N, "hbar")
        vals = obs.params.bindings()
        if vals:
            ih = ih.bind(vals)
        from .symbolic.expr import imag_unit

        return DiffOp(s * (imag_unit(N) * ih))
    return sum_exprs(terms, N)


def check_so_relations(obs, convention="paper", dump_dir=None, token=None):
    """All brackets among L_ij (i, j <= N-1) against the delta pattern."""
    ck = _checker(obs, convention, dump_dir, token)
    t0 = time.monotonic()
    pairs = _sub_so_pairs(ck.N)
    failing = []
    last = None
    for a, b in combinations(pairs, 2):
        lhs = ck.bracket(ck.obs.L[a], ck.obs.L[b])
        d = lhs - so_expected(ck.obs, *a, *b)
        sym = d.symbol if isinstance(d, DiffOp) else d
        if not sym.is_zero():
            failing.append(f"L{a[0]}{a[1]},L{b[0]}{b[1]}")
            last = d
    data = {"relations": len(pairs) * (len(pairs) - 1) // 2}
    if not ck.quantum:
        data["convention"] = ck.convention
    if failing:
        data["failing"] = failing[:10]
        data["failing_count"] = len(failing)
    ident = f"{ck.kind}.so"
    return ck.zero_report(ident, last if last is not None else ck.scalar(const(ck.N, 0)), t0, **data)


def _printed_rhs(ck):
    """Displayed right-hand sides of the {A,C} and {B,C} relations."""
    o = ck.obs
    N = ck.N
    c0, c1, c2 = ck.par("c0"), ck.par("c1"), ck.par("c2")
    A, B, H, J2 = o.A, o.B, o.H, o.J2
    S = ck.scalar
    if not ck.quantum:
        ac = -4 * A * B + 4 * (c1 - c2) * c0
        bc = 2 * B * B - 8 * H * A + 4 * J2 * H + 8 * (c1 + c2) * H - 2 * c0 * c0
        return ac, bc
    h2 = ck.par("hbar") ** 2
    ac = (
        S(2 * h2) * anticommutator(A, B, ck.token)
        + S((N - 1) * (N - 3) * h2 * h2) * B
        + S(-4 * (c1 - c2) * h2 * c0)
    )
    bc = (
        S(-2 * h2) * compose(B, B, ck.token)
        + S(8 * h2) * compose(H, A, ck.token)
        + S(-4 * h2) * compose(J2, H, ck.token)
        + S((N - 1) ** 2 * h2 * h2) * H
        + S(-8 * h2 * (c1 + c2)) * H
        + S(2 * h2 * c0 * c0)
    )
    return ac, bc


RELATION_IDS = {
    "classical": ("kf1", "kf2", "kf3", "kf4"),
    "quantum": ("prova5", "prova6", "prova1", "prova4"),
}


def check_quadratic_relations(obs, convention="paper", dump_dir=None, token=None):
    ck = _checker(obs, convention, dump_dir, token)
    o = ck.obs
    ids = RELATION_IDS[ck.kind]
    reports = []
    t0 = time.monotonic()
    C = ck.C()
    data = {}
    if not ck.quantum:
        other = "standard" if ck.convention == "paper" else "paper"
        data["convention"] = ck.convention
        data[f"C_minus_printed_zero[{other}]"] = (ck.C(other) - o.C_printed).is_zero()
        data["C_plus_printed_zero"] = (C + o.C_printed).is_zero()
    reports.append(ck.zero_report(f"{ck.kind}.{ids[0]}", C - o.C_printed, t0, **data))
    if ck.quantum:
        t0 = time.monotonic()
        reports.append(
            ck.zero_report(f"{ck.kind}.{ids[0]}.xj", C - o.extras["C_printed_xj"], t0, variant="first sum x_i x_j")
        )
    ac, bc = _printed_rhs(ck)
    t0 = time.monotonic()
    reports.append(ck.zero_report(f"{ck.kind}.{ids[1]}", ck.bracket(o.A, C) - ac, t0))
    t0 = time.monotonic()
    reports.append(ck.zero_report(f"{ck.kind}.{ids[2]}", ck.bracket(o.B, C) - bc, t0))
    return reports


def _sympy_params():
    return sp.symbols("hbar c0 c1 c2")


def expected_structure_constants(kind, N, target):
    """Displayed structure constants, as sympy expressions, keyed like the fit basis."""
    hbar, c0, c1, c2 = _sympy_params()
    z = sp.Integer(0)
    if kind == "classical":
        if target == "AC":
            return {"AB": sp.Integer(-4), "A": z, "B": z, "1": 4 * (c1 - c2) * c0}
        return {"B2": sp.Integer(2), "HA": sp.Integer(-8), "J2H": sp.Integer(4), "H": 8 * (c1 + c2), "A": z, "B": z, "1": -2 * c0**2}
    h2 = hbar**2
    if target == "AC":
        return {"{A,B}": 2 * h2, "A": z, "B": (N - 1) * (N - 3) * h2**2, "1": -4 * (c1 - c2) * h2 * c0}
    return {
        "B2": -2 * h2,
        "HA": 8 * h2,
        "J2H": -4 * h2,
        "H": (N - 1) ** 2 * h2**2 - 8 * h2 * (c1 + c2),
        "A": z,
        "B": z,
        "1": 2 * h2 * c0**2,
    }


def fit_basis(ck, target):
    o = ck.obs
    one = ck.scalar(const(ck.N, 1))
    if target == "AC":
        ab = anticommutator(o.A, o.B, ck.token) if ck.quantum else o.A * o.B
        return [("{A,B}" if ck.quantum else "AB", ab), ("A", o.A), ("B", o.B), ("1", one)]
    if target == "BC":
        return [
            ("B2", ck.mul(o.B, o.B)),
            ("HA", ck.mul(o.H, o.A)),
            ("J2H", ck.mul(o.J2, o.H)),
            ("H", o.H),
            ("A", o.A),
            ("B", o.B),
            ("1", one),
        ]
    raise ValueError("target must be 'AC' or 'BC'")


def fit_structure_constants(obs, target, basis=None, convention="paper", dump_dir=None, token=None, seed=0):
    """Fit {A,C} or {B,C} (commutators when quantum) over an ansatz basis."""
    ck = _checker(obs, convention, dump_dir, token)
    t0 = time.monotonic()
    basis = fit_basis(ck, target) if basis is None else basis
    lhs = ck.bracket(ck.obs.A if target == "AC" else ck.obs.B, ck.C())
    res = fit_linear_combination(lhs, basis, seed=seed)
    ident = f"fit.{target}"
    data = {"basis": [n for n, _ in basis]}
    if not ck.quantum:
        data["convention"] = ck.convention
    if not res.success:
        sym = res.residual
        data["terms"] = sym.size()
        data["dump"] = ck.write_dump(ident, sym)
        return VerificationReport(ident, ck.kind, ck.N, "residual", data, time.monotonic() - t0)
    expected = expected_structure_constants(ck.kind, ck.N, target)
    vals = ck.obs.params.bindings()
    subs = {s: sp.Rational(vals[str(s)].numerator, vals[str(s)].denominator) for s in _sympy_params() if str(s) in vals}
    mismatch = []
    for name, v in res.coefficients.items():
        if name in expected and sp.expand(v - expected[name].subs(subs)) != 0:
            mismatch.append(name)
    data["coefficients"] = {k: str(v) for k, v in res.coefficients.items()}
    # target minus the fitted combination, recomputed in the engine
    data["validation_residual_zero"] = res.residual is not None and res.residual.is_zero()
    data["printed"] = {k: str(v.subs(subs)) for k, v in expected.items()}
    data["matches_printed"] = not mismatch
    if mismatch:
        data["mismatch"] = mismatch
    if res.free_parameters:
        data["free"] = res.free_parameters
    return VerificationReport(ident, ck.kind, ck.N, "fitted", data, time.monotonic() - t0)


def check_casimir(obs, form="printed", convention="paper", dump_dir=None, token=None):
    """Centrality of K and its reduction to H and J^2.

    ``form="printed"`` uses the displayed Casimir; ``"derived"`` the corrected
    one (see :func:`casimir_classical` / :func:`casimir_quantum`).
    """
    ck = _checker(obs, convention, dump_dir, token)
    o = ck.obs
    base = RELATION_IDS[ck.kind][3] + ("" if form == "printed" else "-derived")
    t0 = time.monotonic()
    if ck.quantum:
        K = casimir_quantum(o, ck.C(), form, token=ck.token)
        reduced = casimir_quantum_reduced(o)
        red_id = "prova3" + ("" if form == "printed" else "-derived")
    else:
        K = casimir_classical(o, ck.C(), form, convention=ck.convention)
        reduced = casimir_classical_reduced(o)
        red_id = base + ".reduction"
    build = time.monotonic() - t0
    reports = []
    t0 = time.monotonic()
    reports.append(ck.zero_report(f"{ck.kind}.{base}.KA", ck.bracket(K, o.A), t0))
    t0 = time.monotonic()
    reports.append(ck.zero_report(f"{ck.kind}.{base}.KB", ck.bracket(K, o.B), t0))
    t0 = time.monotonic()
    reports.append(ck.zero_report(f"{ck.kind}.{red_id}", K - reduced, t0))
    reports[0].wall_time += build
    return reports


def run_suite(obs, convention="paper", dump_dir=None, token=None, casimir_forms=("printed", "derived"), fits=True, seed=0):
    """Every check for one ObservableSet, in a fixed order."""
    ck = _checker(obs, convention, dump_dir, token)
    reports = []
    reports += check_conservation(ck)
    reports.append(check_so_relations(ck))
    reports += check_quadratic_relations(ck)
    if fits:
        for target in ("AC", "BC"):
            reports.append(fit_structure_constants(ck, target, seed=seed))
    for form in casimir_forms:
        reports += check_casimir(ck, form)
    return reports
