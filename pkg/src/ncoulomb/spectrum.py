"""Closed-form spectral quantities: delta, separation constants, energies,
structure functions and the three constraint-solution sets.

Default "reconciled" conventions: m_i = delta_i + I + (N-3)/2, eps = +1, and
the parabolic energy carries the factor 1/2 so that it agrees with the
hyperspherical one under n = n1 + n2 + I + 1.
"""
import math
from dataclasses import dataclass, field

CONVENTIONS = ("reconciled", "as-printed")

PHI_PREFACTOR = 6291456  # 3 * 2**21
PHI_SET_PREFACTOR = 786432  # 3 * 2**18


class FallToCenterError(ValueError):
    """Inverse-square coupling too attractive for a bound-state problem."""


class SpectrumDomainError(ValueError):
    pass


def _numeric(params):
    v = params.numeric()
    return params.N, v["c0"], v["c1"], v["c2"], v["hbar"]


def _check_I(I):
    if not isinstance(I, int) or I < 0:
        raise SpectrumDomainError(f"I must be a non-negative integer, got {I!r}")


def delta_pair(params, I):
    """(delta_1, delta_2) with delta = sqrt(t^2 + 4c/hbar^2) - t, t = I + (N-3)/2.

    Written as 4c'/(sqrt(t^2 + 4c') + t) to avoid cancellation for small c.
    """
    _check_I(I)
    N, c0, c1, c2, hbar = _numeric(params)
    t = I + (N - 3) / 2
    out = []
    for c in (c1, c2):
        cp = 4 * c / hbar**2
        rad = t * t + cp
        if rad < 0:
            raise FallToCenterError(f"negative radicand {rad} in delta (c={c}, I={I})")
        root = math.sqrt(rad)
        den = root + t
        out.append(cp / den if den > 0 else 0.0)
    return tuple(out)


def separation_constant_A(params, l, I):
    if not (isinstance(l, int) and l >= I >= 0):
        raise SpectrumDomainError(f"need l >= I >= 0, got l={l}, I={I}")
    d1, d2 = delta_pair(params, I)
    s = l + (d1 + d2) / 2
    return s * (s + params.N - 2)


def energy_spherical(params, n, I):
    if not isinstance(n, int) or n < 1:
        raise SpectrumDomainError(f"principal quantum number must be >= 1, got {n!r}")
    N, c0, c1, c2, hbar = _numeric(params)
    d1, d2 = delta_pair(params, I)
    return -(c0**2) / (2 * hbar**2 * (n + (d1 + d2) / 2 + (N - 3) / 2) ** 2)


def energy_parabolic(params, n1, n2, I, mode="reconciled"):
    """Energy in terms of the parabolic quantum numbers.

    ``mode="as-printed"`` omits the factor 1/2 of the hyperspherical formula.
    """
    if mode not in CONVENTIONS:
        raise ValueError(f"unknown mode {mode!r}")
    if min(n1, n2) < 0:
        raise SpectrumDomainError("n1, n2 must be >= 0")
    N, c0, c1, c2, hbar = _numeric(params)
    d1, d2 = delta_pair(params, I)
    s = n1 + n2 + (d1 + d2 + 2 * I + N - 1) / 2
    E = -(c0**2) / (hbar**2 * s * s)
    return E / 2 if mode == "reconciled" else E


def degeneracy(p):
    """Number of (n1, n2) >= 0 with n1 + n2 = p."""
    return sum(1 for n1 in range(p + 1) for n2 in range(p + 1) if n1 + n2 == p)


def m_pair(params, I, convention="reconciled"):
    """m_1, m_2.

    Reconciled: m_i = delta_i + I + (N-3)/2.  As-printed returns both displayed
    variants: ``{"from_square": ..., "explicit": ...}`` where the first solves
    hbar^2 m^2 = 16 c + (4 I (I+N-3) + (N-3)^2) hbar^2 with m > 0 and the
    second is m = (3 - 2I - N - 2 delta)/2.
    """
    N, c0, c1, c2, hbar = _numeric(params)
    d = delta_pair(params, I)
    if convention == "reconciled":
        return tuple(di + I + (N - 3) / 2 for di in d)
    if convention == "as-printed":
        sq = tuple(math.sqrt(16 * c / hbar**2 + 4 * I * (I + N - 3) + (N - 3) ** 2) for c in (c1, c2))
        explicit = tuple((3 - 2 * I - N - 2 * di) / 2 for di in d)
        return {"from_square": sq, "explicit": explicit}
    raise ValueError(f"unknown convention {convention!r}")


def kappa(params, E):
    """c0 / (hbar sqrt(-2E)), the E-dependent root offset of the structure function."""
    N, c0, c1, c2, hbar = _numeric(params)
    if E >= 0:
        raise SpectrumDomainError("structure function needs E < 0")
    return c0 / (hbar * math.sqrt(-2 * E))


def phi_roots(params, I, E, m=None):
    m1, m2 = m_pair(params, I) if m is None else m
    k = kappa(params, E)
    return (
        (1 - m1 - m2) / 2,
        (1 - m1 + m2) / 2,
        (1 + m1 - m2) / 2,
        (1 + m1 + m2) / 2,
        0.5 - k,
        0.5 + k,
    )


def phi(x, u, E, params, I, form="factorized", m=None):
    """Structure function of the deformed-oscillator realization.

    ``factorized``: 6291456 E hbar^18 prod_k (x + u - root_k).
    ``expanded``: the long polynomial form in (x+u), H -> E and
    J^2 -> hbar^2 I (I + N - 3), evaluated term by term as displayed.
    """
    N, c0, c1, c2, h = _numeric(params)
    if E >= 0:
        raise SpectrumDomainError("structure function needs E < 0")
    if form == "factorized":
        y = x + u
        out = PHI_PREFACTOR * E * h**18
        for root in phi_roots(params, I, E, m):
            out *= y - root
        return out
    if form == "expanded":
        return _phi_expanded(x + u, E, N, c0, c1, c2, h, I)
    raise ValueError(f"unknown form {form!r}")


def _phi_expanded(y, H, N, c0, c1, c2, h, I):
    J2 = h**2 * I * (I + N - 3)
    w = -1 + 2 * y
    k = (N - 3) * (N - 1)
    g = 2 * c0**2 * h**2 - 8 * (c1 + c2) * h**2 * H - 4 * h**2 * H * J2 + h**4 * H * (N - 1) ** 2
    t1 = 3145728 * c0**2 * (c1 - c2) ** 2 * h**12
    t2 = (
        -196608
        * h**12
        * (
            8 * c0**2 * (c1 + c2) * h**2
            - 8 * (c1 - c2) ** 2 * h**2 * H
            + 4 * c0**2 * h**2 * J2
            - 2 * c0**2 * h**4 * (N - 3)
            + 4 * (c1 + c2) * h**4 * H * k
            + 2 * h**4 * H * J2 * k
            - h**6 * H * (N - 3) * (N - 1) ** 2
        )
        * w**2
    )
    t3 = (
        -1024
        * h**4
        * (-128 * h**10 * g + 256 * h**14 * H * k + 96 * h**10 * g * k - 96 * h**14 * H * k**2)
        * w**2
    )
    t4 = 98304 * h**18 * H * (-3 + 2 * y) * w**4 * (1 + 2 * y)
    t5 = 512 * h**8 * (64 * h**6 * g - 128 * h**10 * H * k) * w**2 * (-1 - 12 * y + 12 * y * y)
    return t1 + t2 + t3 + t4 + t5


def phi_scale(x, u, E, params, I, m=None):
    """Magnitude scale for relative zero tests of the factorized form.

    Each linear factor contributes max(|x+u|, |root|, 1); x, u and the roots
    are dimensionless, so 1 is the natural floor.
    """
    N, c0, c1, c2, h = _numeric(params)
    y = x + u
    out = PHI_PREFACTOR * abs(E) * h**18
    for root in phi_roots(params, I, E, m):
        out *= max(abs(y), abs(root), 1.0)
    return out


def phi_set_printed(set_id, x, p, eps, m, params):
    """The per-set closed forms of Phi(x) as displayed, for comparison only."""
    N, c0, c1, c2, h = _numeric(params)
    e1, e2 = eps
    m1, m2 = m
    D = 2 + 2 * p + e1 * m1 + e2 * m2
    pre = PHI_SET_PREFACTOR * c0**2 * h**16 / D**2
    if set_id == 1:
        f = (
            x
            * (2 + 2 * p + x + e1 * m1 + e2 * m2)
            * (2 + 2 * p - 2 * x + (1 + e1) * m1 + (1 + e2) * m2)
            * (2 * x - 2 - 2 * p + (1 - e1) * m1 - (1 + e2) * m2)
            * (2 * x - 2 * p - 2 + (1 - e1) * m1 + (1 - e2) * m2)
            * (2 * x - 2 * p - 2 - (1 + e1) * m1 + (1 - e2) * m2)
        )
    elif set_id == 2:
        f = (
            x
            * (2 + 2 * p - x + e1 * m1 + e2 * m2)
            * (2 + 2 * p + 2 * x + (1 + e1) * m1 + (1 + e2) * m2)
            * (2 + 2 * p + 2 * x - (1 - e1) * m1 - (1 - e2) * m2)
            * (2 + 2 * p + 2 * x + (1 + e1) * m1 - (1 - e2) * m2)
            * (2 + 2 * p + 2 * x - (1 - e1) * m1 + (1 + e2) * m2)
        )
    elif set_id == 3:
        f = (
            (1 + p - x)
            * (2 + 2 * p + (1 + e1) * m1 - (1 - e2) * m2)
            * (2 + 2 * p + (1 + e1) * m1 + (1 + e2) * m2)
            * (2 + 2 * p - (1 - e1) * m1 + (1 + e2) * m2)
            * (2 * x - (1 - e1) * m1 - (1 - e2) * m2)
            * (1 + p + x + e1 * m1 + e2 * m2)
        )
    else:
        raise ValueError("set id must be 1, 2 or 3")
    return pre * f


@dataclass
class AlgebraicSolution:
    set_id: int
    eps: tuple
    p: int
    u: float
    E: float
    m1: float
    m2: float
    convention: str
    branch: str = "positive"
    phi0: float = math.nan
    phi_end: float = math.nan
    interior: list = field(default_factory=list)
    unitary: bool = False
    warnings: list = field(default_factory=list)

    @property
    def constraints_ok(self):
        return abs(self.phi0) <= 1e-12 and abs(self.phi_end) <= 1e-12


def solve_constraint_set(params, I, p, eps=(1, 1), set_id=1, convention="reconciled"):
    """(u, E) from Phi(0) = Phi(p+1) = 0 for one of the three solution sets.

    Every set gives E = -2 c0^2 / (hbar^2 D^2), D = 2 + 2p + e1 m1 + e2 m2.
    In the reconciled convention Set-1's u = 1/2 + c0/(hbar sqrt(-2E)) is taken
    on the branch where the square root equals -D/2 (the positive root
    cannot satisfy Phi(p+1) = 0), which makes it coincide with Set-2.
    ``phi0``/``phi_end`` are stored relative to :func:`phi_scale`.
    """
    if not isinstance(p, int) or p < 0:
        raise SpectrumDomainError("p must be a non-negative integer")
    if set_id not in (1, 2, 3):
        raise ValueError("set id must be 1, 2 or 3")
    N, c0, c1, c2, h = _numeric(params)
    if convention == "reconciled":
        m1, m2 = m_pair(params, I)
    elif convention == "as-printed":
        m1, m2 = m_pair(params, I, "as-printed")["explicit"]
    else:
        raise ValueError(f"unknown convention {convention!r}")
    e1, e2 = eps
    D = 2 + 2 * p + e1 * m1 + e2 * m2
    if D == 0:
        raise SpectrumDomainError("degenerate constraint solution (D = 0)")
    E = -2 * c0**2 / (h**2 * D**2)
    k = kappa(params, E)
    branch = "positive"
    if set_id == 1:
        if convention == "reconciled":
            u = 0.5 - D / 2
            branch = "negative"
        else:
            u = 0.5 + k
    elif set_id == 2:
        u = 0.5 - k
    else:
        u = (1 + e1 * m1 + e2 * m2) / 2
    sol = AlgebraicSolution(set_id, (e1, e2), p, u, E, m1, m2, convention, branch)
    m = (m1, m2)
    sol.phi0 = phi(0, u, E, params, I, m=m) / phi_scale(0, u, E, params, I, m=m)
    sol.phi_end = phi(p + 1, u, E, params, I, m=m) / phi_scale(p + 1, u, E, params, I, m=m)
    sol.interior = [phi(x, u, E, params, I, m=m) for x in range(1, p + 1)]
    sol.unitary = all(v > 0 for v in sol.interior)
    if not sol.unitary:
        sol.warnings.append("non-unitary: Phi(x) <= 0 for some integer x in [1, p]")
    if not sol.constraints_ok:
        sol.warnings.append("constraints Phi(0) = Phi(p+1) = 0 not satisfied")
    return sol


def all_sign_solutions(params, I, p, set_id=1, convention="reconciled"):
    """Solutions for the four (eps1, eps2) sign choices."""
    out = []
    for eps in ((1, 1), (1, -1), (-1, 1), (-1, -1)):
        try:
            out.append(solve_constraint_set(params, I, p, eps, set_id, convention))
        except SpectrumDomainError:
            continue
    return out


def representation_check(sol, params, I):
    """Finite-dimensional unitary representation report for one solution."""
    return {
        "set": sol.set_id,
        "eps": list(sol.eps),
        "p": sol.p,
        "phi0_rel": sol.phi0,
        "phi_end_rel": sol.phi_end,
        "constraints_ok": sol.constraints_ok,
        "interior_positive": sol.unitary,
        "min_interior": min(sol.interior) if sol.interior else None,
        "dimension": sol.p + 1,
        "degeneracy": degeneracy(sol.p),
        "E": sol.E,
        "E_spherical": energy_spherical(params, sol.p + I + 1, I),
    }


@dataclass
class SpectrumLine:
    """One level with the independently computed energies."""

    n: int
    I: int
    E_formula: float
    E_parabolic: float
    E_algebraic: float
    E_numeric: float
    E_parabolic_printed: float = None
    numeric_error: float = None

    @property
    def deviations(self):
        vals = {
            "formula": self.E_formula,
            "parabolic": self.E_parabolic,
            "algebraic": self.E_algebraic,
            "numeric": self.E_numeric,
        }
        keys = list(vals)
        out = {}
        for i, a in enumerate(keys):
            for b in keys[i + 1 :]:
                out[f"{a}-{b}"] = abs(vals[a] - vals[b]) / max(abs(vals[a]), abs(vals[b]))
        return out

    @property
    def badge(self):
        return max(self.deviations.values())
