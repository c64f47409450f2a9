"""Closed-form spectrum: separation constants, energies, Phi and the three sets."""
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ncoulomb.observables import ModelParams
from ncoulomb.spectrum import (
    FallToCenterError,
    SpectrumDomainError,
    all_sign_solutions,
    degeneracy,
    delta_pair,
    energy_parabolic,
    energy_spherical,
    m_pair,
    phi,
    phi_roots,
    phi_set_printed,
    representation_check,
    separation_constant_A,
    solve_constraint_set,
)


def P(N=3, c1=0.0, c2=0.0, c0=1.0, hbar=1.0):
    return ModelParams(N, c0, c1, c2, hbar)


def test_delta_central_limit_and_small_coupling():
    assert delta_pair(P(), 0) == (0.0, 0.0)
    d1, _ = delta_pair(P(c1=1e-14), 0)
    # sqrt(4c) for t = 0, no cancellation
    assert d1 == pytest.approx(2e-7, rel=1e-12)
    d1, _ = delta_pair(P(N=4, c1=1e-14), 1)
    # t = 3/2, delta ~ 4c/(2t)
    assert d1 == pytest.approx(4e-14 / 3, rel=1e-10)


def test_fall_to_center():
    with pytest.raises(FallToCenterError):
        delta_pair(P(c1=-0.5), 0)


@pytest.mark.parametrize(
    "params,l,I,expected",
    [
        (P(), 1, 0, 2.0),
        (P(N=5), 2, 0, 10.0),
        (P(c1=0.1, c2=0.1), 0, 0, 2 * math.sqrt(0.1) * (2 * math.sqrt(0.1) + 1)),
    ],
)
def test_separation_constant(params, l, I, expected):
    assert separation_constant_A(params, l, I) == pytest.approx(expected, rel=1e-14)


def test_separation_constant_domain():
    with pytest.raises(SpectrumDomainError):
        separation_constant_A(P(), 0, 1)


def test_hydrogen_energies():
    assert energy_spherical(P(), 1, 0) == -0.5
    assert energy_spherical(P(), 2, 0) == -0.125
    assert energy_spherical(P(N=5), 1, 0) == -0.125
    with pytest.raises(SpectrumDomainError):
        energy_spherical(P(), 0, 0)


def test_parabolic_modes():
    assert energy_parabolic(P(), 0, 0, 0) == -0.5
    assert energy_parabolic(P(), 0, 0, 0, mode="as-printed") == -1.0
    q = P(N=4, c1=0.1, c2=0.2)
    assert energy_parabolic(q, 1, 0, 1) == energy_spherical(q, 3, 1)


@settings(max_examples=60, deadline=None)
@given(
    st.integers(3, 6),
    st.floats(0, 3),
    st.floats(0, 3),
    st.integers(0, 3),
    st.integers(0, 6),
)
def test_parabolic_constant_on_shell(N, c1, c2, I, p):
    q = P(N, c1, c2)
    vals = {energy_parabolic(q, n1, p - n1, I) for n1 in range(p + 1)}
    assert len(vals) == 1
    assert vals.pop() == pytest.approx(energy_spherical(q, p + I + 1, I), rel=1e-14)
    assert degeneracy(p) == p + 1


@settings(max_examples=40, deadline=None)
@given(st.integers(3, 6), st.floats(0, 2), st.floats(0, 2), st.integers(0, 3))
def test_monotonicity(N, c1, c2, I):
    a, b = delta_pair(P(N, c1, c2), I), delta_pair(P(N, c1 + 0.01, c2), I)
    assert b[0] > a[0]
    E = [energy_spherical(P(N, c1, c2), n, I) for n in range(1, 8)]
    assert all(x < y < 0 for x, y in zip(E, E[1:]))


def test_m_pair_examples():
    assert m_pair(P(), 0)[0] == 0
    assert m_pair(P(c1=0.1), 0)[0] == pytest.approx(2 * math.sqrt(0.1), rel=1e-14)
    assert m_pair(P(N=5), 1)[0] == 2


def test_printed_m_formulas_disagree():
    q = P(N=4, c1=0.3, c2=0.7)
    printed = m_pair(q, 1, "as-printed")
    rec = m_pair(q, 1)
    for k in range(2):
        assert printed["from_square"][k] == pytest.approx(2 * rec[k], rel=1e-12)
        assert printed["explicit"][k] == pytest.approx(-rec[k], rel=1e-12)


def test_phi_zero_at_roots():
    q = P(c1=0.1, c2=0.2)
    E = energy_spherical(q, 2, 0)
    m1, m2 = m_pair(q, 0)
    u = 0.3
    assert phi(-u + (1 - m1 - m2) / 2, u, E, q, 0) == 0
    for root in phi_roots(q, 0, E):
        assert abs(phi(root - u, u, E, q, 0)) < 1e-12


def test_phi_is_degree_six():
    q = P(N=4, c1=0.1, c2=0.2)
    E = energy_spherical(q, 3, 1)
    xs = np.arange(7.0) - 3
    ys = [phi(x, 0.25, E, q, 1) for x in xs]
    coef = np.polyfit(xs, ys, 6)
    assert coef[0] == pytest.approx(6291456 * E, rel=1e-9)
    for x in (0.5, 4.2):
        assert np.polyval(coef, x) == pytest.approx(phi(x, 0.25, E, q, 1), rel=1e-8)


def test_phi_requires_bound_energy():
    with pytest.raises(SpectrumDomainError):
        phi(0, 0, 0.1, P(), 0)


def test_set_one_hydrogen_ground_state():
    sol = solve_constraint_set(P(), 0, 0)
    assert sol.E == -0.5
    assert sol.constraints_ok and sol.unitary


def test_set_one_reconciliation():
    q = P(c1=0.1, c2=0.2)
    sol = solve_constraint_set(q, 0, 2)
    assert sol.E == pytest.approx(energy_spherical(q, 3, 0), rel=1e-12)


def test_set_one_positive_root_fails():
    q = P(c1=0.1, c2=0.2)
    sol = solve_constraint_set(q, 0, 2, convention="as-printed")
    assert abs(sol.phi0) <= 1e-12
    assert abs(sol.phi_end) > 1e-6
    assert not sol.constraints_ok


def test_set_three_root():
    q = P(N=4, c1=0.1, c2=0.2)
    sol = solve_constraint_set(q, 1, 3, set_id=3)
    assert abs(sol.phi0) <= 1e-12


GRID = [
    (N, c, I, p)
    for N in (3, 4, 5)
    for c in ((0, 0), (0.1, 0.2), (1, 2))
    for I in (0, 1, 2)
    for p in range(6)
]


@pytest.mark.parametrize("set_id", [1, 2, 3])
def test_reconciliation_grid(set_id):
    for N, (c1, c2), I, p in GRID:
        q = P(N, c1, c2)
        sol = solve_constraint_set(q, I, p, set_id=set_id)
        E = energy_spherical(q, p + I + 1, I)
        assert abs(sol.E - E) <= 1e-12 * abs(E), (N, c1, c2, I, p)
        assert sol.constraints_ok, (N, c1, c2, I, p, sol.phi0, sol.phi_end)
        assert sol.unitary, (N, c1, c2, I, p)


def test_representation_report():
    q = P(c1=0.1, c2=0.2)
    rep = representation_check(solve_constraint_set(q, 0, 3), q, 0)
    assert rep["interior_positive"] and rep["dimension"] == 4
    rep0 = representation_check(solve_constraint_set(q, 0, 0), q, 0)
    assert rep0["min_interior"] is None and rep0["constraints_ok"]
    assert degeneracy(2) == 3


def test_sign_enumeration_flags_non_unitary():
    q = P(c1=1, c2=2)
    sols = all_sign_solutions(q, 0, 3)
    assert len(sols) == 4
    assert any(s.unitary for s in sols)
    bad = [s for s in sols if not s.unitary]
    assert all(s.warnings for s in bad)


def test_printed_set_forms_disagree_with_factorized():
    q = P(c1=0.1, c2=0.2)
    sol = solve_constraint_set(q, 0, 2)
    m = (sol.m1, sol.m2)
    ref = phi(1, sol.u, sol.E, q, 0, m=m)
    printed = phi_set_printed(1, 1, 2, (1, 1), m, q)
    assert abs(printed - ref) > 0.1 * abs(ref)
