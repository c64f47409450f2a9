"""Numerical eigensolvers against closed forms and against LAPACK."""
import warnings

import numpy as np
import pytest
from scipy.linalg import eigh_tridiagonal

from ncoulomb.observables import ModelParams
from ncoulomb.oracle import (
    PartialSpectrumWarning,
    RadialProblem,
    compare_spectrum,
    lowest_eigenvalues,
    radial_problem,
    richardson_ratio,
    solve_angular,
    solve_radial,
    sturm_count,
)
from ncoulomb.spectrum import FallToCenterError, energy_spherical, separation_constant_A


def test_sturm_count_and_multisection_match_lapack():
    rng = np.random.default_rng(0)
    d = rng.normal(size=300)
    e = rng.normal(size=299)
    ref = eigh_tridiagonal(d, e, eigvals_only=True)
    got = lowest_eigenvalues(d, e, 12)
    assert np.allclose(got, ref[:12], rtol=1e-13, atol=1e-13)
    x = np.array([ref[3] - 1e-9, ref[3] + 1e-9])
    assert list(sturm_count(d, e * e, x)) == [3, 4]


def test_hydrogen_levels():
    res = solve_radial(radial_problem(ModelParams(3, 1, 0, 0, 1), 0, 0), 2)
    assert np.allclose(res.values, [-0.5, -0.125], rtol=1e-4)
    assert np.all(res.error < 1e-4)


def test_five_dimensional_ground_state():
    res = solve_radial(radial_problem(ModelParams(5, 1, 0, 0, 1), 0, 0), 1)
    assert res.values[0] == pytest.approx(-0.125, rel=1e-4)


def test_deformed_ground_state():
    q = ModelParams(3, 1, 0.1, 0.2, 1)
    res = solve_radial(radial_problem(q, 0, 0), 1)
    assert res.values[0] == pytest.approx(energy_spherical(q, 1, 0), rel=1e-4)


@pytest.mark.parametrize("N,c", [(3, (0, 0)), (4, (0.1, 0.2)), (5, (1, 2))])
def test_second_order_convergence(N, c):
    ratio = richardson_ratio(radial_problem(ModelParams(N, 1, *c, 1), 0, 0), 3)
    assert np.all((ratio >= 3.5) & (ratio <= 4.5)), ratio


def test_box_independence():
    q = ModelParams(4, 1, 0.1, 0.2, 1)
    base = radial_problem(q, 1, 1)
    a = solve_radial(base, 3)
    wide = RadialProblem(q, base.A_eff, r_max=2 * a.grid["r_max"], M=2 * base.M)
    b = solve_radial(wide, 3)
    # same spacing, twice the box
    assert np.all(np.abs(a.values - b.values) < 1e-8)


def test_coupling_swap_symmetry():
    a = solve_radial(radial_problem(ModelParams(4, 1, 0.1, 0.7, 1), 1, 0), 3)
    b = solve_radial(radial_problem(ModelParams(4, 1, 0.7, 0.1, 1), 1, 0), 3)
    assert np.allclose(a.values, b.values, rtol=1e-12)
    x = solve_angular(ModelParams(4, 1, 0.1, 0.7, 1), 1, 3)
    y = solve_angular(ModelParams(4, 1, 0.7, 0.1, 1), 1, 3)
    assert np.allclose(x.values, y.values, rtol=1e-9)


def test_fall_to_center():
    with pytest.raises(FallToCenterError):
        RadialProblem(ModelParams(3, 1, 0, 0, 1), -0.3).nu


def test_grid_bounds():
    with pytest.raises(ValueError):
        RadialProblem(ModelParams(3, 1, 0, 0, 1), 0.0, M=100)


def test_partial_spectrum_warning():
    prob = RadialProblem(ModelParams(3, 1, 0, 0, 1), 0.0, r_max=15.0, M=1000)
    with pytest.warns(PartialSpectrumWarning):
        res = solve_radial(prob, 6)
    assert 0 < len(res.values) < 6


def test_angular_legendre():
    res = solve_angular(ModelParams(3, 1, 0, 0, 1), 0, 4)
    assert np.allclose(res.values, [0, 2, 6, 12], atol=1e-6)


def test_angular_hyperspherical_five():
    res = solve_angular(ModelParams(5, 1, 0, 0, 1), 1, 3)
    assert np.allclose(res.values, [l * (l + 3) for l in (1, 2, 3)], atol=1e-6)


@pytest.mark.parametrize("N", [3, 4, 5])
@pytest.mark.parametrize("I", [0, 1, 2])
def test_angular_matches_separation_constant(N, I):
    q = ModelParams(N, 1, 0.1, 0.2, 1)
    res = solve_angular(q, I, 3)
    ref = [separation_constant_A(q, l, I) for l in (I, I + 1, I + 2)]
    assert np.allclose(res.values, ref, rtol=1e-6, atol=1e-6)


def test_angular_then_radial_composition():
    q = ModelParams(4, 1, 0.1, 0.2, 1)
    A = solve_angular(q, 1, 2).values[1]
    res = solve_radial(RadialProblem(q, A), 2)
    # l = I + 1 = 2, so n starts at 3
    assert np.allclose(res.values, [energy_spherical(q, 3, 1), energy_spherical(q, 4, 1)], rtol=1e-4)


def test_compare_spectrum_lines():
    lines = compare_spectrum(ModelParams(3, 1, 0, 0, 1), 0, 2)
    assert [ln.n for ln in lines] == [1, 2]
    assert lines[0].E_formula == lines[0].E_parabolic == lines[0].E_algebraic == -0.5
    assert all(ln.badge < 1e-4 for ln in lines)
    q = ModelParams(4, 1, 0.1, 0.2, 1)
    lines = compare_spectrum(q, 1, 2, include_printed=True, A_source="oracle")
    assert lines[1].n == 3 and lines[1].badge < 1e-4
    assert lines[1].E_parabolic_printed == pytest.approx(2 * lines[1].E_parabolic, rel=1e-14)


def test_no_warning_leaks_from_compare():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        compare_spectrum(ModelParams(3, 1, 0, 0, 1), 0, 1)
