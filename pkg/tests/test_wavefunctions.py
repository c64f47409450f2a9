"""Special-function kernels and the separated eigenfunctions."""
import math
import random
from fractions import Fraction

import mpmath
import numpy as np
import pytest
import sympy as sp
from scipy.special import eval_jacobi, hyp1f1

from ncoulomb.observables import ModelParams
from ncoulomb.special import SeriesDomainError, hyp1F1, jacobi_P
from ncoulomb.spectrum import delta_pair
from ncoulomb.wavefunctions import (
    QuantumNumberError,
    build_angular,
    build_parabolic,
    build_radial,
    norm_audit,
    norm_check,
    radial_overlap,
)

mpmath.mp.dps = 40


def _rodrigues(n, alpha, beta, x):
    """P_n^(a,b)(x) by differentiating (1-x)^(a+n)(1+x)^(b+n) n times, exactly."""
    X = sp.Symbol("X")
    a, b = sp.Rational(alpha), sp.Rational(beta)
    g = sp.diff((1 - X) ** (a + n) * (1 + X) ** (b + n), X, n)
    val = (-1) ** n / (2**n * sp.factorial(n)) * (1 - X) ** (-a) * (1 + X) ** (-b) * g
    return float(val.subs(X, sp.Rational(x)).evalf(30))


def _series_1F1(a, b, z):
    """Exact rational partial sums of the Kummer series for integer a <= 0."""
    term, total = Fraction(1), Fraction(1)
    for k in range(-a):
        term = term * (a + k) / (b + k) * z / (k + 1)
        total += term
    return float(total)


# --------------------------------------------------------------------------
# kernels


def test_jacobi_seeds_and_legendre():
    assert jacobi_P(0, 0.3, 1.7, 0.2) == 1.0
    al, be, x = 0.3, 1.7, 0.2
    assert jacobi_P(1, al, be, x) == pytest.approx(((al + be + 2) * x + (al - be)) / 2, rel=1e-15)
    assert jacobi_P(2, 0, 0, 0.5) == pytest.approx(-0.125, abs=1e-15)


@pytest.mark.parametrize("seed", range(12))
def test_jacobi_matches_rodrigues(seed):
    rng = random.Random(seed)
    n = rng.randint(0, 10)
    alpha = Fraction(rng.randint(-4, 20), 4)
    beta = Fraction(rng.randint(-4, 20), 4)
    x = Fraction(rng.randint(-99, 99), 100)
    ref = _rodrigues(n, alpha, beta, x)
    got = jacobi_P(n, float(alpha), float(beta), float(x))
    assert abs(got - ref) <= 1e-12 * max(1.0, abs(ref))


def test_jacobi_matches_hypergeometric_representation():
    rng = random.Random(7)
    for _ in range(200):
        n = rng.randint(0, 10)
        al, be = rng.uniform(-0.9, 6), rng.uniform(-0.9, 6)
        x = rng.uniform(-1, 1)
        ref = mpmath.binomial(n + al, n) * mpmath.hyp2f1(-n, n + al + be + 1, al + 1, (1 - x) / 2)
        got = jacobi_P(n, al, be, x)
        assert abs(got - float(ref)) <= 1e-12 * max(1.0, abs(float(ref)))
        assert got == pytest.approx(eval_jacobi(n, al, be, x), rel=1e-10, abs=1e-12)


def test_hyp1F1_examples():
    assert hyp1F1(0.7, 2.3, 0) == 1.0
    assert hyp1F1(-1, 3.5, 2.0) == pytest.approx(1 - 2.0 / 3.5, rel=1e-15)
    assert hyp1F1(1, 1, 1) == pytest.approx(math.e, rel=1e-14)


def test_hyp1F1_terminating_matches_exact_series():
    rng = random.Random(3)
    for _ in range(100):
        a = -rng.randint(0, 10)
        b = Fraction(rng.randint(1, 40), 4)
        z = Fraction(rng.randint(0, 3000), 100)
        ref = _series_1F1(a, b, z)
        got = hyp1F1(a, float(b), float(z))
        assert abs(got - ref) <= 1e-12 * max(1.0, abs(ref))


def test_hyp1F1_series_matches_mpmath():
    rng = random.Random(5)
    for _ in range(100):
        a, b, z = rng.uniform(-5.5, 5), rng.uniform(0.5, 8), rng.uniform(-10, 15)
        ref = float(mpmath.hyp1f1(a, b, z))
        got = hyp1F1(a, b, z)
        assert abs(got - ref) <= 1e-12 * max(1.0, abs(ref)), (a, b, z)
        assert got == pytest.approx(hyp1f1(a, b, z), rel=1e-9, abs=1e-12)


def test_hyp1F1_termination_is_exact():
    # once a is a non-positive integer, further terms are identically zero
    for a in range(-6, 1):
        z = 3.7
        terms, term = [1.0], 1.0
        for k in range(25):
            term *= (a + k) / (2.5 + k) * z / (k + 1)
            terms.append(term)
        assert all(t == 0 for t in terms[1 - a :])
        assert hyp1F1(a, 2.5, z) == pytest.approx(math.fsum(terms), rel=1e-14, abs=1e-14)


def test_hyp1F1_domain():
    with pytest.raises(SeriesDomainError):
        hyp1F1(0.5, -2, 1.0)
    # a = -1 truncates before the pole at b = -2
    assert hyp1F1(-1, -2, 1.0) == pytest.approx(1.5)


# --------------------------------------------------------------------------
# angular


def test_angular_central_limit_is_legendre():
    A = build_angular(ModelParams(3, 1, 0, 0, 1), 1, 0)
    phi = np.linspace(0.1, 3.0, 7)
    ratio = A(phi) / np.cos(phi)
    assert np.allclose(ratio, ratio[0], rtol=1e-13)


def test_angular_legendre_norm():
    A = build_angular(ModelParams(3, 1, 0, 0, 1), 1, 0, constant=math.sqrt(1.5))
    assert norm_check(A) == pytest.approx(1.0, abs=1e-10)


def test_angular_endpoint_exponent():
    A = build_angular(ModelParams(4, 1, 0.1, 0.2, 1), 2, 1, form="corrected")
    # (1 - cos)^b carries the behaviour at phi = 0, (1 + cos)^a the one at pi
    near0 = [A(e) / (1 - math.cos(e)) ** A.b for e in (1e-3, 1e-4, 1e-5)]
    nearpi = [A(math.pi - e) / (1 + math.cos(math.pi - e)) ** A.a for e in (1e-3, 1e-4, 1e-5)]
    for vals in (near0, nearpi):
        assert vals[-1] != 0
        assert vals[-1] == pytest.approx(vals[-2], rel=1e-6)


@pytest.mark.parametrize("N", [3, 4, 5])
def test_angular_corrected_solves_equation(N):
    q = ModelParams(N, 1, 0.1, 0.2, 1)
    for l, I in ((0, 0), (2, 1), (4, 2), (10, 3)):
        A = build_angular(q, l, I, form="corrected")
        phi = np.linspace(0.1, math.pi - 0.1, 15)
        assert np.max(A.residual(phi)) < 1e-8


def test_printed_angular_parameters_fail_beyond_three():
    q3 = ModelParams(3, 1, 0.1, 0.2, 1)
    assert build_angular(q3, 2, 1).residual(math.pi / 3) < 1e-8
    q4 = ModelParams(4, 1, 0.1, 0.2, 1)
    assert build_angular(q4, 2, 1).residual(math.pi / 3) > 1e-4


def test_printed_angular_constant_at_three_dimensions():
    q = ModelParams(3, 1, 0.1, 0.2, 1)
    audit = norm_audit(build_angular(q, 3, 1))
    # the printed constant includes the 1/sqrt(2 pi) of the azimuthal factor
    assert audit["ratio_printed_sq_over_correct_sq"] == pytest.approx(1 / (2 * math.pi), rel=1e-10)


def test_angular_quantum_numbers():
    with pytest.raises(QuantumNumberError):
        build_angular(ModelParams(3, 1, 0, 0, 1), 0, 1)


# --------------------------------------------------------------------------
# radial


def test_hydrogen_ground_state():
    R = build_radial(ModelParams(3, 1, 0, 0, 1), 1, 0, 0, constant=2.0)
    r = np.array([0.3, 1.0, 2.5])
    assert np.allclose(R(r), 2 * np.exp(-r), rtol=1e-14)
    assert norm_check(R) == pytest.approx(1.0, abs=1e-10)
    assert np.max(R.residual(r)) < 1e-10


def test_radial_residual_example():
    R = build_radial(ModelParams(5, 1, 0.1, 0.2, 1), 3, 1, 0)
    assert np.max(R.residual(np.array([0.5, 1, 2, 5]))) < 1e-8


@pytest.mark.parametrize("N", [3, 4, 5])
def test_radial_residuals_and_nodes(N):
    q = ModelParams(N, 1, 0.1, 0.2, 1)
    for n, l, I in ((1, 0, 0), (4, 1, 1), (6, 3, 2), (11, 2, 0)):
        R = build_radial(q, n, l, I)
        r = np.geomspace(0.05, 6 * n * n, 25)
        assert np.max(R.residual(r)) < 1e-8, (n, l, I)
        assert R.nodes() == n - l - 1


def test_radial_orthogonality():
    for N in (3, 4, 5):
        q = ModelParams(N, 1, 0.1, 0.2, 1)
        Rs = []
        for n in range(2, 7):
            R = build_radial(q, n, 1, 1)
            R.constant = 1.0
            R.constant = 1 / math.sqrt(norm_check(R))
            Rs.append(R)
        for i, a in enumerate(Rs):
            assert radial_overlap(a, a) == pytest.approx(1.0, abs=1e-10)
            for b in Rs[i + 1 :]:
                assert abs(radial_overlap(a, b)) < 1e-8


def test_radial_overlap_against_adaptive_quadrature():
    from scipy.integrate import quad

    q = ModelParams(4, 1, 0.1, 0.2, 1)
    a, b = build_radial(q, 2, 0, 0), build_radial(q, 4, 0, 0)
    ref, _ = quad(lambda r: a(r) * b(r) * r**3, 0, np.inf, limit=200)
    assert radial_overlap(a, b) == pytest.approx(ref, abs=1e-10)
    ref, _ = quad(lambda r: a(r) ** 2 * r**3, 0, np.inf, limit=200)
    assert norm_check(a) == pytest.approx(ref, rel=1e-9)


def test_printed_radial_constant_audit():
    # exact in three dimensions, off by an N-dependent factor otherwise
    q3 = ModelParams(3, 1, 0.1, 0.2, 1)
    assert norm_audit(build_radial(q3, 2, 1, 0))["confirmed"]
    q4 = ModelParams(4, 1, 0.1, 0.2, 1)
    audit = norm_audit(build_radial(q4, 2, 1, 0))
    assert not audit["confirmed"]
    assert audit["ratio_printed_sq_over_correct_sq"] > 2


def test_radial_quantum_numbers():
    with pytest.raises(QuantumNumberError):
        build_radial(ModelParams(3, 1, 0, 0, 1), 1, 1, 0)


def test_residual_fourth_order_convergence():
    R = build_radial(ModelParams(5, 1, 0.1, 0.2, 1), 3, 1, 0)
    for r in (0.5, 1.0, 2.0):
        scale = min(r, 2 / R.eps)
        coarse = abs(np.sum(R.residual_terms(r, 0.1 * scale)))
        fine = abs(np.sum(R.residual_terms(r, 0.05 * scale)))
        assert 12 <= coarse / fine <= 20
    A = build_angular(ModelParams(4, 1, 0.1, 0.2, 1), 2, 1, form="corrected")
    for ph in (0.7, math.pi / 3, 2.0):
        ratio = abs(np.sum(A.residual_terms(ph, 0.1))) / abs(np.sum(A.residual_terms(ph, 0.05)))
        assert 12 <= ratio <= 20


# --------------------------------------------------------------------------
# parabolic


def test_parabolic_ground_factor_is_nodeless_power():
    S = build_parabolic(ModelParams(3, 1, 0.1, 0.2, 1), 0, 2, 0)
    f = S.f1
    t = np.array([0.5, 1.5, 4.0])
    expected = (f.eps * t / 2) ** f.s * np.exp(-f.eps * t / 4)
    assert np.allclose(f.unnormalized(t), expected, rtol=1e-14)
    assert f.nodes() == 0
    assert S.f2.nodes() == 2


def test_parabolic_residual_example():
    S = build_parabolic(ModelParams(3, 1, 0.1, 0.2, 1), 1, 0, 0)
    assert np.max(S.f1.residual(np.array([0.5, 1.0, 2.0]))) < 1e-8


@pytest.mark.parametrize("N", [3, 4, 5])
def test_parabolic_factors(N):
    q = ModelParams(N, 1, 0.1, 0.2, 1)
    d1, d2 = delta_pair(q, 1)
    for n1, n2 in ((0, 0), (2, 1), (5, 3)):
        S = build_parabolic(q, n1, n2, 1)
        assert S.separation_sum == pytest.approx(S.c0p, rel=1e-13)
        t = np.geomspace(0.05, 20 * (n1 + n2 + 2) / S.eps, 20)
        for f, n in ((S.f1, n1), (S.f2, n2)):
            assert np.max(f.residual(t)) < 1e-8
            assert f.nodes() == n


def test_parabolic_energy_matches_spherical():
    from ncoulomb.spectrum import energy_spherical

    q = ModelParams(4, 1, 0.1, 0.2, 1)
    S = build_parabolic(q, 1, 2, 1)
    assert -S.eps**2 / 8 == pytest.approx(energy_spherical(q, 5, 1), rel=1e-14)
