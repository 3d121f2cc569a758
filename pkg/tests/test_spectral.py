import math

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.optimize import brentq

from qwskeleton.coin import hadamard
from qwskeleton.errors import DomainError, EmptyWindow
from qwskeleton.engine import iter_walk, run_walk
from qwskeleton.qwrw import transition_field
from qwskeleton.spectral import (
    PhaseFunctions,
    h_of,
    mass_weighted_residual,
    osc_integral,
    uv_of,
    weak_residual,
    weak_residual_from_field,
)

from conftest import PHI_L, PHI_SYM, random_coins

SQ = 1 / math.sqrt(2)
HAD = PhaseFunctions.from_abs_a(SQ)
K_HALF = 0.61547970867038734  # arcsin(1/sqrt 3), 30-digit mpmath value rounded


def test_h_examples():
    assert h_of(0.0, SQ) == pytest.approx(SQ + 1j * SQ, abs=1e-15)
    for a in (0.1, 0.5, 0.9):
        assert h_of(math.pi / 2, a) == pytest.approx(1j, abs=1e-15)
    z = np.linspace(-math.pi, math.pi, 1000)
    h = h_of(z, 0.37)
    np.testing.assert_allclose(np.abs(h), 1.0, atol=1e-14)
    assert np.all(h.imag >= 0)


def test_uv_orthonormal_random():
    for coin in random_coins(41, 10):
        for ang in np.linspace(-math.pi, math.pi, 100, endpoint=False):
            sv = uv_of(ang, coin)
            assert abs(np.linalg.norm(sv.u) - 1) < 1e-12
            assert abs(np.linalg.norm(sv.v) - 1) < 1e-12
            assert abs(np.vdot(sv.u, sv.v)) < 1e-12
            np.testing.assert_array_equal(sv.v, [-np.conj(sv.u[1]), np.conj(sv.u[0])])
            assert abs(abs(sv.h) - 1) < 1e-14


def test_uv_hadamard_quarter_turn():
    c = hadamard()
    sv = uv_of(math.pi / 2, c)
    raw = np.array([c.a * c.b * 1j / c.abs_a, 1j - c.abs_a * (-1j)])
    np.testing.assert_allclose(sv.u, raw / np.linalg.norm(raw), atol=1e-15)
    assert sv.N == pytest.approx(np.linalg.norm(raw), abs=1e-15)


def test_k_examples():
    assert HAD.k(0.0) == 0.0
    assert HAD.k(SQ) == pytest.approx(math.pi / 2, abs=1e-7)
    assert HAD.k(-SQ) == pytest.approx(-math.pi / 2, abs=1e-7)
    assert HAD.k(0.5) == pytest.approx(K_HALF, abs=1e-15)
    assert HAD.sigma(K_HALF) == pytest.approx(0.5, abs=1e-15)
    with pytest.raises(DomainError):
        HAD.k(0.8)


@pytest.mark.parametrize("a", [0.1, 0.4, SQ, 0.93])
def test_sigma_k_round_trip(a):
    ph = PhaseFunctions.from_abs_a(a)
    s = np.linspace(-a + 1e-9, a - 1e-9, 501)
    np.testing.assert_allclose(ph.sigma(ph.k(s)), s, atol=1e-12)
    # independent inversion by bracketing root search
    for v in s[::50]:
        t = brentq(lambda t: ph.sigma(t) - v, -math.pi / 2, math.pi / 2, xtol=1e-14)
        assert abs(t - ph.k(v)) < 1e-7


@pytest.mark.parametrize("a", [0.2, SQ, 0.9])
def test_sigma_and_rho_shape(a):
    ph = PhaseFunctions.from_abs_a(a)
    t = np.linspace(-math.pi / 2, math.pi / 2, 2001)
    assert np.all(np.diff(ph.sigma(t)) > 0)
    assert ph.sigma(math.pi / 2) == pytest.approx(a, abs=1e-15)
    assert ph.sigma(-math.pi / 2) == pytest.approx(-a, abs=1e-15)
    np.testing.assert_allclose(ph.rho(t), ph.rho(-t), atol=1e-14)
    np.testing.assert_allclose(ph.rho(t), 2 * ph.theta(ph.sigma(t).clip(-a, a)), atol=1e-9)
    inner = np.linspace(-math.pi / 2 + 1e-3, -1e-3, 500)
    h = 1e-6
    fd = (ph.rho(inner + h) - ph.rho(inner - h)) / (2 * h)
    assert np.all(fd > 0)
    np.testing.assert_allclose(fd, ph.drho(inner), atol=1e-7)
    for t0 in (0.0, math.pi / 2, -math.pi / 2):
        assert abs(ph.drho(t0)) < 1e-12


def test_theta_examples():
    assert HAD.theta(0.0) == pytest.approx(math.acos(SQ), abs=1e-15)
    s = np.linspace(-0.7, 0.7, 141)
    np.testing.assert_allclose(HAD.theta(s), HAD.theta(-s), atol=1e-14)
    # theta is even, so both peaks give pi/2 - pi|a|/2
    for sgn in (1, -1):
        assert HAD.theta(sgn * SQ) == pytest.approx(math.pi / 2 - math.pi * SQ / 2, abs=1e-7)


def _oracle(F, y, n, sign, a):
    """Adaptive quadrature in s with theta from a bracketing inversion of sigma."""
    ph = PhaseFunctions.from_abs_a(a)

    def theta(s):
        if abs(s) >= a:
            t = math.copysign(math.pi / 2, s)
        else:
            t = brentq(lambda t: ph.sigma(t) - s, -math.pi / 2, math.pi / 2, xtol=1e-15)
        return math.acos(a * math.cos(t)) - t * s

    re = quad(lambda s: (F(s) * np.exp(sign * 2j * n * theta(s))).real, -a, y, limit=500, epsabs=1e-13)[0]
    im = quad(lambda s: (F(s) * np.exp(sign * 2j * n * theta(s))).imag, -a, y, limit=500, epsabs=1e-13)[0]
    return complex(re, im)


@pytest.mark.parametrize(
    "F, y, n, sign, a",
    [
        (lambda s: 1.0, SQ, 10, 1, SQ),
        (lambda s: 1.0, 0.3, 10, -1, SQ),
        (lambda s: 1.0, SQ, 50, 1, SQ),
        (lambda s: np.cos(3 * s) + 1j * s, 0.1, 25, 1, 0.5),
    ],
)
def test_osc_integral_against_oracle(F, y, n, sign, a):
    r = osc_integral(F, y, n, sign, a)
    assert r.err_est < 1e-8
    assert abs(r.value - _oracle(F, y, n, sign, a)) < 1e-8


def test_osc_integral_properties():
    assert osc_integral(lambda s: 1.0, -SQ, 30, 1, SQ).value == 0
    plus = osc_integral(lambda s: 1.0, 0.4, 200, 1, SQ)
    minus = osc_integral(lambda s: 1.0, 0.4, 200, -1, SQ)
    assert abs(minus.value - plus.value.conjugate()) < 1e-10
    for y in (-0.3, 0.2, SQ):
        r = osc_integral(lambda s: 2.0 + s, y, 77, 1, SQ)
        assert abs(r.value) <= (y + SQ) * (2 + SQ)


def test_osc_integral_decays_with_n():
    vals = [abs(osc_integral(lambda s: np.exp(s), SQ, n, 1, SQ).value) for n in (10, 100, 1000)]
    assert all(b < 2 * a for a, b in zip(vals, vals[1:]))
    assert vals[-1] < vals[0] / 3


def test_osc_integral_domain():
    with pytest.raises(DomainError):
        osc_integral(lambda s: 1.0, 0.8, 10, 1, SQ)
    with pytest.raises(DomainError):
        osc_integral(lambda s: 1.0, 0.1, 0, 1, SQ)


def test_weak_residual_trivial_cases(had):
    field = transition_field(run_walk(had, PHI_L, 400), had)
    assert weak_residual_from_field(field, SQ, (-0.5, 0.5), lambda s: 0 * s) == 0
    # a single lattice cell
    x = 100
    s = x / 400
    one = weak_residual_from_field(field, SQ, (s, s))
    p, _, _ = field.at(x)
    assert one == pytest.approx((p - (1 - s) / 2) * 2 / 400, abs=1e-15)
    assert abs(one) <= 2 / 400
    with pytest.raises(EmptyWindow):
        weak_residual_from_field(field, SQ, (0.2501, 0.2502))
    with pytest.raises(DomainError):
        weak_residual_from_field(field, SQ, (-0.8, 0.5))


def test_weak_residual_symmetric_start_vanishes(had):
    # p_n(-x) = 1 - p_n(x) for this start, so g = 1 on a symmetric window gives 0.
    for n in (200, 2000):
        assert abs(weak_residual(had, PHI_SYM, n, (-0.5, 0.5))) < 1e-14


def test_weak_residual_stays_small(had):
    # The plain residual of the ratio need not vanish (the ratio of two weakly
    # convergent oscillating terms has a nonlinear weak limit); it stays small.
    for phi, window in ((PHI_SYM, (-0.5, 0.3)), (PHI_L, (-0.5, 0.5)), (PHI_L, (-0.2, 0.6))):
        for n in (200, 2000):
            assert abs(weak_residual(had, phi, n, window)) < 0.05


@pytest.mark.parametrize("phi", [PHI_SYM, PHI_L])
@pytest.mark.parametrize("window", [(-0.5, 0.3), (-0.5, 0.5), (-0.2, 0.6)])
def test_mass_weighted_residual_decays(had, phi, window):
    vals = {}
    for st in iter_walk(had, phi, 3200):
        if st.n in (200, 3200):
            vals[st.n] = abs(mass_weighted_residual(st, transition_field(st, had), SQ, window))
    assert vals[3200] < 0.005
    assert vals[3200] < vals[200] or vals[200] < 1e-12


def test_mass_weighted_residual_with_test_function(had):
    g = lambda s: np.cos(4 * s)  # noqa: E731
    vals = [
        abs(mass_weighted_residual(st, transition_field(st, had), SQ, (-0.6, 0.6), g))
        for st in iter_walk(had, PHI_L, 3000)
        if st.n in (100, 1000, 3000)
    ]
    assert vals[2] < vals[1] < vals[0]
