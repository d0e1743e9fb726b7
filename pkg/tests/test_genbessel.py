import math

import mpmath as mp
import numpy as np
import pytest
import scipy.integrate as si
import scipy.special as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from pcircle import genbessel as gb
from pcircle.errors import DomainError, NonConvergenceError, PathRefusedError
from pcircle.numkernel import SeriesControl
from pcircle.pgeom import DistortedPolar, from_distorted_polar, p_norm


def mp_series(q, omega, x, dps=60):
    """Direct double sum in mpmath, independent of the package."""
    with mp.workdps(dps):
        x1, x2 = mp.mpf(x[0]), mp.mpf(x[1])
        p = mp.mpf(2) / q
        nrm = (abs(x1) ** p + abs(x2) ** p) ** (1 / p)
        total = mp.mpf(0)
        for k in range(0, 160):
            diag = mp.mpf(0)
            for m in range(k + 1):
                n = k - m
                t = (mp.gamma(q * m + mp.mpf(q) / 2) * mp.gamma(q * n + mp.mpf(q) / 2)
                     / (mp.gamma(mp.mpf(q) / 2) ** 2 * mp.factorial(2 * m) * mp.factorial(2 * n)))
                diag += t * (x1 ** (2 * m) if m else 1) * (x2 ** (2 * n) if n else 1)
            total += (-1) ** k * diag / mp.gamma(q * k + q + omega)
        lead = q * q * ((nrm / p) ** omega if omega else 1)
        return float(lead * total)


@pytest.mark.parametrize("q", [1, 2, 3, 4])
@pytest.mark.parametrize("omega", [0.0, 1.0, 2.5])
def test_series_against_mpmath(q, omega):
    for x in [(0.3, 0.0), (1.5, -0.7), (0.0, 4.0), (3.0, 2.0)]:
        ref = mp_series(q, omega, x)
        assert gb.gen_bessel_series(gb.GenBesselParams(q, omega), x) == pytest.approx(
            ref, rel=1e-12, abs=1e-15)


@pytest.mark.parametrize("omega", [0.0, 1.0, 2.0, 0.5])
def test_p2_collapse(omega):
    r = np.linspace(0, 18, 41)
    got = [gb.gen_bessel_series(gb.GenBesselParams(1, omega), (t, 0.0)) for t in r]
    assert np.max(np.abs(np.array(got) - sp.jv(omega, r))) < 1e-12


def test_p2_is_rotation_invariant():
    params = gb.GenBesselParams(1, 0.0)
    v = gb.gen_bessel_series(params, (3.0, 4.0))
    assert v == pytest.approx(sp.j0(5.0), abs=1e-13)


def test_value_at_origin():
    assert gb.gen_bessel_series(gb.GenBesselParams(2, 0.0), (0.0, 0.0)) == 4.0
    assert gb.gen_bessel_series(gb.GenBesselParams(3, 0.0), (0.0, 0.0)) == pytest.approx(4.5)
    assert gb.gen_bessel_series(gb.GenBesselParams(2, 1.0), (0.0, 0.0)) == 0.0


def test_series_refuses_large_argument():
    with pytest.raises(PathRefusedError):
        gb.gen_bessel_series(gb.GenBesselParams(2, 0.0), (30.0, 0.0))
    with pytest.raises(NonConvergenceError):
        gb.gen_bessel_series(gb.GenBesselParams(1, 0.0), (15.0, 0.0),
                             SeriesControl(max_terms=5))


def test_params_validate():
    with pytest.raises(DomainError):
        gb.GenBesselParams(1, -0.5)


@given(st.integers(1, 4), st.sampled_from([0.0, 1.0]), st.floats(0.05, 17.5),
       st.floats(0, 2 * math.pi))
@settings(max_examples=60, deadline=None)
def test_paths_agree(q, omega, r, phi):
    params = gb.GenBesselParams(q, omega)
    x = from_distorted_polar(DistortedPolar(r, phi), q)
    a = gb.gen_bessel_series(params, x)
    b = gb.gen_bessel_integral(params, x)
    assert abs(a - b) <= 1e-9 * max(1.0, abs(a))


@pytest.mark.parametrize("q", [1, 2, 3])
def test_order_one_against_nested_quadrature(q):
    # J_1(x) = |x|_p / p * int_0^1 J_0(u^(q/2) x) u^(q-1) du, inner J_0 by the angular integral
    params = gb.GenBesselParams(q, 1.0)
    for x in [(2.0, 1.0), (7.5, -3.0), (25.0, 10.0)]:
        nrm = p_norm(x, q)
        inner = lambda u: float(gb.j0_batch(q, np.array([u ** (q / 2) * x[0]]),
                                            np.array([u ** (q / 2) * x[1]]))[0]) * u ** (q - 1)
        val, _ = si.quad(inner, 0.0, 1.0, limit=400, epsabs=1e-13, epsrel=1e-12)
        ref = nrm / (2.0 / q) * val
        assert gb.gen_bessel_integral(params, x) == pytest.approx(ref, abs=1e-10)


def test_general_order_integral_against_series():
    for q in (1, 3):
        params = gb.GenBesselParams(q, 2.5)
        x = (4.0, -2.0)
        assert gb.gen_bessel_integral(params, x) == pytest.approx(
            gb.gen_bessel_series(params, x), abs=1e-11)


def test_integral_large_argument_p2():
    for r in (50.0, 200.0, 1000.0):
        assert gb.gen_bessel_integral(gb.GenBesselParams(1, 0.0), (r, 0.0)) == pytest.approx(
            sp.j0(r), abs=1e-12)
        assert gb.gen_bessel_integral(gb.GenBesselParams(1, 1.0), (0.0, r)) == pytest.approx(
            sp.j1(r), abs=1e-12)


def test_order_one_kernel_h():
    c = np.concatenate([-np.logspace(-9, 2, 40), np.logspace(-9, 3, 200)])
    with mp.workdps(30):
        ref = [float(mp.quad(lambda v: v * mp.cos(mp.mpf(t) * v), [0, 1])) if abs(t) < 30
               else float((mp.mpf(t) * mp.sin(t) + mp.cos(t) - 1) / mp.mpf(t) ** 2) for t in c]
    assert np.max(np.abs(gb._h(c) - np.array(ref))) < 1e-15


def test_batch_matches_scalar():
    rng = np.random.default_rng(3)
    x1 = rng.uniform(-40, 40, 50)
    x2 = rng.uniform(-40, 40, 50)
    for q in (1, 2, 3, 4):
        v0 = gb.j0_batch(q, x1, x2)
        v1 = gb.j1_batch(q, x1, x2)
        for i in range(0, 50, 7):
            x = (x1[i], x2[i])
            assert v0[i] == pytest.approx(gb.gen_bessel_integral(gb.GenBesselParams(q, 0.0), x), abs=1e-11)
            assert v1[i] == pytest.approx(gb.gen_bessel_integral(gb.GenBesselParams(q, 1.0), x), abs=1e-11)


def test_phi_invariance_p2():
    for k in range(0, 31, 5):
        for phi in np.linspace(0, 2 * math.pi, 9):
            assert gb.phi_coefficient(1, k, phi) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("q", [2, 3, 4])
def test_phi_against_mpmath_inner_sum(q):
    for k in (0, 1, 5, 12, 20):
        for phi in (0.0, 0.3, 1.1, 2.9):
            c = abs(math.cos(phi)) ** (2 * q)
            s = abs(math.sin(phi)) ** (2 * q)
            with mp.workdps(40):
                tot = mp.mpf(0)
                for n in range(k + 1):
                    tot += (mp.binomial(k, n) * mp.gamma(q * n + mp.mpf(q) / 2)
                            * mp.gamma(q * (k - n) + mp.mpf(q) / 2)
                            / (mp.gamma(n + mp.mpf(1) / 2) * mp.gamma(k - n + mp.mpf(1) / 2))
                            * mp.mpf(c) ** n * mp.mpf(s) ** (k - n))
            assert gb.phi_coefficient(q, k, phi) == pytest.approx(float(tot), rel=1e-11)
            assert gb.PhiCoefficients(q)(k, phi) == pytest.approx(float(tot), rel=1e-11)


def test_script_j_matches_planar_value():
    for q in (1, 2, 3, 4):
        params = gb.GenBesselParams(q, 1.0)
        for r, phi in [(0.5, 0.2), (6.0, 2.0), (30.0, 4.0)]:
            x = from_distorted_polar(DistortedPolar(r, phi), q)
            ref = gb.gen_bessel_integral(params, x)
            assert gb.script_j(params, phi, r) == pytest.approx(ref, abs=1e-10)


def test_radial_function_vectorized():
    params = gb.GenBesselParams(3, 0.5)
    f = gb.radial_function(params, 0.7, 20.0)
    r = np.array([0.0, 1.0, 5.0, 19.0, 25.0])
    got = f(r)
    for t, v in zip(r, got):
        assert v == pytest.approx(gb.script_j(params, 0.7, float(t)), abs=1e-10)


def test_truncation_bound_dominates():
    for q in (1, 2, 3, 4):
        for omega in (0.0, 1.0):
            params = gb.GenBesselParams(q, omega)
            x = (2.0, 1.5)
            ref = mp_series(q, omega, x)
            for k in (1, 3, 6, 10):
                ctrl = SeriesControl(max_terms=k)
                val, _, _ = gb._series_float(q, omega, x[0], x[1], ctrl,
                                             lambda j, k=k: 0.0 if j >= k else math.inf)
                part = gb._prefactor(q, omega, p_norm(x, q)) * val
                assert abs(ref - part) <= gb.truncation_bound(params, x, k) + 1e-14


def test_truncation_bound_is_monotone():
    params = gb.GenBesselParams(2, 0.0)
    vals = [gb.truncation_bound(params, (3.0, 2.0), k) for k in range(40)]
    assert all(b <= a for a, b in zip(vals, vals[1:]))


def test_gamma_ratio_inequality():
    for k in range(1, 13):
        for n in range(16):
            for m in range(16):
                assert gb.gamma_ratio_inequality_check(k, n, m)
