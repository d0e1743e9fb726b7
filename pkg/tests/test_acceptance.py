"""The twelve acceptance criteria, each at its stated tolerance and time limit."""

import math
import subprocess
import sys
import time

import mpmath as mp
import numpy as np
import pytest
import scipy.special as sp

from conftest import record
from pcircle import erdkober as ek
from pcircle import genbessel as gb
from pcircle import hardy as hd
from pcircle import pgeom as pg
from pcircle.numkernel import SeriesControl, integrate
from pcircle.pgeom import DistortedPolar, PExponent, from_distorted_polar

QS = (1, 2, 3, 4)


def test_c01_p2_collapse():
    t0 = time.perf_counter()
    radii = np.linspace(0.0, 18.0, 200)
    err = 0.0
    for w in (0.0, 1.0):
        got = np.array([gb.gen_bessel_series(gb.GenBesselParams(1, w), (r, 0.0)) for r in radii])
        err = max(err, float(np.max(np.abs(got - sp.jv(w, radii)))))
    dt = time.perf_counter() - t0
    ok = record(1, "p=2 collapse", err <= 1e-10 and dt < 5,
                f"max error {err:.2e} (tol 1e-10), {dt:.1f} s (limit 5 s)")
    assert ok


def test_c02_path_agreement():
    t0 = time.perf_counter()
    rng = np.random.default_rng(2024)
    worst = 0.0
    for q in QS:
        for w in (0.0, 1.0):
            params = gb.GenBesselParams(q, w)
            rs = rng.uniform(0.0, 18.0, 100)
            phis = rng.uniform(0.0, 2 * math.pi, 100)
            for r, phi in zip(rs, phis):
                x = from_distorted_polar(DistortedPolar(float(r), float(phi)), q)
                a = gb.gen_bessel_series(params, x)
                b = gb.gen_bessel_integral(params, x)
                worst = max(worst, abs(a - b) / max(abs(a), 1e-300) if abs(a) > 1e-3
                            else abs(a - b))
    dt = time.perf_counter() - t0
    ok = record(2, "series/integral agreement", worst <= 1e-8 and dt < 60,
                f"worst relative gap {worst:.2e} (tol 1e-8), {dt:.1f} s (limit 60 s)")
    assert ok


def _phi_direct(q, k, phi):
    """Gamma(q/2)^2 4^k k!/pi * sum_{m1+m2=k} a(m1) a(m2) c^m1 s^m2, in mpmath."""
    with mp.workdps(50):
        c = mp.mpf(abs(math.cos(phi))) ** (2 * q)
        s = mp.mpf(abs(math.sin(phi))) ** (2 * q)
        hq = mp.mpf(q) / 2

        def a(m):
            return mp.gamma(q * m + hq) / (mp.gamma(hq) * mp.factorial(2 * m))

        inner = mp.fsum(a(m) * a(k - m) * c ** m * s ** (k - m) for m in range(k + 1))
        return float(mp.gamma(hq) ** 2 * mp.mpf(4) ** k * mp.factorial(k) / mp.pi * inner)


def test_c03_phi_invariance():
    phis = np.linspace(0.0, 2 * math.pi, 64, endpoint=False)
    inv = max(abs(gb.phi_coefficient(1, k, phi) - 1.0) for k in range(31) for phi in phis)
    form = 0.0
    for q in (2, 3, 4):
        for k in range(21):
            for phi in phis[::4]:
                ref = _phi_direct(q, k, float(phi))
                form = max(form, abs(gb.phi_coefficient(q, k, phi) - ref) / abs(ref))
    ok = record(3, "Phi invariance and closed form", inv <= 1e-12 and form <= 1e-11,
                f"p=2 deviation {inv:.2e} (tol 1e-12), closed form vs inner sum {form:.2e} (tol 1e-11)")
    assert ok


def _mp_partials(q, omega, x, k_max=60):
    """Exact partial sums S_0..S_k_max of the double series, in mpmath."""
    with mp.workdps(80):
        hq = mp.mpf(q) / 2
        a = [mp.gamma(q * m + hq) / (mp.gamma(hq) * mp.factorial(2 * m)) for m in range(k_max)]
        x1, x2 = mp.mpf(x[0]), mp.mpf(x[1])
        p = mp.mpf(2) / q
        nrm = (abs(x1) ** p + abs(x2) ** p) ** (1 / p)
        lead = q * q * ((nrm / p) ** omega if omega else 1)
        out, tot = [mp.mpf(0)], mp.mpf(0)
        for k in range(k_max):
            diag = mp.fsum(a[m] * a[k - m] * (x1 ** (2 * m) if m else 1)
                           * (x2 ** (2 * (k - m)) if k - m else 1) for m in range(k + 1))
            tot += (-1) ** k * diag / mp.gamma(q * k + q + omega)
            out.append(lead * tot)
        return out


def test_c04_inequality_and_tail_bound():
    bad = [(k, n, m) for k in range(1, 13) for n in range(16) for m in range(16)
           if not gb.gamma_ratio_inequality_check(k, n, m)]
    viol = 0
    checked = 0
    for q in QS:
        for w in (0.0, 0.5, 1.0, 2.5):
            params = gb.GenBesselParams(q, w)
            for x in ((0.5, 0.0), (1.0, 1.0), (2.5, -1.5), (0.0, 5.0), (6.0, 4.0)):
                sums = _mp_partials(q, w, x)
                # S_60 is exact to far below every bound tested here
                assert gb.truncation_bound(params, x, 60) < 1e-40
                for k in (1, 2, 4, 8, 12, 20, 30):
                    checked += 1
                    gap = float(abs(sums[-1] - sums[k]))
                    viol += gap > gb.truncation_bound(params, x, k)
    ok = record(4, "gamma-ratio inequality and tail bound", not bad and not viol,
                f"{len(bad)} inequality failures of 2880, {viol} bound violations of {checked}")
    assert ok


def _float_brute(q, r):
    p = 2.0 / q
    n = int(r) + 1
    a = np.abs(np.arange(-n, n + 1, dtype=float))
    s = a[:, None] ** p + a[None, :] ** p
    return int(np.count_nonzero(s < r ** p))


def test_c05_lattice_exactness():
    t0 = time.perf_counter()
    rng = np.random.default_rng(5)
    mism = 0
    used = 0
    for q in QS:
        radii = []
        while len(radii) < 50:
            r = float(rng.uniform(0.5, 50.0))
            if pg.error_term_direct(q, r).near_boundary:
                continue
            radii.append(r)
        for r in radii:
            c = pg.count_lattice_points(q, r)
            mism += c != pg.count_brute_force(q, r) or c != _float_brute(q, r)
            used += 1
    census_viol = 0
    for q in QS:
        census_viol += len(pg.shell_census(q, 1000.0).violations)
    # explicit enumeration over a smaller range, shell by shell
    enum_viol = 0
    for q, sm in ((1, 1000.0), (2, 300.0), (3, 40.0), (4, 8.0)):
        enum_viol += sum(sh.multiplicity > 4 * math.floor(sh.s ** (q / 2) * (1 + 1e-15))
                         for sh in pg.enumerate_shells(q, sm))
    dt = time.perf_counter() - t0
    ok = record(5, "lattice exactness and shell bound",
                mism == 0 and census_viol == 0 and enum_viol == 0 and dt < 30,
                f"{mism} count mismatches of {used}, {census_viol} census and {enum_viol} "
                f"enumerated bound violations for s <= 1000, {dt:.1f} s (limit 30 s)")
    assert ok


def test_c06_ek_monomials():
    worst = 0.0
    for q in QS:
        p = 2.0 / q
        for lam in (0.0, 0.5, 1.0, 2.0, 3.5):
            for alpha in (0.25, 0.5, 0.75, 1.0, 1.5, 2.5):
                for eta in (-0.5, 0.0, 1.0, 2.0):
                    for r in (0.3, 1.0, 4.0):
                        v = ek.ek_integral(lambda t, lam=lam: t ** lam, ek.EKParams(alpha, eta, p), r)
                        ex = math.exp(math.lgamma(eta + lam / p + 1)
                                      - math.lgamma(eta + lam / p + alpha + 1)) * r ** lam
                        worst = max(worst, abs(v - ex) / abs(ex))
    inv = 0.0
    for q in QS:
        p = 2.0 / q
        for lam in (0.0, 1.0, 2.0, 3.5):
            for alpha in (0.25, 0.5, 0.75):
                for eta in (-0.5, 0.0, 1.0):
                    prm = ek.EKParams(alpha, eta, p)

                    def fi(t, lam=lam, prm=prm):
                        return np.array([ek.ek_integral(lambda u: u ** lam, prm, float(v))
                                         for v in np.atleast_1d(t)])

                    for r in (0.7, 1.9):
                        inv = max(inv, abs(ek.ek_derivative(fi, prm, r) - r ** lam) / r ** lam)
    ok = record(6, "Erdelyi-Kober monomials and D after I", worst <= 1e-8 and inv <= 1e-5,
                f"monomial rel error {worst:.2e} (tol 1e-8), D(I f) - f rel {inv:.2e} (tol 1e-5)")
    assert ok


def test_c07_order_raising():
    phis = np.linspace(0.0, 2 * math.pi, 8, endpoint=False) + 0.1
    worst = 0.0
    for q in (1, 2, 3):
        for g in (0.5, 1.0):
            for w in (0.0, 0.5, 1.0):
                for r in (0.5, 2.0, 8.0):
                    for phi in phis:
                        f = gb.radial_function(gb.GenBesselParams(q, w), phi, r)
                        lhs = ek.ek_integral(f, ek.EKParams(g, ek.recurrence_eta(q, w), 2.0 / q), r)
                        rhs = (2.0 / q / r) ** g * gb.script_j(gb.GenBesselParams(q, w + g), phi, r)
                        worst = max(worst, abs(lhs - rhs))
    ok = record(7, "fractional integral raises the order", worst <= 1e-6,
                f"max |lhs - rhs| {worst:.2e} (tol 1e-6)")
    assert ok


def test_c08_differential_formula():
    phis = np.linspace(0.0, 2 * math.pi, 16, endpoint=False)
    worst = 0.0
    for q in QS:
        for w in (0.0, 1.0, 2.0):
            for phi in phis:
                for r in (0.5, 2.0, 8.0):
                    worst = max(worst, ek.diff_formula_residual(q, w, phi, r))
    integ = 0.0
    for q in QS:
        for phi in phis:
            for r in (0.5, 2.0, 8.0):
                f0 = gb.radial_function(gb.GenBesselParams(q, 0.0), phi, r)
                lhs = integrate(lambda t: t * f0(t), 0.0, r)
                integ = max(integ, abs(lhs - r * gb.script_j(gb.GenBesselParams(q, 1.0), phi, r)))
    ok = record(8, "differential formula", worst <= 1e-6 and integ <= 1e-7,
                f"residual {worst:.2e} (tol 1e-6), integrated form {integ:.2e} (tol 1e-7)")
    assert ok


def test_c09_hardy_p2():
    t0 = time.perf_counter()
    target = 9 - 2.25 * math.pi
    tr = hd.convergence_trace(hd.HardySumConfig(PExponent(1), 1.5, 5000.0))
    dev = abs(tr.tail_average - target)
    agree = 0.0
    for t in (100, 1000, 5000):
        a = hd.classical_hardy_sum(1.5, t)
        b = hd.hardy_partial_sum(hd.HardySumConfig(PExponent(1), 1.5, float(t)))
        agree = max(agree, abs(a - b))
    dt = time.perf_counter() - t0
    ok = record(9, "Hardy identity p=2", dev <= 0.05 * abs(target) and agree <= 1e-9 and dt < 60,
                f"|tail average - P| {dev:.4f} (tol {0.05 * abs(target):.4f}), classical vs "
                f"generalized {agree:.1e} (tol 1e-9), {dt:.1f} s (limit 60 s)")
    assert ok


def test_c10_hardy_p1():
    t0 = time.perf_counter()
    tr = hd.convergence_trace(hd.HardySumConfig(PExponent(2), 0.75, 400.0),
                              [50.0, 100.0, 200.0, 400.0])
    env = tr.envelope
    mono = all(b <= a for a, b in zip(env, env[1:]))
    tol = max(0.3, 0.25 * abs(tr.direct_error_term))
    dt = time.perf_counter() - t0
    ok = record(10, "Hardy identity p=1", mono and abs(tr.tail_residual) <= tol and dt < 600,
                f"envelope {', '.join(f'{e:.4f}' for e in env)}, tail residual "
                f"{tr.tail_residual:+.4f} (tol {tol}), {dt:.1f} s (limit 600 s)")
    assert ok


def test_c11_decay_slopes():
    t0 = time.perf_counter()
    grid = np.linspace(50.0, 400.0, 20000)
    targets = {1: -0.5, 2: -0.5, 3: -1.0 / 3.0}
    slopes = {q: hd.decay_slope_estimate(PExponent(q), math.pi / 4, grid) for q in targets}
    dt = time.perf_counter() - t0
    good = all(abs(slopes[q] - targets[q]) <= 0.15 for q in targets) and dt < 300
    ok = record(11, "decay slopes at phi = pi/4", good,
                ", ".join(f"q={q} slope {slopes[q]:+.4f} (target {targets[q]:+.4f})"
                          for q in targets) + f", {dt:.1f} s (limit 300 s)")
    assert ok


def _verify(threads):
    res = subprocess.run([sys.executable, "-m", "pcircle", "verify", "--threads", str(threads)],
                         capture_output=True)
    return res.returncode, res.stdout


def test_c12_determinism():
    c1, a = _verify(1)
    c2, b = _verify(1)
    c3, c = _verify(4)
    same = a == b == c and len(a) > 0
    checks = len(a.splitlines()) - 1
    ok = record(12, "verify is byte-identical", same,
                f"runs identical: {same}, exit codes {c1}/{c2}/{c3}, {checks} checks")
    assert ok
