"""Self-check suites behind ``pcircle verify``.

Each suite returns a list of :class:`CheckResult`.  Everything is
deterministic: no timings or other run-dependent values are reported, so
two runs produce byte-identical reports.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import Decimal, localcontext
from typing import Callable, Dict, List

import numpy as np

from . import erdkober as ek
from . import genbessel as gb
from . import hardy as hd
from . import numkernel as nk
from . import pgeom as pg
from .pgeom import PExponent

QS = (1, 2, 3, 4)


@dataclass(frozen=True)
class CheckResult:
    suite: str
    check: str
    passed: bool
    measured: float
    tolerance: float

    @property
    def status(self) -> str:
        return "pass" if self.passed else "fail"


def _le(suite, check, measured, tol):
    return CheckResult(suite, check, bool(measured <= tol), float(measured), float(tol))


# --------------------------------------------------------------------------


def suite_numkernel(fast: bool, threads: int) -> List[CheckResult]:
    s = "numkernel"
    out = []
    err = max(abs(nk.log_gamma(1.0)), abs(nk.log_gamma(0.5) - 0.5 * math.log(math.pi)),
              abs(nk.log_gamma(5.0) - math.log(24.0)))
    out.append(_le(s, "log_gamma examples", err, 1e-13))
    grid = [0.3, 0.5, 1.0, 2.5, 7.0, 40.0]
    sym = max(abs(nk.beta(a, b) - nk.beta(b, a)) / nk.beta(a, b) for a in grid for b in grid)
    out.append(_le(s, "beta symmetry", sym, 1e-12))
    rec = max(abs(nk.beta(a + 1, b) - nk.beta(a, b) * a / (a + b)) / nk.beta(a + 1, b)
              for a in grid for b in grid)
    out.append(_le(s, "beta recurrence", rec, 1e-12))
    out.append(_le(s, "first zero of J_0", abs(nk.classical_bessel_j(0.0, 2.404825557695773)), 1e-10))
    radii = np.linspace(0.5, 45.0, 12 if fast else 40)
    res = max(abs(nk.central_diff(lambda t: t * nk.classical_bessel_j(1.0, t), r)
                  - r * nk.classical_bessel_j(0.0, r)) for r in radii)
    out.append(_le(s, "d/dr[r J_1] = r J_0", res, 1e-8))
    overlap = max(abs(nk._bessel_series(w, r) - nk._bessel_hankel(w, r))
                  for w in (0.0, 1.0) for r in np.linspace(18.0, 30.0, 13))
    out.append(_le(s, "series/asymptotic overlap", overlap, 1e-9))
    sing = nk.QuadratureSpec(endpoint_singularity="left")
    out.append(_le(s, "integrate t^-1/2", abs(nk.integrate(lambda t: t ** -0.5, 0.0, 1.0, sing) - 2.0), 1e-10))
    osc = nk.integrate(lambda t: np.cos(40 * np.pi * t), 0.0, 1.0, nk.QuadratureSpec(),
                       oscillations=40)
    out.append(_le(s, "integrate cos(40 pi t)", abs(osc), 1e-10))
    x, w = nk.composite_gl_rule(0.0, 1.0, 3)
    poly = max(abs(math.fsum(w * x ** d) - 1.0 / (d + 1)) * (d + 1) for d in range(0, 40))
    out.append(_le(s, "Gauss-Legendre exactness", poly, 1e-13))
    acc = abs(nk.compensated_sum([0.1] * (10 ** 5 if fast else 10 ** 6))
              - (1e4 if fast else 1e5))
    out.append(_le(s, "compensated sum of 0.1", acc, 1e-9))
    out.append(_le(s, "compensated cancellation", abs(nk.compensated_sum([1.0, -1.0, 1e-16]) - 1e-16), 0.0))
    return out


def suite_pgeom(fast: bool, threads: int) -> List[CheckResult]:
    s = "pgeom"
    out = []
    radii = [1.5, 2.37, 4.1, 7.7, 11.3, 16.6] if fast else \
        [1.5, 2.37, 4.1, 7.7, 11.3, 16.6, 23.45, 31.1, 42.2, 49.9]
    bad = 0
    for q in QS:
        for r in radii:
            bad += pg.count_lattice_points(q, r) != pg.count_brute_force(q, r)
    out.append(_le(s, "row scan equals brute force", bad, 0))
    bad = 0
    for q, sm in ((1, 60.0), (2, 40.0), (3, 20.0), (4, 6.0)):
        shells = pg.enumerate_shells(q, sm)
        tot = sum(sh.multiplicity for sh in shells)
        bad += tot != pg.count_lattice_points(q, sm ** (q / 2.0) * (1 + 1e-9)) - 1
    out.append(_le(s, "shell union equals count", bad, 0))
    viol = sum(len(pg.shell_census(q, 1000.0).violations) for q in QS)
    out.append(_le(s, "cardinality bound s <= 1000", viol, 0))
    worst = 0.0
    for r in np.linspace(0.01, 100.0, 9 if fast else 33):
        for phi in np.linspace(0.0, 2 * math.pi, 256, endpoint=False):
            for q in QS:
                dp = pg.to_distorted_polar(pg.from_distorted_polar(pg.DistortedPolar(r, phi), q), q)
                dphi = abs(dp.phi - phi)
                worst = max(worst, abs(dp.r - r) / r, min(dphi, 2 * math.pi - dphi))
    out.append(_le(s, "distorted polar round trip", worst, 1e-12))
    shells = pg.enumerate_shells(1, 200.0)
    mism = sum(sh.multiplicity != pg.r2_function(int(round(sh.s))) for sh in shells)
    out.append(_le(s, "p=2 shells match R(k)", mism, 0))
    return out


def suite_genbessel(fast: bool, threads: int) -> List[CheckResult]:
    s = "genbessel"
    out = []
    radii = np.linspace(0.0, 18.0, 50 if fast else 200)
    err = max(abs(gb.gen_bessel_series(gb.GenBesselParams(1, w), (r, 0.0))
                  - nk.classical_bessel_j(w, r)) for w in (0.0, 1.0) for r in radii)
    out.append(_le(s, "p=2 collapse", err, 1e-10))
    n = 25 if fast else 100
    worst = 0.0
    for q in QS:
        for w in (0.0, 1.0):
            params = gb.GenBesselParams(q, w)
            for i in range(n):
                r = 18.0 * (i + 0.5) / n
                phi = 2 * math.pi * ((i * 0.6180339887498949) % 1.0)
                x = pg.from_distorted_polar(pg.DistortedPolar(r, phi), q)
                a = gb.gen_bessel_series(params, x)
                b = gb.gen_bessel_integral(params, x)
                worst = max(worst, abs(a - b) / max(1.0, abs(a)))
    out.append(_le(s, "series/integral agreement", worst, 1e-8))
    phis = np.linspace(0.0, 2 * math.pi, 64, endpoint=False)
    inv = max(abs(gb.phi_coefficient(1, k, phi) - 1.0) for k in range(31) for phi in phis)
    out.append(_le(s, "Phi invariance at p=2", inv, 1e-12))
    worst = 0.0
    for q in (2, 3, 4):
        pc = gb.PhiCoefficients(q)
        for k in range(0, 21, 4 if fast else 1):
            for phi in phis[:: 8 if fast else 1]:
                a = gb.phi_coefficient(q, k, phi)
                worst = max(worst, abs(a - pc(k, phi)) / abs(pc(k, phi)))
    out.append(_le(s, "Phi log form vs exact form", worst, 1e-11))
    bad = sum(not gb.gamma_ratio_inequality_check(k, n_, m)
              for k in range(1, 13) for n_ in range(16) for m in range(16))
    out.append(_le(s, "gamma ratio inequality", bad, 0))
    viol = 0
    for q in QS:
        for w in (0.0, 1.0, 2.5):
            params = gb.GenBesselParams(q, w)
            for x in ((1.0, 0.0), (2.5, -1.5), (6.0, 4.0)):
                sums = _decimal_partials(params, x)
                for k in (2, 5, 10, 20, 30):
                    viol += float(abs(sums[-1] - sums[k])) > gb.truncation_bound(params, x, k)
    out.append(_le(s, "truncation bound dominates tail", viol, 0))
    asym = 0.0
    for q in QS:
        params = gb.GenBesselParams(q, 1.0)
        v = gb.gen_bessel_series(params, (2.3, 1.1))
        for x in ((-2.3, 1.1), (2.3, -1.1), (1.1, 2.3), (-1.1, -2.3)):
            asym = max(asym, abs(gb.gen_bessel_series(params, x) - v))
    out.append(_le(s, "sign and swap symmetry", asym, 1e-14))
    return out


def _decimal_partials(params, x, k_max=60):
    """Partial sums S_0..S_k_max of the double series at 60 digits."""
    q, w = params.q, params.omega
    a = gb._table("a", q).upto(k_max)
    out = [Decimal(0)]
    with localcontext() as ctx:
        ctx.prec = 60
        x1, x2 = Decimal(x[0]) ** 2, Decimal(x[1]) ** 2
        om = Decimal(w)
        dk, total = Decimal(1), Decimal(0)
        for k in range(k_max):
            if k:
                for j in range(q):
                    dk /= q * k + om + j
            diag = sum((a[m] * a[k - m] * (x1 ** m if m else 1) * (x2 ** (k - m) if k - m else 1)
                        for m in range(k + 1)), Decimal(0))
            total = total - dk * diag if k % 2 else total + dk * diag
            out.append(total)
    lead = Decimal(gb._prefactor(q, w, pg.p_norm(x, params.p)))
    return [v * lead for v in out]


def suite_erdkober(fast: bool, threads: int) -> List[CheckResult]:
    s = "erdkober"
    out = []
    worst = 0.0
    for q in QS:
        pp = 2.0 / q
        for lam in (0.0, 1.0, 2.0, 3.5):
            for al in (0.25, 0.5, 1.0, 1.5):
                for eta in (-0.5, 0.0, 1.0):
                    for r in (0.5, 1.0, 2.0):
                        v = ek.ek_integral(lambda t, lam=lam: t ** lam, ek.EKParams(al, eta, pp), r)
                        ex = math.exp(math.lgamma(eta + lam / pp + 1)
                                      - math.lgamma(eta + lam / pp + al + 1)) * r ** lam
                        worst = max(worst, abs(v - ex) / abs(ex))
    out.append(_le(s, "monomial eigen-relation", worst, 1e-8))
    worst = 0.0
    for q in ((1, 3) if fast else QS):
        pp = 2.0 / q
        for lam in (0.0, 1.0, 3.5):
            for al in (0.25, 0.5):
                for eta in ((0.0,) if fast else (-0.5, 0.0, 1.0)):
                    prm = ek.EKParams(al, eta, pp)

                    def fi(t, lam=lam, prm=prm):
                        return np.array([ek.ek_integral(lambda u: u ** lam, prm, float(v))
                                         for v in np.atleast_1d(t)])

                    r = 1.3
                    v = ek.ek_derivative(fi, prm, r)
                    worst = max(worst, abs(v - r ** lam) / r ** lam)
    out.append(_le(s, "D of I is the identity", worst, 1e-5))
    worst = 0.0
    phis = np.linspace(0.0, 2 * math.pi, 8, endpoint=False) + 0.1
    for q in (1, 2, 3):
        for g in (0.5, 1.0):
            for w in (0.0, 0.5, 1.0):
                for r in (0.5, 2.0, 8.0):
                    for phi in phis[:: 4 if fast else 1]:
                        f = gb.radial_function(gb.GenBesselParams(q, w), phi, r)
                        lhs = ek.ek_integral(f, ek.EKParams(g, ek.recurrence_eta(q, w), 2.0 / q), r)
                        rhs = (2.0 / q / r) ** g * gb.script_j(gb.GenBesselParams(q, w + g), phi, r)
                        worst = max(worst, abs(lhs - rhs))
    out.append(_le(s, "fractional integral raises the order", worst, 1e-6))
    worst = 0.0
    for q in QS:
        for x in ((1.0, 0.5), (3.0, -4.0), (0.2, 6.0)):
            nrm = pg.p_norm(x, q)
            if nrm > 10:
                continue
            a = ek.integral_recurrence_J(q, 0.0, 1.0, x)
            b = gb.gen_bessel_series(gb.GenBesselParams(q, 1.0), x)
            worst = max(worst, abs(a - b))
            a = ek.integral_recurrence_scriptJ(q, 0.0, 0.5, 0.9, nrm)
            b = gb.script_j(gb.GenBesselParams(q, 0.5), 0.9, nrm)
            worst = max(worst, abs(a - b))
    a = ek.integral_recurrence_J(1, 1.0, 0.5, (5.0, 0.0))
    worst = max(worst, abs(a - nk.classical_bessel_j(1.5, 5.0)))
    out.append(_le(s, "integral recurrences", worst, 1e-7))
    worst = 0.0
    phis = np.linspace(0.0, 2 * math.pi, 16, endpoint=False)
    for q in QS:
        for w in (0.0, 1.0, 2.0):
            for phi in phis[:: 4 if fast else 1]:
                for r in (0.5, 2.0, 8.0):
                    worst = max(worst, ek.diff_formula_residual(q, w, phi, r))
    out.append(_le(s, "decreasing-order differential formula", worst, 1e-6))
    x = (1.2, -0.7)
    for q in (1, 3):
        f = lambda pts, q=q: gb.j0_batch(q, pts[:, 0], pts[:, 1])
        lhs = ek.multivar_ek(f, q / 2.0, ek.recurrence_eta(q, 0.0), 0.5, x)
        rhs = (2.0 / q / pg.p_norm(x, q)) ** 0.5 * gb.gen_bessel_series(gb.GenBesselParams(q, 0.5), x)
        out.append(_le(s, f"multivariable operator q={q}", abs(lhs - rhs), 1e-6))
    return out


def suite_hardy(fast: bool, threads: int) -> List[CheckResult]:
    s = "hardy"
    out = []
    s_max = 1000.0 if fast else 5000.0
    cfg = hd.HardySumConfig(PExponent(1), 1.5, s_max, threads=threads)
    tr = hd.convergence_trace(cfg)
    target = 9 - 2.25 * math.pi
    out.append(_le(s, "p=2 tail average near P(1.5)", abs(tr.tail_residual), 0.05 * abs(target)))
    diff = abs(hd.classical_hardy_sum(1.5, int(s_max)) - tr.checkpoints[-1].partial_sum)
    out.append(_le(s, "classical and generalized p=2 sums agree", diff, 1e-9 * (1 + abs(target))))
    worst = 0.0
    for r in (0.8, 1.5, 2.3):
        for t in ((10, 100) if fast else (10, 100, 1000)):
            a = hd.classical_hardy_sum(r, t)
            b = hd.hardy_partial_sum(hd.HardySumConfig(PExponent(1), r, t, threads=threads))
            worst = max(worst, abs(a - b) / (1 + abs(a)))
    out.append(_le(s, "p=2 implementations agree", worst, 1e-9))
    sched = [25.0, 50.0, 100.0] if fast else [50.0, 100.0, 200.0, 400.0]
    tr = hd.convergence_trace(hd.HardySumConfig(PExponent(2), 0.75, sched[-1], threads=threads), sched)
    env = tr.envelope
    rises = sum(b > a for a, b in zip(env, env[1:]))
    out.append(_le(s, "p=1 residual envelope non-increasing", rises, 0))
    out.append(_le(s, "p=1 tail residual", abs(tr.tail_residual),
                   max(0.3, 0.25 * abs(tr.direct_error_term))))
    grid = np.linspace(50.0, 400.0, 5000 if fast else 20000)
    slope = hd.decay_slope_estimate(PExponent(1), math.pi / 4, grid)
    out.append(_le(s, "circle decay slope near -1/2", abs(slope + 0.5), 0.15))
    # for 2/p >= 3 the quoted rate -p/2 is a uniform bound, so the
    # envelope must decay at least that fast
    for q in (3, 4):
        slope = hd.decay_slope_estimate(PExponent(q), math.pi / 4, grid)
        out.append(_le(s, f"q={q} decay within the -p/2 bound", slope + 1.0 / q, 0.15))
    return out


SUITES: Dict[str, Callable[[bool, int], List[CheckResult]]] = {
    "numkernel": suite_numkernel,
    "pgeom": suite_pgeom,
    "genbessel": suite_genbessel,
    "erdkober": suite_erdkober,
    "hardy": suite_hardy,
}


def run_suites(filter_text: str = "", fast: bool = False, threads: int = 1) -> List[CheckResult]:
    names = [n for n in SUITES if not filter_text or filter_text in n]
    if not names:
        raise KeyError(f"no suite matches {filter_text!r}")
    results = []
    for name in names:
        results.extend(SUITES[name](fast, threads))
    return results
