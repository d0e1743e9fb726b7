"""Erdelyi-Kober fractional integrals and derivatives with lower limit 0.

With the substitution u = tau^p the operator

    I^alpha_{p,eta} f(r) = p/Gamma(alpha) int_0^1 tau^(p(eta+1)-1) f(tau r) (1-tau^p)^(alpha-1) dtau

becomes 1/Gamma(alpha) int_0^1 u^eta (1-u)^(alpha-1) f(u^(1/p) r) du, a beta
weight times a smooth function, which the double-exponential rule handles
at full accuracy even for alpha < 1.

Functions passed in are expected to be vectorized over 1-D arrays; plain
scalar callables are accepted too and are mapped point by point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .errors import DomainError
from .genbessel import (GenBesselParams, bessel_batch, gen_bessel_series,
                        radial_function)
from .numkernel import (DiffSpec, QuadratureSpec, beta_weighted_integral,
                        central_diff, log_gamma)
from .pgeom import PExponent, as_pexp, from_distorted_polar, DistortedPolar, p_norm


@dataclass(frozen=True)
class EKParams:
    alpha: float
    eta: float
    p: float = 2.0

    def __post_init__(self):
        if isinstance(self.p, PExponent):
            object.__setattr__(self, "p", self.p.p)
        if not self.alpha > 0:
            raise DomainError("alpha must be > 0")
        if not self.p > 0:
            raise DomainError("p must be > 0")


def recurrence_eta(p: Union[PExponent, int], omega: float) -> float:
    """The eta for which I^gamma maps J_omega,phi to (p/r)^gamma J_omega+gamma,phi."""
    pp = as_pexp(p).p
    return (1.0 - 1.0 / pp) * omega + 2.0 / pp - 1.0


def _vectorized(f: Callable) -> Callable:
    probe = np.array([0.25, 0.5])
    try:
        out = np.asarray(f(probe), dtype=float)
        if out.shape == probe.shape:
            return f
    except (TypeError, ValueError):
        pass
    return lambda t: np.array([float(f(float(v))) for v in np.ravel(t)])


def _inv_gamma(a: float) -> float:
    return 1.0 / math.gamma(a) if a < 170 else math.exp(-log_gamma(a))


def ek_integral(f: Callable, params: EKParams, r: float,
                quad: QuadratureSpec = QuadratureSpec(), *, full_output: bool = False):
    """(I^alpha_{0+;p,eta} f)(r)."""
    if not r > 0:
        raise DomainError("r must be > 0")
    if not params.eta > -1:
        raise DomainError("eta must exceed -1 for the integral to exist")
    fv = _vectorized(f)
    inv_p = 1.0 / params.p

    def g(u):
        return fv(u ** inv_p * r)

    val, err = beta_weighted_integral(g, params.eta, params.alpha - 1.0, quad,
                                      full_output=True)
    scale = _inv_gamma(params.alpha)
    return (val * scale, err * scale) if full_output else val * scale


def ek_derivative(f: Callable, params: EKParams, r: float,
                  quad: QuadratureSpec = QuadratureSpec(),
                  diff: Optional[DiffSpec] = None) -> float:
    """(D^alpha_{0+;p,eta} f)(r) for 0 < alpha < 1.

    The outer derivative is a Richardson-extrapolated central difference
    of r -> r^(p(1+eta)) (I^(1-alpha)_{p,eta+alpha} f)(r).
    """
    if not 0 < params.alpha < 1:
        raise DomainError("the derivative is implemented for 0 < alpha < 1")
    if not r > 0:
        raise DomainError("r must be > 0")
    if diff is None:
        diff = DiffSpec(1e-4 * max(1.0, r), 1)
    if diff.step >= r:
        raise DomainError("difference step reaches r = 0")
    inner_quad = replace(quad, rel_tol=min(quad.rel_tol, 1e-10))
    inner = EKParams(1.0 - params.alpha, params.eta + params.alpha, params.p)
    fv = _vectorized(f)
    pp = params.p
    power = pp * (1.0 + params.eta)

    def outer(t):
        return t ** power * ek_integral(fv, inner, t, inner_quad)

    d = central_diff(outer, r, diff)
    return r ** (-pp * params.eta) * d / (pp * r ** (pp - 1.0))


def _check_recurrence(p: PExponent, omega: float, gamma: float) -> float:
    if not gamma > 0:
        raise DomainError("gamma must be > 0")
    if omega < 0:
        raise DomainError("omega must be >= 0")
    eta = recurrence_eta(p, omega)
    if not eta > -1:
        raise DomainError(f"weight exponent {eta:g} is not integrable")
    return eta


def integral_recurrence_J(p: Union[PExponent, int], omega: float, gamma: float,
                          x: Sequence[float],
                          quad: QuadratureSpec = QuadratureSpec()) -> float:
    """Right-hand side of the order-raising integral for J_omega+gamma^[p](x)."""
    pe = as_pexp(p)
    eta = _check_recurrence(pe, omega, gamma)
    x1, x2 = float(x[0]), float(x[1])
    nrm = p_norm((x1, x2), pe)
    if nrm == 0:
        raise DomainError("x must be nonzero")
    params = GenBesselParams(pe, omega)
    inv_p = 1.0 / pe.p

    def g(u):
        t = u ** inv_p
        return bessel_batch(params, t * x1, t * x2)

    val = beta_weighted_integral(g, eta, gamma - 1.0, quad)
    lead = math.exp(gamma * math.log(nrm / pe.p) - log_gamma(gamma))
    return lead * val


def integral_recurrence_scriptJ(p: Union[PExponent, int], omega: float, gamma: float,
                                phi: float, r: float,
                                quad: QuadratureSpec = QuadratureSpec()) -> float:
    """Right-hand side of the order-raising integral for J_omega+gamma,phi(r)."""
    pe = as_pexp(p)
    eta = _check_recurrence(pe, omega, gamma)
    if not r > 0:
        raise DomainError("r must be > 0")
    f = radial_function(GenBesselParams(pe, omega), phi, r)
    val = ek_integral(f, EKParams(gamma, eta, pe.p), r, quad)
    # I^gamma J_omega = (p/r)^gamma J_omega+gamma
    return val * (r / pe.p) ** gamma


def multivar_ek(f: Callable, kappa: float, eta: float, alpha: float,
                x: Sequence[float], quad: QuadratureSpec = QuadratureSpec()) -> float:
    """P_kappa(eta, alpha) f(x) = 1/Gamma(alpha) int_0^1 t^eta f(t^kappa x) (1-t)^(alpha-1) dt.

    ``f`` takes an (n, 2) array of points and returns n values; a callable
    on single points is also accepted.
    """
    x1, x2 = float(x[0]), float(x[1])
    if x1 == 0 and x2 == 0:
        raise DomainError("x must be nonzero")
    if not alpha > 0 or not eta > -1:
        raise DomainError("need alpha > 0 and eta > -1")

    def fv(pts):
        try:
            out = np.asarray(f(pts), dtype=float)
            if out.shape == (pts.shape[0],):
                return out
        except (TypeError, ValueError, IndexError):
            pass
        return np.array([float(f((a, b))) for a, b in pts])

    def g(t):
        sc = t ** kappa
        return fv(np.column_stack((sc * x1, sc * x2)))

    return beta_weighted_integral(g, eta, alpha - 1.0, quad) * _inv_gamma(alpha)


def diff_formula_residual(p: Union[PExponent, int], omega: float, phi: float, r: float,
                          diff: DiffSpec = DiffSpec()) -> float:
    """|d/dr[r^e J_omega+1,phi(r)] - r^e J_omega,phi(r)| with e = 1 + (p-1) omega."""
    pe = as_pexp(p)
    if not r > 0:
        raise DomainError("r must be > 0")
    e = 1.0 + (pe.p - 1.0) * omega
    top = r + diff.step
    upper = radial_function(GenBesselParams(pe, omega + 1.0), phi, top)
    lower = radial_function(GenBesselParams(pe, omega), phi, r)
    lhs = central_diff(lambda t: t ** e * float(upper(np.array([t]))[0]), r, diff)
    rhs = r ** e * float(lower(np.array([r]))[0])
    return abs(lhs - rhs)
