"""Scalar special functions, quadrature, differentiation and summation.

Everything here is a pure function of its inputs.  Integrands handed to
:func:`integrate` and :func:`beta_weighted_integral` must be vectorized:
they receive a 1-D ``numpy`` array of abscissae and return an array of the
same shape.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import Decimal, localcontext
from functools import lru_cache
from typing import Callable, Iterable, Optional

import numpy as np

from .errors import DomainError, QuadratureError

# Crossover between the power series and the Hankel asymptotic form.
BESSEL_CROSSOVER = 18.0

_GL_ORDER = 20
_LOG10_E = math.log10(math.e)

QUAD_METHODS = ("composite-gauss-legendre", "double-exponential")
SINGULARITY_HINTS = ("none", "left", "right", "both")


@dataclass(frozen=True)
class SeriesControl:
    """Truncation contract for power series.

    ``compensated`` selects extended-precision term generation and
    accumulation; with it off, terms are formed and summed in binary64.
    """

    max_terms: int = 400
    tail_tol: float = 1e-17
    compensated: bool = True

    def __post_init__(self):
        if self.max_terms < 1:
            raise DomainError("max_terms must be >= 1")
        if not self.tail_tol > 0:
            raise DomainError("tail_tol must be > 0")


@dataclass(frozen=True)
class QuadratureSpec:
    """Accuracy contract for one-dimensional quadrature.

    ``method=None`` picks double-exponential when an endpoint singularity is
    declared and composite Gauss-Legendre otherwise.
    """

    method: Optional[str] = None
    rel_tol: float = 1e-12
    abs_tol: float = 1e-14
    max_nodes: int = 400_000
    endpoint_singularity: str = "none"

    def __post_init__(self):
        if self.method is not None and self.method not in QUAD_METHODS:
            raise DomainError(f"unknown quadrature method {self.method!r}")
        if self.endpoint_singularity not in SINGULARITY_HINTS:
            raise DomainError(
                f"unknown singularity hint {self.endpoint_singularity!r}")
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise DomainError("quadrature tolerances must be > 0")
        if self.max_nodes < 8:
            raise DomainError("max_nodes must be >= 8")

    @property
    def resolved_method(self) -> str:
        if self.method is not None:
            return self.method
        if self.endpoint_singularity == "none":
            return "composite-gauss-legendre"
        return "double-exponential"

    def tolerance(self, value: float) -> float:
        return max(self.abs_tol, self.rel_tol * abs(value))


@dataclass(frozen=True)
class DiffSpec:
    step: float = 1e-3
    richardson_levels: int = 2

    def __post_init__(self):
        if not self.step > 0:
            raise DomainError("step must be > 0")
        if self.richardson_levels < 0:
            raise DomainError("richardson_levels must be >= 0")


# --------------------------------------------------------------------------
# Gamma and beta


def log_gamma(x: float) -> float:
    """ln Gamma(x) for x > 0."""
    if not (isinstance(x, (int, float)) and math.isfinite(x)) or x <= 0:
        raise DomainError(f"log_gamma needs a positive finite argument, got {x!r}")
    return math.lgamma(x)


def beta(a: float, b: float) -> float:
    """B(a, b) = Gamma(a) Gamma(b) / Gamma(a + b)."""
    if not (a > 0 and b > 0) or not (math.isfinite(a) and math.isfinite(b)):
        raise DomainError(f"beta needs positive arguments, got ({a!r}, {b!r})")
    if a + b < 170.0:
        return math.gamma(a) * math.gamma(b) / math.gamma(a + b)
    return math.exp(log_gamma(a) + log_gamma(b) - log_gamma(a + b))


# --------------------------------------------------------------------------
# Classical Bessel function of the first kind


def classical_bessel_j(omega: float, r: float,
                       crossover: float = BESSEL_CROSSOVER) -> float:
    """J_omega(r) for real order omega >= 0 and r >= 0.

    The power series is summed in extended precision below the crossover
    radius (raised to ``1.5 omega**2`` for large orders, where the Hankel
    expansion stops being useful); the Hankel asymptotic expansion is used
    beyond it.
    """
    if omega < 0 or not math.isfinite(omega):
        raise DomainError("classical_bessel_j: order must be >= 0")
    if r < 0 or not math.isfinite(r):
        raise DomainError("classical_bessel_j: argument must be >= 0")
    if r == 0.0:
        return 1.0 if omega == 0 else 0.0
    if r < max(crossover, 1.5 * omega * omega):
        return _bessel_series(omega, r)
    return _bessel_hankel(omega, r)


def _bessel_series(omega: float, r: float) -> float:
    prec = 32 + int(_LOG10_E * r)
    with localcontext() as ctx:
        ctx.prec = prec
        h2 = (Decimal(r) / 2) ** 2
        om = Decimal(omega)
        term = Decimal(1)
        total = Decimal(1)
        tiny = Decimal(10) ** -28
        k = 0
        while True:
            k += 1
            term = -term * h2 / (k * (k + om))
            total += term
            if k > r / 2 and abs(term) < tiny:
                break
        series = float(total)
    half = r / 2.0
    try:
        pref = math.pow(half, omega) / math.gamma(omega + 1.0)
    except OverflowError:
        pref = math.exp(omega * math.log(half) - math.lgamma(omega + 1.0))
    return pref * series


def _bessel_hankel(omega: float, r: float) -> float:
    mu = 4.0 * omega * omega
    p_sum = 1.0
    q_sum = 0.0
    a = 1.0
    prev = math.inf
    k = 0
    while True:
        k += 1
        a = a * (mu - (2 * k - 1) ** 2) / (k * 8.0 * r)
        mag = abs(a)
        if mag == 0.0 or mag > prev:
            break
        # a_k enters P for even k and Q for odd k with alternating signs
        if k % 2 == 0:
            p_sum += a if (k // 2) % 2 == 0 else -a
        else:
            q_sum += a if ((k - 1) // 2) % 2 == 0 else -a
        if mag < 1e-18:
            break
        prev = mag
    theta = (0.5 * omega + 0.25) * math.pi
    cos_chi = math.cos(r) * math.cos(theta) + math.sin(r) * math.sin(theta)
    sin_chi = math.sin(r) * math.cos(theta) - math.cos(r) * math.sin(theta)
    return math.sqrt(2.0 / (math.pi * r)) * (p_sum * cos_chi - q_sum * sin_chi)


# --------------------------------------------------------------------------
# Quadrature


@lru_cache(maxsize=None)
def gauss_legendre(order: int):
    """Gauss-Legendre nodes and weights on [-1, 1] (read-only arrays)."""
    x, w = np.polynomial.legendre.leggauss(order)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def composite_gl_rule(a: float, b: float, panels: int, order: int = _GL_ORDER):
    """Nodes and weights of a composite Gauss-Legendre rule on [a, b]."""
    x, w = gauss_legendre(order)
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * (edges[1:] - edges[:-1])
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def _gl_adaptive(f, a, b, spec, panels):
    used = 0
    prev = None
    diff = math.inf
    while True:
        nodes, weights = composite_gl_rule(a, b, panels)
        used += nodes.size
        est = math.fsum(np.asarray(f(nodes), dtype=float) * weights)
        if prev is not None:
            diff = abs(est - prev)
            if diff <= spec.tolerance(est):
                return est, diff
        if used + 2 * nodes.size > spec.max_nodes:
            raise QuadratureError(
                f"composite Gauss-Legendre did not converge within "
                f"{spec.max_nodes} nodes", estimate=est, error=diff)
        prev = est
        panels *= 2


def _de_logistic(t):
    """Map t -> (u, 1-u, du/dt) for the tanh-sinh rule on [0, 1].

    Both u and 1-u are formed without cancellation.
    """
    z = math.pi * np.sinh(t)
    log_u = -np.logaddexp(0.0, -z)
    log_v = -np.logaddexp(0.0, z)
    u = np.exp(log_u)
    v = np.exp(log_v)
    jac = math.pi * np.cosh(t) * u * v
    return u, v, jac, log_u, log_v


def _de_level_nodes(level, t_max):
    # level 0 holds t = k/2; level L > 0 adds the odd multiples of 2**-(L+1)
    h = 0.5 ** (level + 1)
    if level == 0:
        n = int(math.floor(t_max / h))
        k = np.arange(-n, n + 1)
    else:
        n = int(math.floor((t_max / h - 1) / 2))
        k = 2 * np.arange(-n - 1, n + 1) + 1
        k = k[np.abs(k) * h <= t_max]
    return k * h, h


def _de_adaptive(partial_sum, spec, max_level=12):
    """Drive level refinement of a trapezoidal sum in the DE variable.

    ``partial_sum(t)`` returns the sum of integrand*jacobian over the nodes
    ``t``; refinement stops once two consecutive levels agree.
    """
    total = 0.0
    est = None
    prev = None
    used = 0
    diff = math.inf
    for level in range(max_level + 1):
        t, h = _de_level_nodes(level, spec_t_max := partial_sum.t_max)
        used += t.size
        total += partial_sum(t)
        est = total * h
        if prev is not None and level >= 2:
            diff = abs(est - prev)
            if diff <= spec.tolerance(est):
                return est, diff
        if used * 2 > spec.max_nodes:
            break
        prev = est
    raise QuadratureError("double-exponential quadrature did not converge",
                          estimate=est, error=diff)


class _GenericDESum:
    t_max = 6.0

    def __init__(self, f, a, b, singularity):
        self.f = f
        self.a = a
        self.b = b
        self.singularity = singularity

    def __call__(self, t):
        u, v, jac, _, _ = _de_logistic(t)
        width = self.b - self.a
        if self.singularity == "right":
            x = self.b - width * v
        else:
            x = self.a + width * u
        keep = (x > self.a) & (x < self.b) & (jac > 0)
        if not np.any(keep):
            return 0.0
        vals = np.asarray(self.f(x[keep]), dtype=float)
        return math.fsum(vals * jac[keep]) * width


def integrate(f: Callable, a: float, b: float,
              spec: QuadratureSpec = QuadratureSpec(), *,
              oscillations: float = 0.0, full_output: bool = False):
    """Integrate a vectorized ``f`` over [a, b].

    ``oscillations`` is an optional estimate of the number of sign changes
    of ``f`` on the interval; it sizes the initial composite rule.  With
    ``full_output`` the pair ``(value, error_estimate)`` is returned.
    Raises :class:`QuadratureError` (with the best estimate attached) when
    the node budget runs out.

    ``f`` sees absolute abscissae, so mass closer to a nonzero endpoint than
    its rounding unit is lost; for a blow-up at such an endpoint prefer
    :func:`beta_weighted_integral`.
    """
    if not a < b:
        raise DomainError("integrate needs a < b")
    method = spec.resolved_method
    if method == "composite-gauss-legendre":
        panels = max(2, int(math.ceil(oscillations / 2.0)) + 1)
        value, err = _gl_adaptive(f, a, b, spec, panels)
    else:
        value, err = _de_adaptive(
            _GenericDESum(f, a, b, spec.endpoint_singularity), spec)
    return (value, err) if full_output else value


class _BetaDESum:
    def __init__(self, g, a_exp, b_exp):
        self.g = g
        self.a1 = a_exp + 1.0
        self.b1 = b_exp + 1.0
        # weights fall below e**-45 relative beyond t_max
        self.t_max = math.asinh(45.0 / (math.pi * min(self.a1, self.b1, 1.0)))

    def __call__(self, t):
        u, v, _, log_u, log_v = _de_logistic(t)
        w = math.pi * np.cosh(t) * np.exp(self.a1 * log_u + self.b1 * log_v)
        keep = w > 0
        if not np.any(keep):
            return 0.0
        vals = np.asarray(self.g(u[keep]), dtype=float)
        return math.fsum(vals * w[keep])


def beta_weighted_integral(g: Callable, a_exp: float, b_exp: float,
                           spec: QuadratureSpec = QuadratureSpec(), *,
                           full_output: bool = False):
    """Integrate ``u**a_exp * (1-u)**b_exp * g(u)`` over [0, 1].

    The algebraic weight is folded into the double-exponential rule in log
    form, so endpoint singularities with exponents above -1 are integrated
    at full accuracy; ``g`` itself should be bounded and smooth inside.
    """
    if not (a_exp > -1 and b_exp > -1):
        raise DomainError("beta weight exponents must exceed -1")
    value, err = _de_adaptive(_BetaDESum(g, a_exp, b_exp), spec)
    return (value, err) if full_output else value


# --------------------------------------------------------------------------
# Differentiation and summation


def central_diff(f: Callable[[float], float], r: float,
                 spec: DiffSpec = DiffSpec()) -> float:
    """Central difference derivative with Richardson extrapolation."""
    h = spec.step
    table = [(f(r + h) - f(r - h)) / (2 * h)]
    for level in range(1, spec.richardson_levels + 1):
        h *= 0.5
        row = [(f(r + h) - f(r - h)) / (2 * h)]
        for j in range(1, level + 1):
            factor = 4.0 ** j
            row.append(row[j - 1] + (row[j - 1] - table[j - 1]) / (factor - 1))
        table = row
    return table[-1]


class Accumulator:
    """Running sum carrying a second word for the rounding error (Neumaier)."""

    __slots__ = ("_s", "_c")

    def __init__(self, value: float = 0.0):
        self._s = float(value)
        self._c = 0.0

    def add(self, x: float) -> None:
        s = self._s
        t = s + x
        if abs(s) >= abs(x):
            self._c += (s - t) + x
        else:
            self._c += (x - t) + s
        self._s = t

    @property
    def value(self) -> float:
        return self._s + self._c


def compensated_sum(terms: Iterable[float]) -> float:
    acc = Accumulator()
    for x in terms:
        acc.add(float(x))
    return acc.value
