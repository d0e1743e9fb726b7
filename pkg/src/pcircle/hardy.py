"""Partial sums of the generalized Hardy identity and related diagnostics.

For p = 2/q the error term P_p(r) is compared with

    p Gamma(1/p)^2 / (2 pi) * r * sum_{shells s} s^(-1/p) sum_{phi in shell} J_1,phi(2 pi s^(1/p) r)

truncated at s <= s_max.  The radial argument of each summand is the
image of the lattice point itself, x = 2 pi r n, so each term is J_1^[p]
evaluated at 2 pi r n; points related by sign changes or a swap share a
value, which is computed once per canonical pair 0 <= |n1| <= |n2|.

Accumulation order is fixed: shells ascending in s, points within a shell
in lexicographic (n1, n2) order, one running compensated sum.  Evaluation
is split into fixed blocks of canonical pairs independent of the thread
count, so results are bit-identical for any number of threads.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from .errors import DomainError, EvaluationError, InsufficientDataError, PCircleError
from .genbessel import (EvalPath, GenBesselParams, gen_bessel_series, j0_batch,
                        j1_batch)
from .numkernel import (Accumulator, QuadratureSpec, SeriesControl,
                        classical_bessel_j)
from .pgeom import (PExponent, as_pexp, distorted_angles, error_term_direct,
                    orbit_table, r2_function)

THREADS_ENV = "PCIRCLE_THREADS"
DEFAULT_WINDOW = 8
_BLOCK = 256


def default_threads() -> int:
    raw = os.environ.get(THREADS_ENV, "").strip()
    if raw:
        try:
            n = int(raw)
        except ValueError:
            raise DomainError(f"{THREADS_ENV} must be an integer, got {raw!r}")
        if n < 1:
            raise DomainError(f"{THREADS_ENV} must be >= 1")
        return n
    return 1


@dataclass(frozen=True)
class HardySumConfig:
    p: PExponent
    r: float
    s_max: float
    path: EvalPath = EvalPath()
    ctrl: SeriesControl = SeriesControl()
    quad: QuadratureSpec = QuadratureSpec()
    threads: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "p", as_pexp(self.p))
        if not (self.r > 0) or not math.isfinite(self.r):
            raise DomainError("r must be positive and finite")
        if not math.isfinite(self.s_max):
            raise DomainError("s_max must be finite")
        if self.threads is not None and self.threads < 1:
            raise DomainError("threads must be >= 1")


@dataclass(frozen=True)
class Checkpoint:
    s_max: float
    partial_sum: float
    direct_error_term: float
    residual: float
    envelope: float


@dataclass
class PartialSumTrace:
    checkpoints: List[Checkpoint]
    tail_average: float
    window: int
    direct_error_term: float
    near_boundary: bool = False
    shells: int = 0
    points: int = 0

    @property
    def tail_residual(self) -> float:
        return self.tail_average - self.direct_error_term

    @property
    def envelope(self) -> List[float]:
        return [c.envelope for c in self.checkpoints]


@dataclass
class _ShellSums:
    s_values: np.ndarray
    partial: np.ndarray
    points: int


def hardy_prefactor(p: PExponent) -> float:
    return p.p * math.gamma(p.q / 2.0) ** 2 / (2.0 * math.pi)


def _pair_values(cfg: HardySumConfig, a: np.ndarray, b: np.ndarray,
                 s_of_pair: np.ndarray) -> np.ndarray:
    """J_1^[p](2 pi r (a, b)) for every canonical pair, in input order."""
    q = cfg.p.q
    two_pi_r = 2.0 * math.pi * cfg.r
    x1 = two_pi_r * a.astype(float)
    x2 = two_pi_r * b.astype(float)
    arg = two_pi_r * s_of_pair ** (q / 2.0)
    mode = cfg.path.mode
    if mode == "auto":
        use_series = arg <= cfg.path.series_arg_limit
    elif mode == "series":
        use_series = np.ones(a.size, dtype=bool)
    else:
        use_series = np.zeros(a.size, dtype=bool)
    out = np.empty(a.size, dtype=float)
    params = GenBesselParams(cfg.p, 1.0)
    for i in np.nonzero(use_series)[0]:
        try:
            out[i] = gen_bessel_series(params, (x1[i], x2[i]), cfg.ctrl,
                                       arg_limit=cfg.path.series_arg_limit)
        except PCircleError as exc:
            raise EvaluationError(f"series term failed: {exc}", s=float(s_of_pair[i]),
                                  phi=float(distorted_angles(q, a[i:i + 1], b[i:i + 1])[0])
                                  ) from exc
    rest = np.nonzero(~use_series)[0]
    blocks = [rest[i:i + _BLOCK] for i in range(0, rest.size, _BLOCK)]

    def work(idx):
        return j1_batch(q, x1[idx], x2[idx])

    threads = cfg.threads or default_threads()
    if threads > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(work, blocks))
    else:
        results = [work(idx) for idx in blocks]
    for idx, vals in zip(blocks, results):
        bad = ~np.isfinite(vals)
        if bad.any():
            j = idx[np.argmax(bad)]
            raise EvaluationError("non-finite integral-path term", s=float(s_of_pair[j]),
                                  phi=float(distorted_angles(q, a[j:j + 1], b[j:j + 1])[0]))
        out[idx] = vals
    return out


def _expand_orbits(a: np.ndarray, b: np.ndarray, shell: np.ndarray):
    """Per-point (shell, n1, n2, pair) arrays sorted in summation order."""
    pair = np.arange(a.size)
    parts = []
    zero = a == 0
    diag = (a == b) & ~zero
    gen = ~zero & ~diag
    za, zb, zp = a[zero], b[zero], pair[zero]
    for n1, n2 in ((0 * zb, zb), (0 * zb, -zb), (zb, 0 * zb), (-zb, 0 * zb)):
        parts.append((n1, n2, zp))
    da, dp = a[diag], pair[diag]
    for s1 in (1, -1):
        for s2 in (1, -1):
            parts.append((s1 * da, s2 * da, dp))
    ga, gb, gp = a[gen], b[gen], pair[gen]
    for u, v in ((ga, gb), (gb, ga)):
        for s1 in (1, -1):
            for s2 in (1, -1):
                parts.append((s1 * u, s2 * v, gp))
    n1 = np.concatenate([x[0] for x in parts])
    n2 = np.concatenate([x[1] for x in parts])
    pr = np.concatenate([x[2] for x in parts])
    sh = shell[pr]
    order = np.lexsort((n2, n1, sh))
    return sh[order], n1[order], n2[order], pr[order]


def _shell_sums(cfg: HardySumConfig, s_top: float) -> _ShellSums:
    if s_top < 1:
        return _ShellSums(np.zeros(0), np.zeros(0), 0)
    tab = orbit_table(cfg.p, s_top)
    s_pair = tab.s_values[tab.shell]
    vals = _pair_values(cfg, tab.a, tab.b, s_pair)
    lead = hardy_prefactor(cfg.p) * cfg.r
    weight = lead / tab.s_values ** (cfg.p.q / 2.0)
    sh, _, _, pr = _expand_orbits(tab.a, tab.b, tab.shell)
    terms = (weight[sh] * vals[pr]).tolist()
    ends = np.r_[np.nonzero(np.diff(sh))[0], sh.size - 1].tolist()
    partial = np.empty(len(ends), dtype=float)
    acc = Accumulator()
    start = 0
    for j, end in enumerate(ends):
        for t in terms[start:end + 1]:
            acc.add(t)
        partial[j] = acc.value
        start = end + 1
    return _ShellSums(tab.s_values, partial, sh.size)


def hardy_partial_sum(cfg: HardySumConfig) -> float:
    """Right-hand side of the generalized identity truncated at s <= s_max."""
    sums = _shell_sums(cfg, cfg.s_max)
    return float(sums.partial[-1]) if sums.partial.size else 0.0


def hardy_summand(p: PExponent, r: float, a: int, b: int) -> float:
    """Contribution of the single lattice point (a, b) to the sum."""
    pe = as_pexp(p)
    s = abs(a) ** pe.p + abs(b) ** pe.p
    x = 2.0 * math.pi * r
    val = float(j1_batch(pe.q, np.array([x * a]), np.array([x * b]))[0])
    return hardy_prefactor(pe) * r / s ** (pe.q / 2.0) * val


def classical_hardy_sum(r: float, k_max: int) -> float:
    """r sum_{k <= k_max} R(k) k^(-1/2) J_1(2 pi sqrt(k) r) for the circle."""
    if not r > 0:
        raise DomainError("r must be > 0")
    acc = Accumulator()
    for k in range(1, int(k_max) + 1):
        rk = r2_function(k)
        if rk:
            sk = math.sqrt(k)
            acc.add(r * rk / sk * classical_bessel_j(1.0, 2.0 * math.pi * sk * r))
    return acc.value


def linear_schedule(s_max: float, count: int = 64) -> List[float]:
    if count < 1:
        raise DomainError("schedule needs at least one checkpoint")
    return [s_max * (j + 1) / count for j in range(count)]


def convergence_trace(cfg: HardySumConfig, schedule: Optional[Sequence[float]] = None,
                      window: int = DEFAULT_WINDOW) -> PartialSumTrace:
    """Partial sums at each checkpoint against the directly counted P_p(r).

    Terms are computed once up to the last checkpoint.  The envelope of a
    checkpoint is the largest |residual| over the shells since the
    previous checkpoint (the first one looks back to half its value).
    """
    if window < 1:
        raise DomainError("window must be >= 1")
    if schedule is None:
        schedule = linear_schedule(cfg.s_max)
    sched = [float(s) for s in schedule]
    if not sched:
        raise DomainError("empty schedule")
    if any(b <= a for a, b in zip(sched, sched[1:])):
        raise DomainError("schedule must be strictly ascending")
    direct = error_term_direct(cfg.p, cfg.r)
    sums = _shell_sums(cfg, sched[-1])
    res = sums.partial - direct.value
    cps = []
    lo = sched[0] / 2.0
    for c in sched:
        n_in = int(np.searchsorted(sums.s_values, c * (1 + 1e-12), side="right"))
        ps = float(sums.partial[n_in - 1]) if n_in else 0.0
        n_lo = int(np.searchsorted(sums.s_values, lo * (1 + 1e-12), side="right"))
        seg = res[n_lo:n_in]
        env = float(np.max(np.abs(seg))) if seg.size else abs(ps - direct.value)
        cps.append(Checkpoint(c, ps, direct.value, ps - direct.value, env))
        lo = c
    tail = [c.partial_sum for c in cps[-window:]]
    return PartialSumTrace(cps, math.fsum(tail) / len(tail), window, direct.value,
                           direct.near_boundary, int(sums.s_values.size), sums.points)


# --------------------------------------------------------------------------
# Decay of the order-zero radial function


@dataclass(frozen=True)
class DecayFit:
    slope: float
    intercept: float
    r_peaks: np.ndarray
    peaks: np.ndarray


def decay_envelope(p: PExponent, phi: float, r_grid: Sequence[float],
                   quad: QuadratureSpec = QuadratureSpec()) -> DecayFit:
    """Local maxima of |J_0,phi| on the grid and their log-log fit."""
    pe = as_pexp(p)
    r = np.asarray(r_grid, dtype=float)
    if r.ndim != 1 or r.size < 3 or np.any(np.diff(r) <= 0) or r[0] <= 0:
        raise DomainError("r_grid must be ascending, positive and have >= 3 points")
    c, s = math.cos(phi), math.sin(phi)
    ux = math.copysign(abs(c) ** pe.q, c) if c else 0.0
    uy = math.copysign(abs(s) ** pe.q, s) if s else 0.0
    f = np.abs(j0_batch(pe.q, r * ux, r * uy))
    idx = np.nonzero((f[1:-1] > f[:-2]) & (f[1:-1] >= f[2:]))[0] + 1
    if idx.size < 3:
        raise InsufficientDataError(
            f"only {idx.size} envelope maxima on the grid; need at least 3")
    slope, icpt = np.polyfit(np.log(r[idx]), np.log(f[idx]), 1)
    return DecayFit(float(slope), float(icpt), r[idx], f[idx])


def decay_slope_estimate(p: PExponent, phi: float, r_grid: Sequence[float],
                         quad: QuadratureSpec = QuadratureSpec()) -> float:
    return decay_envelope(p, phi, r_grid, quad).slope
