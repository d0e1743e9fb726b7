"""Geometry of astroid-type p-circles and their lattice points.

The exponent is carried as the integer ``q = 2/p``.  Shell values
``s = |n1|^p + |n2|^p`` are algebraic numbers: writing ``a**2 = k**q * m``
with ``m`` free of q-th powers gives ``a**p = k * m**(1/q)``, and since the
q-th roots of distinct q-th-power-free integers are linearly independent
over the rationals, the multiset of ``(m, k)`` pairs identifies ``s``
exactly.  Shells are grouped on that key, never on a float tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from decimal import Decimal, localcontext
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import DomainError

TWO_PI = 2.0 * math.pi
BOUNDARY_REL = 1e-9
_INT64_MAX = np.iinfo(np.int64).max


@dataclass(frozen=True)
class PExponent:
    """The exponent p = 2/q of an astroid-type p-circle."""

    q: int

    def __post_init__(self):
        if isinstance(self.q, bool) or not isinstance(self.q, (int, np.integer)):
            raise DomainError(f"q must be a positive integer, got {self.q!r}")
        if self.q < 1:
            raise DomainError(f"q must be >= 1, got {self.q}")
        object.__setattr__(self, "q", int(self.q))

    @property
    def p(self) -> float:
        return 2.0 / self.q

    @classmethod
    def from_p(cls, p: float) -> "PExponent":
        q = round(2.0 / p)
        if q < 1 or abs(2.0 / q - p) > 1e-12 * p:
            raise DomainError(f"2/p must be a positive integer, got p={p!r}")
        return cls(q)

    def __str__(self):
        return f"p=2/{self.q}"


def as_pexp(p: Union[PExponent, int]) -> PExponent:
    if isinstance(p, PExponent):
        return p
    return PExponent(p)


@dataclass(frozen=True, order=True)
class LatticePoint:
    n1: int
    n2: int

    def __iter__(self):
        yield self.n1
        yield self.n2


@dataclass(frozen=True)
class DistortedPolar:
    r: float
    phi: float

    def __post_init__(self):
        if not self.r >= 0:
            raise DomainError(f"distorted radius must be >= 0, got {self.r!r}")


@dataclass
class Shell:
    """All lattice points with one common value s of |n1|^p + |n2|^p."""

    s: float
    key: tuple
    points: List[LatticePoint] = field(default_factory=list)
    angles: List[float] = field(default_factory=list)
    q: int = 1

    @property
    def multiplicity(self) -> int:
        return len(self.points)

    @property
    def bound(self) -> int:
        return cardinality_bound(self.q, self.key)


# --------------------------------------------------------------------------
# Norm and distorted polar coordinates


def p_norm(x: Sequence[float], p: Union[PExponent, int]) -> float:
    """(|x1|^p + |x2|^p)^(1/p), scaled to avoid overflow."""
    pe = as_pexp(p)
    a, b = abs(float(x[0])), abs(float(x[1]))
    big = max(a, b)
    if big == 0.0:
        return 0.0
    if pe.q == 1:
        return math.hypot(a, b)
    if pe.q == 2:
        return a + b
    pp = pe.p
    return big * ((a / big) ** pp + (b / big) ** pp) ** (1.0 / pp)


def from_distorted_polar(dp: DistortedPolar, p: Union[PExponent, int]):
    """Cartesian image (sgn(cos)r|cos|^q, sgn(sin)r|sin|^q) of (r, phi)."""
    q = as_pexp(p).q
    c, s = math.cos(dp.phi), math.sin(dp.phi)
    x1 = math.copysign(dp.r * abs(c) ** q, c) if c != 0 else 0.0
    x2 = math.copysign(dp.r * abs(s) ** q, s) if s != 0 else 0.0
    return (x1, x2)


def _angle_from_parts(q: int, x1: float, x2: float) -> float:
    if q == 1:
        base = math.atan2(abs(x2), abs(x1))
    else:
        base = math.atan2(abs(x2) ** (1.0 / q), abs(x1) ** (1.0 / q))
    if x1 >= 0 and x2 >= 0:
        phi = base
    elif x1 < 0 and x2 >= 0:
        phi = math.pi - base
    elif x1 < 0:
        phi = math.pi + base
    else:
        phi = TWO_PI - base
    if phi >= TWO_PI:
        phi -= TWO_PI
    return phi


def to_distorted_polar(x: Sequence[float], p: Union[PExponent, int]) -> DistortedPolar:
    pe = as_pexp(p)
    x1, x2 = float(x[0]), float(x[1])
    if x1 == 0.0 and x2 == 0.0:
        raise DomainError("the distorted angle of the origin is undefined")
    return DistortedPolar(p_norm((x1, x2), pe), _angle_from_parts(pe.q, x1, x2))


def distorted_angles(q: int, n1: np.ndarray, n2: np.ndarray) -> np.ndarray:
    """Vectorized distorted angles of nonzero points."""
    n1 = np.asarray(n1, dtype=float)
    n2 = np.asarray(n2, dtype=float)
    base = np.arctan2(np.abs(n2) ** (1.0 / q), np.abs(n1) ** (1.0 / q))
    phi = np.where(n1 >= 0, np.where(n2 >= 0, base, TWO_PI - base),
                   np.where(n2 >= 0, math.pi - base, math.pi + base))
    return np.where(phi >= TWO_PI, phi - TWO_PI, phi)


# --------------------------------------------------------------------------
# Lattice counting


def area_term(p: Union[PExponent, int], r: float) -> float:
    """Area (2/p) Gamma(1/p)^2 / Gamma(2/p) r^2 enclosed by the p-circle."""
    if not r >= 0:
        raise DomainError("radius must be >= 0")
    q = as_pexp(p).q
    return q * math.gamma(q / 2.0) ** 2 / math.gamma(q) * r * r


def _inside_exact(q: int, a: int, b: int, r: float) -> Tuple[bool, bool]:
    """(strictly inside, on the curve) for |n| = (a, b) and radius r."""
    if q == 1:
        rr = Fraction(r) ** 2
        lhs = a * a + b * b
        return lhs < rr, lhs == rr
    if q == 2:
        fr = Fraction(r)
        return a + b < fr, a + b == fr
    with localcontext() as ctx:
        ctx.prec = 50
        e = Decimal(2) / Decimal(q)
        lhs = (Decimal(a) ** e if a else Decimal(0)) + (Decimal(b) ** e if b else Decimal(0))
        rhs = Decimal(r) ** e
        gap = rhs - lhs
        tiny = Decimal(10) ** -40 * rhs
        if abs(gap) <= tiny:
            return False, True
        return gap > 0, False


def _row_scan(q: int, r: float):
    """Row-by-row count of |n|_p < r; returns (count, min_gap, on_curve)."""
    pp = 2.0 / q
    top = int(math.floor(r))
    if top > 10**9:
        raise OverflowError("radius too large for the row scan")
    rp = r ** pp
    total = 0
    min_gap = math.inf
    on_curve = False
    chunk = 1 << 20
    for start in range(0, top + 1, chunk):
        a = np.arange(start, min(top, start + chunk - 1) + 1, dtype=np.int64)
        rest = rp - a.astype(float) ** pp
        b = np.where(rest > 0, np.maximum(rest, 0.0) ** (1.0 / pp), 0.0)
        # candidate largest |n2| strictly inside: ceil(b) - 1
        mx = np.ceil(b).astype(np.int64) - 1
        near = np.abs(b - np.rint(b)) <= BOUNDARY_REL * np.maximum(b, 1.0)
        near |= rest <= BOUNDARY_REL * rp
        for i in np.nonzero(near)[0]:
            ai = int(a[i])
            k = int(np.rint(b[i]))
            # settle the two integers closest to the bound exactly
            best = -1
            for cand in (k - 1, k, k + 1):
                if cand < 0:
                    continue
                inside, onc = _inside_exact(q, ai, cand, r)
                on_curve |= onc
                if inside:
                    best = max(best, cand)
            mx[i] = best
        valid = mx >= 0
        total += int(np.sum(np.where(valid, 2 * mx + 1, 0)
                            * np.where(a == 0, 1, 2)))
        # distance of the nearest points to the curve, in |.|_p units
        for kk in (mx, mx + 1):
            kk = np.maximum(kk, 0).astype(float)
            big = np.maximum(a.astype(float), kk)
            with np.errstate(divide="ignore", invalid="ignore"):
                nrm = np.where(big > 0, big * ((a / np.where(big > 0, big, 1)) ** pp
                                               + (kk / np.where(big > 0, big, 1)) ** pp)
                               ** (1.0 / pp), 0.0)
            if nrm.size:
                min_gap = min(min_gap, float(np.min(np.abs(nrm - r))))
        if total > _INT64_MAX:
            raise OverflowError("lattice count exceeds the 64-bit range")
    return total, min_gap, on_curve


def count_lattice_points(p: Union[PExponent, int], r: float) -> int:
    """N_p(r): the number of integer points strictly inside the p-circle."""
    pe = as_pexp(p)
    if not (r > 0) or not math.isfinite(r):
        raise DomainError("radius must be positive and finite")
    if area_term(pe, r) > 0.9 * _INT64_MAX:
        raise OverflowError("lattice count would exceed the 64-bit range")
    return _row_scan(pe.q, r)[0]


def count_brute_force(p: Union[PExponent, int], r: float) -> int:
    """O(r^2) double loop over the bounding square.

    Points are classified in binary64; those within 1e-9 relative of the
    curve are settled with the same exact rule as the scan.
    """
    pe = as_pexp(p)
    if not (r > 0) or not math.isfinite(r):
        raise DomainError("radius must be positive and finite")
    top = int(math.floor(r))
    a = np.arange(0, top + 1, dtype=float) ** pe.p
    s = a[:, None] + a[None, :]
    rp = r ** pe.p
    band = np.abs(s - rp) <= 1e-9 * rp
    inside = (s < rp) & ~band
    for i, j in zip(*np.nonzero(band)):
        inside[i, j] = _inside_exact(pe.q, int(i), int(j), r)[0]
    # quadrant weights: axes count twice, the origin once
    w = np.full(top + 1, 2, dtype=np.int64)
    w[0] = 1
    return int((w[:, None] * w[None, :] * inside).sum())


@dataclass(frozen=True)
class ErrorTerm:
    value: float
    count: int
    area: float
    near_boundary: bool
    min_gap: float

    def __float__(self):
        return self.value


def error_term_direct(p: Union[PExponent, int], r: float) -> ErrorTerm:
    """P_p(r) = N_p(r) - area, flagged when a lattice point sits near the curve."""
    pe = as_pexp(p)
    if not (r > 0) or not math.isfinite(r):
        raise DomainError("radius must be positive and finite")
    n, gap, on_curve = _row_scan(pe.q, r)
    area = area_term(pe, r)
    near = on_curve or gap < BOUNDARY_REL * r
    return ErrorTerm(n - area, n, area, bool(near), gap)


# --------------------------------------------------------------------------
# Shells


@lru_cache(maxsize=16)
def radical_parts(q: int, amax: int):
    """Arrays (k, m) with a**2 == k**q * m and m free of q-th powers, a <= amax."""
    a = np.arange(amax + 1, dtype=np.int64)
    if q == 1:
        k, m = a * a, np.ones_like(a)
    elif q == 2:
        k, m = a.copy(), np.ones_like(a)
    else:
        k = np.ones_like(a)
        m = np.ones_like(a)
        rest = a.copy()
        rest[0] = 1
        limit = int(math.isqrt(amax)) + 1
        sieve = np.ones(limit + 1, dtype=bool)
        sieve[:2] = False
        for i in range(2, int(math.isqrt(limit)) + 1):
            if sieve[i]:
                sieve[i * i::i] = False
        for pr in np.nonzero(sieve)[0]:
            pr = int(pr)
            idx = np.arange(pr, amax + 1, pr)
            e = np.zeros(idx.size, dtype=np.int64)
            sub = rest[idx]
            while True:
                hit = sub % pr == 0
                if not hit.any():
                    break
                e += hit
                sub = np.where(hit, sub // pr, sub)
            rest[idx] = sub
            e2 = 2 * e
            k[idx] *= pr ** (e2 // q)
            m[idx] *= pr ** (e2 % q)
        # what is left is 1 or a single prime to the first power
        big = rest > 1
        m[big] *= rest[big] ** 2
        m[0] = 1
        k[0] = 0
    k.setflags(write=False)
    m.setflags(write=False)
    return k, m


def _shell_key(ka, ma, kb, mb):
    parts: Dict[int, int] = {}
    for kk, mm in ((ka, ma), (kb, mb)):
        if kk:
            parts[mm] = parts.get(mm, 0) + kk
    return tuple(sorted(parts.items()))


def key_value(q: int, key: tuple) -> float:
    return math.fsum(k * (m ** (1.0 / q) if m != 1 else 1.0) for m, k in key)


def key_decimal(q: int, key: tuple, prec: int = 40) -> Decimal:
    with localcontext() as ctx:
        ctx.prec = prec
        inv = Decimal(1) / Decimal(q)
        return sum((Decimal(k) * (Decimal(m) ** inv if m != 1 else 1) for m, k in key),
                   Decimal(0))


def cardinality_bound(q: int, key: tuple) -> int:
    """4 * floor(s^(1/p)), exact.

    For a single radical, s = K m^(1/q) and s^q = K^q m is an integer, so
    floor(s^(q/2)) is an integer square root.
    """
    if len(key) == 1:
        m, k = key[0]
        return 4 * math.isqrt(k ** q * m)
    # two radicals never give an integer s^(q/2); 50 digits settle the floor
    with localcontext() as ctx:
        ctx.prec = 50
        v = key_decimal(q, key, 50) ** (Decimal(q) / 2)
        return 4 * int(v)


def _s_within(q: int, ka, ma, kb, mb, s_max: float) -> bool:
    with localcontext() as ctx:
        ctx.prec = 50
        v = key_decimal(q, _shell_key(ka, ma, kb, mb), 50)
        return v <= Decimal(s_max) * (1 + Decimal(10) ** -40)


@dataclass(frozen=True)
class OrbitTable:
    """Canonical representatives 0 <= a <= b of every point with s <= s_max.

    Rows are sorted by shell (ascending s) and then by (a, b).  ``shell``
    maps each row to its shell index; ``orbit`` is the number of lattice
    points obtained from (a, b) by sign changes and swapping.
    """

    q: int
    a: np.ndarray
    b: np.ndarray
    shell: np.ndarray
    orbit: np.ndarray
    s_values: np.ndarray
    keys: list


def orbit_table(p: Union[PExponent, int], s_max: float) -> OrbitTable:
    pe = as_pexp(p)
    q = pe.q
    pp = pe.p
    if s_max < 1:
        e = np.zeros(0, dtype=np.int64)
        return OrbitTable(q, e, e, e, e, np.zeros(0), [])
    bmax = int(math.floor(s_max ** (q / 2.0) * (1 + 1e-12))) + 1
    if (bmax + 1) ** 2 / 2 > 5e8:
        raise MemoryError(f"shell enumeration up to s={s_max} is too large for q={q}")
    kk, mm = radical_parts(q, bmax)
    pw = np.arange(bmax + 1, dtype=float) ** pp
    ra, rb = [], []
    tol = 1e-11 * s_max
    for a in range(0, bmax + 1):
        if 2 * pw[a] > s_max + tol:
            break
        bs = np.arange(max(a, 1), bmax + 1)
        sv = pw[a] + pw[bs]
        keep = sv <= s_max - tol
        edge = np.nonzero(np.abs(sv - s_max) <= tol)[0]
        for j in edge:
            b = int(bs[j])
            keep[j] = _s_within(q, int(kk[a]), int(mm[a]), int(kk[b]), int(mm[b]), s_max)
        sel = bs[keep]
        ra.append(np.full(sel.size, a, dtype=np.int64))
        rb.append(sel.astype(np.int64))
    a_arr = np.concatenate(ra) if ra else np.zeros(0, dtype=np.int64)
    b_arr = np.concatenate(rb) if rb else np.zeros(0, dtype=np.int64)
    keys = [_shell_key(int(kk[x]), int(mm[x]), int(kk[y]), int(mm[y]))
            for x, y in zip(a_arr.tolist(), b_arr.tolist())]
    uniq = sorted(set(keys), key=lambda k: (key_value(q, k), k))
    index = {k: i for i, k in enumerate(uniq)}
    shell = np.fromiter((index[k] for k in keys), dtype=np.int64, count=len(keys))
    order = np.lexsort((b_arr, a_arr, shell))
    a_arr, b_arr, shell = a_arr[order], b_arr[order], shell[order]
    orbit = np.where(a_arr == 0, 4, np.where(a_arr == b_arr, 4, 8)).astype(np.int64)
    s_values = np.array([key_value(q, k) for k in uniq])
    return OrbitTable(q, a_arr, b_arr, shell, orbit, s_values, uniq)


def orbit_points(a: int, b: int) -> List[Tuple[int, int]]:
    """All lattice points with {|n1|, |n2|} = {a, b}, lexicographically sorted."""
    pts = set()
    for x, y in ((a, b), (b, a)):
        for sx in (1, -1):
            for sy in (1, -1):
                pts.add((sx * x, sy * y))
    return sorted(pts)


def enumerate_shells(p: Union[PExponent, int], s_max: float) -> List[Shell]:
    """All shells with 1 <= s <= s_max in ascending order."""
    pe = as_pexp(p)
    tab = orbit_table(pe, s_max)
    shells = [Shell(float(v), k, [], [], pe.q) for v, k in zip(tab.s_values, tab.keys)]
    buckets: List[list] = [[] for _ in shells]
    for a, b, i in zip(tab.a.tolist(), tab.b.tolist(), tab.shell.tolist()):
        buckets[i].extend(orbit_points(a, b))
    for sh, pts in zip(shells, buckets):
        pts.sort()
        arr = np.array(pts, dtype=float).reshape(-1, 2)
        sh.points = [LatticePoint(x, y) for x, y in pts]
        sh.angles = distorted_angles(pe.q, arr[:, 0], arr[:, 1]).tolist()
    return shells


def r2_function(k: int) -> int:
    """Number of representations of k as an ordered sum of two integer squares."""
    if k < 1:
        raise DomainError("r2_function needs k >= 1")
    total = 0
    d = 1
    while d * d <= k:
        if k % d == 0:
            for dd in {d, k // d}:
                if dd % 2 == 1:
                    total += 1 if dd % 4 == 1 else -1
        d += 1
    return 4 * total


#


# --------------------------------------------------------------------------
# Cardinality census for shells too large to materialise


@dataclass(frozen=True)
class CensusResult:
    q: int
    s_max: float
    single_radical_shells: int
    two_radical_min_s: Optional[float]
    max_multiplicity: int
    violations: list

    @property
    def ok(self) -> bool:
        return not self.violations


def _isqrt_array(x: np.ndarray) -> np.ndarray:
    r = np.floor(np.sqrt(x.astype(float))).astype(np.int64)
    r -= (r * r > x)
    r += ((r + 1) * (r + 1) <= x)
    return r


def shell_census(p: Union[PExponent, int], s_max: float) -> CensusResult:
    """Check #shell <= 4 floor(s^(1/p)) for every shell with s <= s_max.

    A key with two distinct radicals comes from one orbit of exactly 8
    points with s >= 1 + 2^p, so it meets the bound outright and is only
    summarised.  A key (m, K) with one radical collects the points whose
    nonzero coordinates all lie in the radical class of m.  Writing
    a = c t^d with c free of d-th powers (d = q / gcd(q, 2)) shows that the
    class of m holds exactly the k values k0 t^e, e = 2d/q; this structure
    is asserted on the data before it is used.  The multiplicity of (m, K)
    is then the number of integer pairs with |t1|^e + |t2|^e = K/k0.
    """
    pe = as_pexp(p)
    q = pe.q
    amax = int(math.floor(s_max ** (q / 2.0))) + 1
    kk, mm = radical_parts(q, amax)
    kk = kk[1:]
    mm = mm[1:]
    e = 2 * (q // math.gcd(q, 2)) // q
    order = np.lexsort((kk, mm))
    ks, ms = kk[order], mm[order]
    first = np.r_[0, np.nonzero(np.diff(ms))[0] + 1]
    k0 = ks[first]
    m_cls = ms[first]
    ratio = ks // np.repeat(k0, np.diff(np.r_[first, ks.size]))
    exact = ratio * np.repeat(k0, np.diff(np.r_[first, ks.size])) == ks
    root = np.rint(ratio.astype(float) ** (1.0 / e)).astype(np.int64)
    if not (exact.all() and np.all(root ** e == ratio)):
        raise AssertionError("radical classes do not have the k0 t^e structure")

    # M[N] = #{(t1, t2) in Z^2 : |t1|^e + |t2|^e = N}
    nmax = int(math.floor(s_max)) + 1
    w = np.zeros(nmax + 1, dtype=np.int64)
    w[0] = 1
    t = 1
    while t ** e <= nmax:
        w[t ** e] += 2
        t += 1
    mult = np.convolve(w, w)[: nmax + 1]

    base = k0.astype(float) * m_cls.astype(float) ** (1.0 / q)
    lim = s_max * (1 + 1e-12)
    violations = []
    n_single = 0
    worst = 0
    alive = np.arange(k0.size)
    for n in range(1, nmax + 1):
        alive = alive[base[alive] * n <= lim]
        if alive.size == 0:
            break
        if mult[n] == 0:
            continue
        big_k = k0[alive] * n
        x = big_k.astype(np.int64) ** q * m_cls[alive]
        bound = 4 * _isqrt_array(x)
        n_single += alive.size
        worst = max(worst, int(mult[n]))
        bad = np.nonzero(mult[n] > bound)[0]
        for i in bad[:20]:
            j = alive[i]
            violations.append((((int(m_cls[j]), int(big_k[i])),), int(mult[n]), int(bound[i])))
    two_min = None
    if q > 2:
        two_min = 1.0 + 2.0 ** pe.p
        if two_min > s_max:
            two_min = None
        else:
            worst = max(worst, 8)
            b2 = cardinality_bound(q, _shell_key(1, 1, int(kk[1]), int(mm[1])))
            if 8 > b2:
                violations.append(("two-radical", 8, b2))
    return CensusResult(q, s_max, n_single, two_min, worst, violations)
