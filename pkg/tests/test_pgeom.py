import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pcircle import pgeom as pg
from pcircle.errors import DomainError


def test_pexponent():
    assert pg.PExponent(3).p == pytest.approx(2 / 3)
    assert pg.PExponent.from_p(0.5).q == 4
    with pytest.raises(DomainError):
        pg.PExponent(0)
    with pytest.raises(DomainError):
        pg.PExponent.from_p(0.7)


@given(st.integers(1, 4), st.floats(0.01, 200.0), st.floats(0.0, 2 * math.pi - 1e-9))
def test_distorted_polar_round_trip(q, r, phi):
    x = pg.from_distorted_polar(pg.DistortedPolar(r, phi), q)
    assert pg.p_norm(x, q) == pytest.approx(r, rel=1e-12)
    back = pg.to_distorted_polar(x, q)
    d = abs(back.phi - phi)
    assert min(d, 2 * math.pi - d) < 1e-9


def test_area_term_values():
    assert pg.area_term(1, 1.5) == pytest.approx(2.25 * math.pi)
    assert pg.area_term(2, 1.0) == pytest.approx(2.0)
    # astroid: 3 pi / 8 * (2r)^2 ... area of |x|^(2/3)+|y|^(2/3) <= r^(2/3) is 3 pi r^2 / 8
    assert pg.area_term(3, 2.0) == pytest.approx(3 * math.pi * 4 / 8)


@pytest.mark.parametrize("q", [1, 2, 3, 4])
def test_count_against_brute_force(q):
    for r in [0.5, 1.0, 1.7, 2.0, 3.3, 6.25, 9.9, 14.0]:
        assert pg.count_lattice_points(q, r) == pg.count_brute_force(q, r)


def test_count_examples():
    assert pg.count_lattice_points(1, 1.5) == 9
    assert pg.count_lattice_points(2, 0.5) == 1
    # strict interior: points on the curve are left out
    assert pg.count_lattice_points(1, 1.0) == 1
    assert pg.count_lattice_points(2, 1.0) == 1
    assert pg.count_lattice_points(1, 1.0 + 1e-12) == 5


def test_error_term_flags_boundary():
    et = pg.error_term_direct(1, 1.5)
    assert et.count == 9 and et.value == pytest.approx(9 - 2.25 * math.pi)
    assert not et.near_boundary
    assert pg.error_term_direct(1, 5.0).near_boundary


@pytest.mark.parametrize("q,s_max", [(1, 80.0), (2, 50.0), (3, 15.0), (4, 5.0)])
def test_shells_partition_the_disc(q, s_max):
    shells = pg.enumerate_shells(q, s_max)
    svals = [sh.s for sh in shells]
    assert svals == sorted(svals) and len(set(sh.key for sh in shells)) == len(shells)
    total = sum(sh.multiplicity for sh in shells)
    assert total == pg.count_lattice_points(q, s_max ** (q / 2) * (1 + 1e-9)) - 1
    for sh in shells:
        assert sh.multiplicity <= sh.bound
        for pt in sh.points:
            s = abs(pt.n1) ** (2 / q) + abs(pt.n2) ** (2 / q)
            assert s == pytest.approx(sh.s, rel=1e-12)


def test_shell_examples():
    sh = pg.enumerate_shells(1, 3.5)
    assert [(s.s, s.multiplicity) for s in sh] == [(1.0, 4), (2.0, 4)]
    sh = pg.enumerate_shells(2, 2)
    assert [(s.s, s.multiplicity) for s in sh] == [(1.0, 4), (2.0, 8)]


def test_exact_keys_merge_coincident_shells():
    # 4^(1/2) + 9^(1/2) = 25^(1/2) for q = 4, and 27^(2/3) + 64^(2/3) = 125^(2/3) for q = 3
    for q, s, pts in [(4, 5.0, {(4, 9), (0, 25)}), (3, 25.0, {(27, 64), (0, 125)})]:
        shells = [sh for sh in pg.enumerate_shells(q, s + 0.5) if sh.s == pytest.approx(s)]
        assert len(shells) == 1
        have = {(abs(p.n1), abs(p.n2)) for p in shells[0].points}
        assert pts <= have


def test_r2_function():
    assert [pg.r2_function(k) for k in range(1, 11)] == [4, 4, 0, 4, 8, 0, 0, 4, 4, 8]
    assert pg.r2_function(25) == 12


@pytest.mark.parametrize("q", [1, 2, 3, 4])
def test_census_matches_enumeration(q):
    s_max = {1: 300.0, 2: 120.0, 3: 25.0, 4: 7.0}[q]
    census = pg.shell_census(q, s_max)
    assert census.ok
    shells = pg.enumerate_shells(q, s_max)
    assert census.max_multiplicity == max(sh.multiplicity for sh in shells)


def test_distorted_angles_cover_axes():
    ang = pg.distorted_angles(3, np.array([1.0, 0.0, -1.0, 0.0]), np.array([0.0, 1.0, 0.0, -1.0]))
    assert np.allclose(ang, [0, math.pi / 2, math.pi, 3 * math.pi / 2])
