import math

import pytest

from pcircle.pgeom import count_brute_force


def non_boundary_radii(q, count, r_max, seed=7):
    """Radii whose p-circle keeps a clear gap to every lattice point."""
    import numpy as np

    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        r = float(rng.uniform(0.3, r_max))
        lo = count_brute_force(q, r * (1 - 1e-6))
        hi = count_brute_force(q, r * (1 + 1e-6))
        if lo == hi:
            out.append(r)
    return out


@pytest.fixture
def golden():
    return (math.sqrt(5) - 1) / 2


ACCEPTANCE_LINES = []


def record(number, title, passed, detail):
    line = f"criterion {number:>2} [{'PASS' if passed else 'FAIL'}] {title}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return passed


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
