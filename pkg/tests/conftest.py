"""Session-wide scaling scans; each full scan takes tens of seconds, so share them."""

import pytest

from lzkzm.ising import DEFAULT_TAU_GRID, IsingQuenchSpec, RangeKind, RangePolicy, scaling_scan
from lzkzm.lindblad import NO_DECOHERENCE, Q1, Q2

TEMPLATE = IsingQuenchSpec(DEFAULT_TAU_GRID[0])


def _scan(dec=NO_DECOHERENCE, template=TEMPLATE):
    return scaling_scan(DEFAULT_TAU_GRID, template, dec)


@pytest.fixture(scope="session")
def ideal_scan():
    return _scan()


@pytest.fixture(scope="session")
def q1_scan():
    return _scan(Q1)


@pytest.fixture(scope="session")
def q2_scan():
    return _scan(Q2)


@pytest.fixture(scope="session")
def cotk_scan():
    # sweep each mode between -cot k and cot k, the exact image of the quench end
    return _scan(template=IsingQuenchSpec(DEFAULT_TAU_GRID[0], range_policy=RangePolicy(RangeKind.COTK)))


@pytest.fixture(scope="session")
def doubled_grid_scan():
    return _scan(template=IsingQuenchSpec(DEFAULT_TAU_GRID[0], n_k=2 * TEMPLATE.n_k))
