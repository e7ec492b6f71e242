import numpy as np
import pytest

from wellpath import (
    PotentialSpec,
    WellValidationError,
    build_grid,
    chain_decompose,
    check_sti,
    default_sti_tol,
)
from wellpath.sti import _classify

BOX1 = np.array([[-2.0, 2.0]])


@pytest.fixture
def triple_grid(triple_well):
    return build_grid(triple_well, BOX1, 2001)


@pytest.fixture
def five_well_grid():
    # K = |x (x^2-1) (x^2-4)| / 8: zeros at 0, +-1, +-2, and the
    # antiderivative of x^5 - 5x^3 + 4x is x^6/6 - 5x^4/4 + 2x^2
    p = PotentialSpec.from_strings(
        1, "(x1*(x1^2 - 1)*(x1^2 - 4))^2 / 128",
        [[-2.0], [-1.0], [0.0], [1.0], [2.0]],
    )
    return build_grid(p, np.array([[-2.5, 2.5]]), 2001)


def test_double_well_vacuous(double_well_1d):
    g = build_grid(double_well_1d, BOX1, 401)
    rep = check_sti(g)
    assert rep.entries == ()
    assert rep.all_strict
    assert rep.flagged == ()
    assert rep.pair == (0, 1)


def test_triple_well_tight(triple_grid):
    rep = check_sti(triple_grid, (0, 2))
    # 2 * int_0^1 x(1-x^2) dx = 1/2 on both sides of the middle well
    assert rep.direct == pytest.approx(0.5, abs=1e-4)
    (entry,) = rep.entries
    assert entry.well_index == 1
    assert entry.via == pytest.approx(0.5, abs=1e-4)
    assert abs(entry.margin) <= rep.tolerance
    assert entry.verdict == "tight"


def test_triple_well_chain(triple_grid):
    assert chain_decompose(triple_grid, (0, 2)) == [(0, 1), (1, 2)]


def test_chain_strict_unchanged():
    # third zero far off the connecting geodesic: strict, no decomposition
    p = PotentialSpec.from_strings(
        2, "0.5*((x1^2 - 1)^2 + x2^2)*(x1^2 + (x2 - 2)^2)",
        [[-1.0, 0.0], [1.0, 0.0], [0.0, 2.0]],
    )
    g = build_grid(p, np.array([[-1.5, 1.5], [-0.5, 2.5]]), 301)
    rep = check_sti(g, (0, 1))
    (entry,) = rep.entries
    assert entry.verdict == "strict"
    assert rep.all_strict
    assert chain_decompose(g, (0, 1)) == [(0, 1)]


def test_geodesic_through_third_zero_is_tight():
    # the shortest route genuinely passes through the third well here, so
    # direct and via agree to rounding
    p = PotentialSpec.from_strings(
        2, "0.5*((x1^2 - 1)^2 + x2^2)*(x1^2 + (x2 - 1)^2)",
        [[-1.0, 0.0], [1.0, 0.0], [0.0, 1.0]],
    )
    g = build_grid(p, np.array([[-2.0, 2.0], [-2.0, 2.0]]), 201)
    rep = check_sti(g, (0, 1))
    (entry,) = rep.entries
    assert entry.verdict == "tight"
    assert abs(entry.margin) < 1e-12
    assert chain_decompose(g, (0, 1)) == [(0, 2), (2, 1)]


def test_report_symmetric_bitwise(five_well_grid):
    a = check_sti(five_well_grid, (0, 3))
    b = check_sti(five_well_grid, (3, 0))
    assert a.direct == b.direct
    for ea, eb in zip(a.entries, b.entries):
        assert ea.well_index == eb.well_index
        assert ea.direct == eb.direct
        assert ea.via == eb.via
        assert ea.margin == eb.margin
        assert ea.verdict == eb.verdict


def test_five_well_edge_oracles(five_well_grid):
    # closed-form arc costs: d(0 -> 1) = 11/96, d(1 -> 2) = 27/96
    rep = check_sti(five_well_grid, (2, 3))
    assert rep.direct == pytest.approx(11.0 / 96.0, abs=2e-4)
    rep2 = check_sti(five_well_grid, (3, 4))
    assert rep2.direct == pytest.approx(27.0 / 96.0, abs=2e-4)


def test_two_intermediate_wells_chain(five_well_grid):
    # -2 -> 1 passes the tight zeros at -1 and 0
    assert chain_decompose(five_well_grid, (0, 3)) == [(0, 1), (1, 2), (2, 3)]
    # full span routes through every intermediate zero
    assert chain_decompose(five_well_grid, (0, 4)) == [
        (0, 1), (1, 2), (2, 3), (3, 4),
    ]


def test_chain_cost_additivity(five_well_grid):
    g = five_well_grid
    rep = check_sti(g, (0, 4))
    chain = chain_decompose(g, (0, 4))
    total = sum(check_sti(g, sub).direct for sub in chain)
    assert total <= rep.direct + rep.tolerance * (len(chain) + 1)


def test_classify_bands():
    assert _classify(1.0, 2.0, 0.5) == "strict"  # via - direct = 1 > tol
    assert _classify(1.0, 1.4, 0.5) == "tight"
    assert _classify(1.4, 1.0, 0.5) == "tight"
    assert _classify(2.0, 1.0, 0.5) == "violated"  # direct - via = 1 > tol
    assert _classify(1.0, 1.0, 0.0) == "tight"


def test_tolerance_override(triple_grid):
    rep = check_sti(triple_grid, (0, 2), tol=1e3)
    assert all(e.verdict == "tight" for e in rep.entries)
    assert rep.tolerance == 1e3


def test_default_tol_scales_with_mesh(triple_well):
    coarse = build_grid(triple_well, BOX1, 101)
    fine = build_grid(triple_well, BOX1, 1601)
    assert default_sti_tol(fine) < default_sti_tol(coarse)


def test_pair_validation(triple_grid):
    with pytest.raises(WellValidationError):
        check_sti(triple_grid, (0, 0))
    with pytest.raises(WellValidationError):
        check_sti(triple_grid, (0, 7))
    with pytest.raises(WellValidationError):
        chain_decompose(triple_grid, (1, 1))


def test_many_wells_fallback_chain():
    # 11 wells forces the well-graph search instead of enumeration
    p = PotentialSpec.from_strings(
        1, "0.5*sin(3.141592653589793*x1)^2",
        [[float(i)] for i in range(11)],
    )
    g = build_grid(p, np.array([[-0.5, 10.5]]), 1101)
    chain = chain_decompose(g, (0, 10))
    assert chain[0][0] == 0 and chain[-1][1] == 10
    flat = [chain[0][0]] + [b for _, b in chain]
    assert len(set(flat)) == len(flat)  # simple path
    assert all(a == x and b == y for (a, b), (x, y) in zip(chain, zip(flat, flat[1:])))
