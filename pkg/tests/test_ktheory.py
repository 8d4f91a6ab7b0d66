from math import gcd

import pytest
from hypothesis import given, strategies as st

from torusdual.abelian import FgAbGroup, GroupHom, int_matrix
from torusdual.ktheory import (
    Move,
    ShiftUndefined,
    Sq3Unjustified,
    TwistPair,
    TwistedCohDatum,
    ahss,
    antipodal_family,
    k_cell,
    ktable,
    move_invariance_check,
    normal_form,
    rank_bookkeeping,
    replay,
    shift,
    swap,
    torus_family,
    twisted_datum,
)
from torusdual.tdual import FluxDatum, dualize, is_dualizable

Z = FgAbGroup.free


def hand_datum(groups, maps):
    d3 = [None] * len(groups)
    for i, mat in maps.items():
        d3[i] = GroupHom(groups[i], groups[i + 3], int_matrix(mat))
    return TwistedCohDatum(tuple(groups), tuple(d3), hand_entered=True)


@pytest.mark.parametrize("k", [1, 2, 5, 12])
def test_three_sphere(k):
    result = ahss(hand_datum([Z(1), Z(0), Z(0), Z(1)], {0: [[-k]]}))
    assert result.assembled[0] == FgAbGroup()
    assert result.assembled[1] == FgAbGroup(0, (k,) if k > 1 else ())


@pytest.mark.parametrize("k", [0, 3, 4])
def test_three_torus(k):
    result = ahss(hand_datum([Z(1), Z(3), Z(3), Z(1)], {0: [[-k]]}))
    if k == 0:
        assert result.assembled[0] == Z(4) and result.assembled[1] == Z(4)
    else:
        assert result.assembled[0] == Z(3)
        assert result.assembled[1] == FgAbGroup(3, (k,))
        assert not result.extension_flags[1]
    assert "d3 maps were entered by hand" in result.notes


def test_sq3_guard():
    groups = [Z(1)] + [FgAbGroup()] * 5 + [Z(1)]
    with pytest.raises(Sq3Unjustified):
        ahss(hand_datum(groups, {}))


@given(st.integers(-200, 200), st.integers(-200, 200))
def test_normal_form_is_gcd(j, k):
    nf, moves = normal_form(TwistPair(j, k))
    assert nf == TwistPair(gcd(j, k), 0)
    assert replay(TwistPair(j, k), moves) == nf


def test_moves():
    assert swap(TwistPair(2, 5)) == TwistPair(5, 2)
    assert shift(TwistPair(2, 5)) == TwistPair(2, 7)
    assert shift(TwistPair(2, 5), -2) == TwistPair(2, 1)
    with pytest.raises(ShiftUndefined):
        shift(TwistPair(0, 5))
    assert str(Move("shift", -2)) == "shift(-2)"


def test_orbit_of_four_six():
    nf, moves = normal_form(TwistPair(4, 6))
    assert nf == TwistPair(2, 0)
    assert [m.kind for m in moves].count("swap") >= 1


@pytest.mark.parametrize("j,k", [(4, 6), (3, 9), (5, 7), (2, 0)])
def test_moves_are_realized_by_duality(j, k):
    """A shift keeps the class of the flux; a swap is the T-dual."""
    fam = torus_family()
    b = fam.bundle(j)
    here = is_dualizable(b, FluxDatum.from_coordinates(b, k=[k])).certificate
    there = is_dualizable(b, FluxDatum.from_coordinates(b, k=[k + j])).certificate
    assert here == there
    pair = dualize(b, FluxDatum.from_coordinates(b, k=[k]))
    assert (pair.dual_bundle.chern.coordinates, pair.dual_flux.k.coordinates) == ((k,), (j,))


def test_torus_family_table():
    for cell in ktable("t2-unipotent", range(0, 7), range(0, 7)):
        d = gcd(cell.pair.j, cell.pair.k)
        expected = FgAbGroup(6) if d == 0 else FgAbGroup(4, (d,) if d > 1 else ())
        assert cell.resolved[0] == expected
        assert cell.resolved[1] == expected
        assert cell.consistent
        # the odd parity never needs the orbit
        assert not cell.direct.extension_flags[1]


def test_even_parity_resolved_from_orbit_representative():
    cell = k_cell(torus_family(), TwistPair(4, 6))
    assert cell.direct.extension_flags[0]
    assert cell.resolved_from == TwistPair(0, 2)
    assert [str(g) for _, g in cell.direct.pieces[0]] == ["Z", "Z^2 + Z/4", "Z"]


def test_antipodal_family_odd_cells():
    for j in (1, 3, 5):
        for k in (1, 3, 5, 9):
            cell = k_cell(antipodal_family(), TwistPair(j, k))
            d = gcd(j, k)
            assert cell.resolved[1] == FgAbGroup.from_cyclic_orders([0, 0, 2, d])
            assert cell.resolved[0] == FgAbGroup(2, (2,))
            assert not cell.direct.extension_flags[1]


def test_flux_datum_fixes_h_only_when_top_filtration_vanishes():
    # for even j, E_inf^{3,0} = Z/2 sits below the flux class in H^3
    assert not twisted_datum(antipodal_family(), TwistPair(4, 6)).filtration_exact
    assert ahss(twisted_datum(antipodal_family(), TwistPair(4, 6))).extension_flags == {0: True, 1: True}


@pytest.mark.parametrize("fam,pair", [(torus_family(), TwistPair(4, 6)), (antipodal_family(), TwistPair(3, 5))])
def test_rank_bookkeeping(fam, pair):
    datum = twisted_datum(fam, pair)
    assert datum.filtration_exact
    for i in range(datum.dimension + 1):
        assert rank_bookkeeping(datum.d3(i))


def test_move_invariance_on_grid():
    pairs = [TwistPair(j, k) for j in range(9) for k in range(9)]
    for name in ("t2-unipotent", "s2-antipodal"):
        report = move_invariance_check(name, pairs)
        assert report.passed, report.violations


def test_move_invariance_negative_control():
    fam = torus_family()

    def without_d3(pair):
        good = twisted_datum(fam, pair)
        return TwistedCohDatum(good.groups, (None,) * len(good.groups), cohomology_flags=good.cohomology_flags)

    pairs = [TwistPair(j, k) for j in range(7) for k in range(7)]
    report = move_invariance_check(fam, pairs, datum_override=without_d3)
    assert not report.passed
