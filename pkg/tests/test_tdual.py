import random

import pytest
from hypothesis import given, settings, strategies as st

from strategies import random_torus_bundle
from test_lsss import antipodal_bundle, unipotent_bundle
from torusdual.localsys import CohClass, LocalSystem, Torus, Z2Class, cohomology_groups
from torusdual.lsss import AffineBundle
from torusdual.tdual import (
    CoefficientMismatch,
    DualPair,
    FluxDatum,
    UnsupportedNonOrientableVertical,
    check_relations,
    dualize,
    involution_check,
    is_dualizable,
)


@pytest.mark.parametrize("j,k", [(4, 6), (0, 3), (5, 0), (0, 0), (7, 7)])
def test_unipotent_family_swap(j, k):
    b = unipotent_bundle(j)
    pair = dualize(b, FluxDatum.from_coordinates(b, k=[k]))
    assert pair.dual_bundle.chern.coordinates == (k,)
    assert pair.dual_flux.k.coordinates == (j,)
    assert pair.report.all_pass
    assert involution_check(b, FluxDatum.from_coordinates(b, k=[k]))


def test_certificate_reduces_mod_j():
    b = unipotent_bundle(4)
    assert is_dualizable(b, FluxDatum.from_coordinates(b, k=[6])).certificate == (2,)
    assert is_dualizable(b, FluxDatum.from_coordinates(b, k=[6])).certificate == is_dualizable(
        b, FluxDatum.from_coordinates(b, k=[2])
    ).certificate


@pytest.mark.parametrize("j,k", [(1, 3), (3, 5), (5, 1)])
def test_antipodal_family_swap(j, k):
    b = antipodal_bundle(j)
    flux = FluxDatum.from_coordinates(b, k=[k])
    pair = dualize(b, flux, strict=True)
    assert pair.dual_bundle.chern.coordinates == (k,)
    assert pair.report.all_pass
    assert involution_check(b, flux)


def test_zero_flux_on_trivial_bundle():
    b = AffineBundle.trivial(LocalSystem.trivial(Torus(2), 2))
    verdict = is_dualizable(b, FluxDatum.zero(b))
    assert verdict and not any(verdict.certificate)
    pair = dualize(b, FluxDatum.zero(b))
    assert pair.dual_bundle.chern.is_zero() and pair.report.all_pass


def test_dual_monodromy_is_inverse_transpose():
    b = antipodal_bundle(1)
    pair = dualize(b, FluxDatum.zero(b))
    assert [r for r in pair.dual_bundle.lam.matrix(0).tolist()] == [[-1, 0], [1, -1]]


def test_corrupted_pair_fails_relation():
    b = unipotent_bundle(4)
    flux = FluxDatum.from_coordinates(b, k=[6])
    good = dualize(b, flux)
    bad_hat = AffineBundle.from_coordinates(good.dual_bundle.lam, [5])
    report = check_relations(DualPair(b, flux, bad_hat, good.dual_flux))
    assert not report.results["h_equals_c_hat"]


def test_obstruction_on_four_torus():
    z = LocalSystem.trivial(Torus(4))
    chern = CohClass(2, z, (1, 0, 0, 0, 0, 0))
    b = AffineBundle(z, chern)
    k = CohClass(2, z.dual(), (0, 0, 0, 0, 0, 1))
    flux = FluxDatum(Z2Class.zero(z.base), k, CohClass.zero(z, 3))
    verdict = is_dualizable(b, flux)
    assert not verdict and any(verdict.obstruction)
    with pytest.raises(ValueError):
        dualize(b, flux)


def test_coefficient_mismatch():
    b = unipotent_bundle(1)
    wrong = FluxDatum(Z2Class.zero(b.base), CohClass.zero(b.lam.exterior_power(2), 2), CohClass.zero(LocalSystem.trivial(b.base), 3))
    with pytest.raises(CoefficientMismatch):
        is_dualizable(b, wrong)


def test_non_orientable_vertical_bundle():
    lam = LocalSystem.from_matrices(Torus(2), [[[0, 1], [1, 0]], [[1, 0], [0, 1]]]).validate()
    coords = [0] * cohomology_groups(lam)[2].num_generators
    b = AffineBundle.from_coordinates(lam, coords)
    flux = FluxDatum.zero(b)
    with pytest.raises(UnsupportedNonOrientableVertical):
        dualize(b, flux, strict=True)
    pair = dualize(b, flux)
    assert pair.annotations
    assert pair.dual_flux.xi.bits == (1, 0)
    assert involution_check(b, flux)


@settings(max_examples=30)
@given(st.randoms(use_true_random=False))
def test_random_dualizations(rnd):
    rng = random.Random(rnd.random())
    b = random_torus_bundle(rng)
    k_group = cohomology_groups(b.lam.dual())[2]
    k = [rng.randint(-4, 4) if o == 0 else rng.randrange(o) for o in k_group.orders]
    xi = [rng.randint(0, 1), rng.randint(0, 1)]
    flux = FluxDatum.from_coordinates(b, xi=xi, k=k)
    pair = dualize(b, flux)
    assert pair.report.all_pass
    assert (pair.dual_flux.xi + flux.xi) == b.lam.w1()
    assert involution_check(b, flux)
