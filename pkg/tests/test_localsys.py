from math import comb

import pytest
from hypothesis import given
from sympy import Matrix, ZZ, eye
from sympy.matrices.normalforms import invariant_factors

from strategies import commuting_pair, gl2
from torusdual.abelian import FgAbGroup
from torusdual.localsys import (
    CohClass,
    FiberModel,
    LocalSystem,
    MappingTorus,
    NonCommuting,
    NonUnimodular,
    Torus,
    base_w1,
    cochain_model,
    cohomology_groups,
    contract_with_chern,
    cup,
    euler_characteristic,
    scalar_pairing,
)


def sympy_cokernel(mat: Matrix) -> FgAbGroup:
    factors = [abs(int(x)) for x in invariant_factors(mat, domain=ZZ)] if mat.rows and mat.cols else []
    nonzero = [x for x in factors if x]
    return FgAbGroup.from_cyclic_orders([0] * (mat.rows - len(nonzero)) + nonzero)


def sympy_kernel_rank(mat: Matrix) -> int:
    return mat.cols - mat.rank()


def test_antipodal_base_tables():
    base = MappingTorus.antipodal_sphere(2)
    lam = LocalSystem.from_matrices(base, [[[-1, -1], [0, -1]]])
    assert [str(g) for g in cohomology_groups(LocalSystem.trivial(base))] == ["Z", "Z", "0", "Z/2"]
    assert [str(g) for g in cohomology_groups(lam)] == ["0", "Z/4", "Z", "Z"]


@pytest.mark.parametrize("k", range(1, 5))
def test_trivial_torus_cohomology_is_binomial(k):
    groups = cohomology_groups(LocalSystem.trivial(Torus(k)))
    assert [g for g in groups] == [FgAbGroup.free(comb(k, i)) for i in range(k + 1)]


@given(gl2)
def test_circle_with_monodromy_matches_fixed_points_and_coinvariants(a):
    lam = LocalSystem.from_matrices(Torus(1), [a])
    h0, h1 = cohomology_groups(lam)
    m = Matrix(a) - eye(2)
    assert h0 == FgAbGroup.free(sympy_kernel_rank(m))
    assert h1 == sympy_cokernel(m)


@given(gl2)
def test_antipodal_base_matches_wang_sequence(rho):
    base = MappingTorus.antipodal_sphere(2)
    lam = LocalSystem.from_matrices(base, [rho])
    h = cohomology_groups(lam)
    r = Matrix(rho)
    # the antipodal map acts by -1 on H^2(S^2), so the top-degree twist is -rho
    assert h[0] == FgAbGroup.free(sympy_kernel_rank(r - eye(2)))
    assert h[1] == sympy_cokernel(r - eye(2))
    assert h[2] == FgAbGroup.free(sympy_kernel_rank(-r - eye(2)))
    assert h[3] == sympy_cokernel(-r - eye(2))


@given(commuting_pair)
def test_two_torus_extreme_degrees_and_euler(pair):
    x, y = pair
    lam = LocalSystem.from_matrices(Torus(2), [x, y])
    h = cohomology_groups(lam)
    stacked = (Matrix(x) - eye(2)).col_join(Matrix(y) - eye(2))
    assert h[0] == FgAbGroup.free(sympy_kernel_rank(stacked))
    assert h[2] == sympy_cokernel((Matrix(x) - eye(2)).row_join(Matrix(y) - eye(2)))
    assert euler_characteristic(h) == 0


@given(commuting_pair)
def test_coboundary_squares_to_zero(pair):
    lam = LocalSystem.from_matrices(Torus(2), [*pair])
    for q in range(3):
        model = cochain_model(lam.dual().exterior_power(q))
        d0, d1 = model.differential(0), model.differential(1)
        assert not (d1.dot(d0)).any()


def test_validation_errors():
    with pytest.raises(NonUnimodular):
        LocalSystem.from_matrices(Torus(1), [[[2, 0], [0, 1]]]).validate()
    with pytest.raises(NonCommuting):
        LocalSystem.from_matrices(Torus(2), [[[1, 1], [0, 1]], [[1, 0], [1, 1]]]).validate()


@given(gl2)
def test_dual_is_inverse_transpose(a):
    lam = LocalSystem.from_matrices(Torus(1), [a])
    m = Matrix(a)
    assert Matrix(lam.dual().matrix(0).tolist()) == m.inv().T
    assert lam.dual().dual() == lam


def test_w1_detects_orientation_reversal():
    lam = LocalSystem.from_matrices(Torus(2), [[[0, 1], [1, 0]], [[1, 0], [0, 1]]])
    assert lam.w1().bits == (1, 0)
    assert base_w1(MappingTorus.antipodal_sphere(2)).bits == (1,)
    assert base_w1(Torus(3)).is_zero()


def test_unipotent_base_cohomology():
    lam = LocalSystem.from_matrices(Torus(2), [[[1, 2], [0, 1]], [[1, 3], [0, 1]]])
    assert [str(g) for g in cohomology_groups(lam)] == ["Z", "Z^2", "Z"]


def test_cup_on_three_torus_is_exterior_algebra():
    z = LocalSystem.trivial(Torus(3))
    pairing = scalar_pairing(1)
    gens = [CohClass.from_coordinates(z, 1, [int(i == j) for j in range(3)]) for i in range(3)]
    for a in gens:
        assert cup(a, a, pairing, z).is_zero()
    top = cup(cup(gens[0], gens[1], pairing, z), gens[2], pairing, z)
    assert top.coordinates in ((1,), (-1,))


def test_cup_graded_commutative_on_two_torus():
    z = LocalSystem.trivial(Torus(2))
    pairing = scalar_pairing(1)
    a = CohClass.from_coordinates(z, 1, [1, 2])
    b = CohClass.from_coordinates(z, 1, [3, -1])
    ab, ba = cup(a, b, pairing, z), cup(b, a, pairing, z)
    assert ab.coordinates == tuple(-x for x in ba.coordinates)
    assert abs(ab.coordinates[0]) == abs(1 * -1 - 2 * 3)


def test_cup_unit():
    base = MappingTorus.antipodal_sphere(2)
    z = LocalSystem.trivial(base)
    one = CohClass.from_coordinates(z, 0, [1])
    x = CohClass.from_coordinates(z, 1, [1])
    assert cup(one, x, scalar_pairing(1), z).same_class(x)


def test_contraction_with_chern_in_degree_zero():
    lam = LocalSystem.from_matrices(MappingTorus.antipodal_sphere(2), [[[-1, -1], [0, -1]]])
    c = CohClass.from_coordinates(lam, 2, [5])
    gen = CohClass.from_coordinates(lam.dual().exterior_power(2), 0, [1])
    assert abs(contract_with_chern(c, gen, 2).coordinates[0]) % 2 == 1


def test_fiber_models_are_rings():
    FiberModel.sphere(2).check_ring_axioms()
    FiberModel.exterior(3).check_ring_axioms()
    MappingTorus.of_torus([[2, 1], [1, 1]]).check_ring_map()
