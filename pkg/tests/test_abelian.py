from math import gcd, prod

import numpy as np
import pytest
from hypothesis import given, strategies as st
from sympy import Matrix, ZZ
from sympy.matrices.normalforms import invariant_factors

from torusdual.abelian import (
    FgAbGroup,
    GroupHom,
    NotWellDefined,
    cokernel,
    determinant,
    diagonal,
    hermite_basis,
    homology,
    int_matrix,
    integer_inverse,
    is_unimodular,
    kernel_lattice,
    matmul,
    same_lattice,
    smith_normal_form,
    subquotient,
)

small = st.integers(-6, 6)


@st.composite
def matrices(draw, max_dim=4):
    r = draw(st.integers(1, max_dim))
    c = draw(st.integers(1, max_dim))
    return [[draw(small) for _ in range(c)] for _ in range(r)]


@given(matrices())
def test_smith_form_factorization(rows):
    a = int_matrix(rows)
    u, d, v = smith_normal_form(a)
    assert np.array_equal(matmul(matmul(u, a), v), d)
    assert is_unimodular(u) and is_unimodular(v)
    diag = diagonal(d)
    off = d.copy()
    for i, x in enumerate(diag):
        off[i, i] = 0
    assert not off.any()
    nonzero = [x for x in diag if x]
    assert all(x > 0 for x in nonzero)
    assert all(b % a == 0 for a, b in zip(nonzero, nonzero[1:]))


@given(matrices())
def test_invariant_factors_match_sympy(rows):
    ours = [x for x in diagonal(smith_normal_form(int_matrix(rows))[1]) if x]
    theirs = [abs(int(x)) for x in invariant_factors(Matrix(rows), domain=ZZ) if x]
    assert ours == sorted(theirs)


@given(matrices(3))
def test_cokernel_order_is_gcd_of_minors(rows):
    a = int_matrix(rows)
    g = cokernel(a)
    if a.shape[0] == a.shape[1] and determinant(a) != 0:
        assert g.free_rank == 0 and g.torsion_order == abs(determinant(a))


def test_determinant_and_inverse():
    a = int_matrix([[2, 1], [1, 1]])
    assert determinant(a) == 1
    assert np.array_equal(matmul(a, integer_inverse(a)), int_matrix([[1, 0], [0, 1]]))


def test_known_smith_form():
    _, d, _ = smith_normal_form([[-2, -1], [0, -2]])
    assert diagonal(d) == [1, 4]
    assert str(cokernel([[-2, -1], [0, -2]])) == "Z/4"


@given(st.integers(0, 3), st.lists(st.integers(1, 30), max_size=4))
def test_group_canonical_form(free, orders):
    g = FgAbGroup.from_cyclic_orders([0] * free + orders)
    assert g.free_rank == free
    assert g.torsion_order == prod(orders)
    factors = g.invariant_factors
    assert all(x > 1 for x in factors)
    assert all(b % a == 0 for a, b in zip(factors, factors[1:]))
    assert FgAbGroup.parse(str(g)) == g
    assert FgAbGroup.from_json(g.to_json()) == g


def test_string_forms():
    assert str(FgAbGroup(2, (4,))) == "Z^2 + Z/4"
    assert str(FgAbGroup(0, (2, 2))) == "Z/2^2"
    assert str(FgAbGroup()) == "0"
    assert FgAbGroup.parse("Z/2 + Z/3") == FgAbGroup(0, (6,))


def test_kernel_lattice():
    k = kernel_lattice([[2, -3]])
    assert same_lattice(k, [[3], [2]])


def test_hermite_basis_spans_same_lattice():
    gens = int_matrix([[2, 4, 6], [0, 2, 2]])
    assert same_lattice(hermite_basis(gens), gens)


def test_hom_reduces_mod_target():
    f = GroupHom(FgAbGroup.free(1), FgAbGroup.cyclic(6), int_matrix([[10]]))
    assert f((1,)) == (4,)


def test_hom_order_condition():
    with pytest.raises(NotWellDefined):
        GroupHom(FgAbGroup.cyclic(4), FgAbGroup.cyclic(6), int_matrix([[1]]))
    ok = GroupHom(FgAbGroup.cyclic(4), FgAbGroup.cyclic(6), int_matrix([[3]]))
    assert str(ok.image()) == "Z/2" and str(ok.kernel()) == "Z/2"


@given(st.integers(2, 40), st.integers(1, 40))
def test_multiplication_map_on_cyclic(n, a):
    f = GroupHom(FgAbGroup.cyclic(n), FgAbGroup.cyclic(n), int_matrix([[a]]))
    g = gcd(a, n)
    assert f.kernel().torsion_order == g
    assert f.image().torsion_order == n // g
    assert f.cokernel().torsion_order == g


def test_homology_of_short_complex():
    # Z --2--> Z --0--> Z : homology in the middle is Z/2
    z = FgAbGroup.free(1)
    incoming = GroupHom(z, z, int_matrix([[2]]))
    outgoing = GroupHom.zero(z, z)
    assert str(homology(incoming, outgoing).group) == "Z/2"


def test_subquotient_coordinates_and_lift():
    sq = subquotient(int_matrix([[1, 0], [0, 1]]), int_matrix([[4], [0]]))
    assert str(sq.group) == "Z + Z/4"
    for coords in [(1, 0), (0, 3), (2, 1)]:
        assert sq.coordinates(sq.lift(list(coords))) == coords
    assert sq.is_boundary([8, 0])
