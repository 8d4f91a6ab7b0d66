"""Local systems over torus and mapping-torus bases and their cohomology.

Cohomology is computed from small exact cochain models:

* ``Torus(k)``: the Koszul complex ``Z^n ⊗ ∧^p (Z^k)*`` with
  ``d(m ⊗ ω) = Σ_i (ρ(x_i) − 1) m ⊗ (x_i* ∧ ω)``.
* ``MappingTorus(F, φ)``: the algebraic mapping cone
  ``C^i(F) ⊗ Z^n ⊕ C^{i−1}(F) ⊗ Z^n`` with
  ``d(a, s) = (0, (φ* ⊗ ρ(x) − 1) a)``.

Both models carry a cup product with an arbitrary bilinear coefficient
pairing, which is what the spectral-sequence differential needs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from itertools import combinations
from typing import Sequence, Union

import numpy as np

from .abelian import (
    FgAbGroup,
    PresentedSubquotient,
    determinant,
    identity,
    int_matrix,
    integer_inverse,
    matmul,
    subquotient,
    zeros,
)

Matrix = tuple[tuple[int, ...], ...]


class NonUnimodular(ValueError):
    pass


class NonCommuting(ValueError):
    pass


class DegreeOutOfRange(ValueError):
    pass


def freeze(mat) -> Matrix:
    a = int_matrix(mat)
    return tuple(tuple(int(x) for x in row) for row in a)


def thaw(mat: Matrix, n: int | None = None) -> np.ndarray:
    if not mat:
        return zeros(n or 0, n or 0)
    return int_matrix([list(r) for r in mat])


def wedge_basis(n: int, q: int) -> list[tuple[int, ...]]:
    """Lexicographically ordered ``q``-subsets of ``range(n)``."""
    return list(combinations(range(n), q))


def wedge_power_matrix(mat: np.ndarray, q: int) -> np.ndarray:
    """Matrix of ``∧^q mat`` on the lexicographic wedge basis (q×q minors)."""
    n = mat.shape[0]
    basis = wedge_basis(n, q)
    out = zeros(len(basis), len(basis))
    for r, rows in enumerate(basis):
        for c, cols in enumerate(basis):
            out[r, c] = determinant(mat[np.ix_(rows, cols)]) if q else 1
    return out


def merge_sign(left: Sequence[int], right: Sequence[int]) -> int:
    """Sign of the shuffle sorting ``left + right`` (0 if they overlap)."""
    if set(left) & set(right):
        return 0
    inversions = sum(1 for a in left for b in right if a > b)
    return -1 if inversions % 2 else 1


# ---------------------------------------------------------------------------
# bases


@dataclass(frozen=True)
class Torus:
    """The torus ``T^k`` with ``π₁ = Z^k``."""

    k: int

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("torus dimension must be at least 1")

    @property
    def dimension(self) -> int:
        return self.k

    @property
    def num_generators(self) -> int:
        return self.k

    @property
    def orientable(self) -> bool:
        return True

    def describe(self) -> str:
        return f"T^{self.k}"


@dataclass(frozen=True)
class FiberModel:
    """Formal graded ring (zero differential) modelling the fiber cochains.

    ``dims[i]`` is the rank in degree ``i``; ``table`` maps
    ``(i, a, j, b)`` to the product of basis element ``a`` in degree ``i`` with
    basis element ``b`` in degree ``j``, given as coordinates in degree ``i+j``.
    """

    name: str
    dims: tuple[int, ...]
    table: tuple[tuple[tuple[int, int, int, int], tuple[int, ...]], ...]

    @property
    def top(self) -> int:
        return len(self.dims) - 1

    def dim(self, i: int) -> int:
        return self.dims[i] if 0 <= i < len(self.dims) else 0

    @cached_property
    def _products(self) -> dict:
        return dict(self.table)

    def product(self, i: int, a: int, j: int, b: int) -> tuple[int, ...]:
        if i + j > self.top:
            return ()
        return self._products.get((i, a, j, b), (0,) * self.dim(i + j))

    @classmethod
    def sphere(cls, d: int) -> "FiberModel":
        dims = tuple(1 if i in (0, d) else 0 for i in range(d + 1))
        table = (((0, 0, 0, 0), (1,)), ((0, 0, d, 0), (1,)), ((d, 0, 0, 0), (1,)))
        return cls(f"S^{d}", dims, table)

    @classmethod
    def exterior(cls, k: int) -> "FiberModel":
        """Cohomology ring of ``T^k``: an exterior algebra on ``k`` degree-1 classes."""
        dims = tuple(len(wedge_basis(k, i)) for i in range(k + 1))
        table = []
        for i in range(k + 1):
            for a, s in enumerate(wedge_basis(k, i)):
                for j in range(k + 1 - i):
                    for b, t in enumerate(wedge_basis(k, j)):
                        sign = merge_sign(s, t)
                        if sign:
                            target = wedge_basis(k, i + j)
                            vec = [0] * len(target)
                            vec[target.index(tuple(sorted(s + t)))] = sign
                            table.append(((i, a, j, b), tuple(vec)))
        return cls(f"T^{k}", dims, tuple(table))

    def check_ring_axioms(self) -> None:
        """Associativity, unit and graded commutativity on basis elements."""
        top = self.top
        for i in range(top + 1):
            for a in range(self.dim(i)):
                e = [int(x == a) for x in range(self.dim(i))]
                if list(self.product(0, 0, i, a)) != e or list(self.product(i, a, 0, 0)) != e:
                    raise ValueError("fiber model is not unital")
                for j in range(top + 1 - i):
                    for b in range(self.dim(j)):
                        ab = self.product(i, a, j, b)
                        ba = self.product(j, b, i, a)
                        sgn = -1 if (i * j) % 2 else 1
                        if list(ab) != [sgn * x for x in ba]:
                            raise ValueError("fiber model is not graded commutative")
                        for l in range(top + 1 - i - j):
                            for c in range(self.dim(l)):
                                left = self._mul_vec(i + j, ab, l, [int(x == c) for x in range(self.dim(l))])
                                bc = self.product(j, b, l, c)
                                right = self._mul_vec(i, e, j + l, bc)
                                if left != right:
                                    raise ValueError("fiber model is not associative")

    def _mul_vec(self, i, u, j, v) -> list[int]:
        out = [0] * self.dim(i + j)
        for a, ua in enumerate(u):
            if ua:
                for b, vb in enumerate(v):
                    if vb:
                        for r, x in enumerate(self.product(i, a, j, b)):
                            out[r] += ua * vb * x
        return out


@dataclass(frozen=True)
class MappingTorus:
    """Mapping torus of a fiber self-map, given by its action ``φ*`` on fiber cochains.

    ``phi[i]`` is the square matrix of ``φ*`` in degree ``i``. Local systems on
    this base have one monodromy, along the circle direction.
    """

    fiber: FiberModel
    phi: tuple[Matrix, ...]

    def __post_init__(self):
        if len(self.phi) != len(self.fiber.dims):
            raise ValueError("need one φ* matrix per fiber degree")
        for i, m in enumerate(self.phi):
            d = self.fiber.dim(i)
            if d and (len(m) != d or any(len(r) != d for r in m)):
                raise ValueError(f"φ* in degree {i} must be {d}×{d}")

    @classmethod
    def antipodal_sphere(cls, d: int = 2) -> "MappingTorus":
        sign = (-1) ** (d + 1)
        phi = tuple(((1,),) if i == 0 else ((sign,),) if i == d else () for i in range(d + 1))
        return cls(FiberModel.sphere(d), phi)

    @classmethod
    def of_torus(cls, mat) -> "MappingTorus":
        """Mapping torus of ``T^k`` under a linear map acting on ``H¹`` by ``mat``."""
        a = int_matrix(mat)
        k = a.shape[0]
        return cls(FiberModel.exterior(k), tuple(freeze(wedge_power_matrix(a, i)) for i in range(k + 1)))

    def phi_matrix(self, i: int) -> np.ndarray:
        return thaw(self.phi[i], self.fiber.dim(i)) if 0 <= i <= self.fiber.top else zeros(0, 0)

    @property
    def dimension(self) -> int:
        return self.fiber.top + 1

    @property
    def num_generators(self) -> int:
        return 1

    @property
    def orientable(self) -> bool:
        return determinant(self.phi_matrix(self.fiber.top)) == 1

    def check_ring_map(self) -> None:
        """Verify ``φ*`` is a unital degree-0 ring endomorphism."""
        f = self.fiber
        f.check_ring_axioms()
        if list(self.phi_matrix(0)[:, 0]) != [1] + [0] * (f.dim(0) - 1):
            raise ValueError("φ* does not fix the unit")
        for i in range(f.top + 1):
            for a in range(f.dim(i)):
                pa = [int(x) for x in self.phi_matrix(i)[:, a]]
                for j in range(f.top + 1 - i):
                    for b in range(f.dim(j)):
                        pb = [int(x) for x in self.phi_matrix(j)[:, b]]
                        ab = list(f.product(i, a, j, b))
                        lhs = [int(x) for x in matmul(self.phi_matrix(i + j), int_matrix(ab, rows=len(ab), cols=1))[:, 0]] if ab else []
                        if lhs != f._mul_vec(i, pa, j, pb):
                            raise ValueError("φ* is not multiplicative")

    def describe(self) -> str:
        return f"mapping torus of {self.fiber.name}"


BaseSpace = Union[Torus, MappingTorus]


# ---------------------------------------------------------------------------
# local systems


@dataclass(frozen=True)
class Z2Class:
    """A degree-1 class with Z/2 coefficients, stored as its value on each π₁ generator."""

    bits: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "bits", tuple(int(b) % 2 for b in self.bits))

    def __add__(self, other: "Z2Class") -> "Z2Class":
        return Z2Class(tuple(a ^ b for a, b in zip(self.bits, other.bits)))

    def is_zero(self) -> bool:
        return not any(self.bits)

    @classmethod
    def zero(cls, base: BaseSpace) -> "Z2Class":
        return cls((0,) * base.num_generators)


@dataclass(frozen=True)
class LocalSystem:
    """A rank-``n`` local system: one monodromy matrix per π₁ generator of the base."""

    base: BaseSpace
    rank: int
    monodromies: tuple[Matrix, ...]

    @classmethod
    def from_matrices(cls, base: BaseSpace, matrices: Sequence) -> "LocalSystem":
        mats = tuple(freeze(m) for m in matrices)
        if len(mats) != base.num_generators:
            raise ValueError(f"{base.describe()} needs {base.num_generators} monodromy matrices, got {len(mats)}")
        n = len(mats[0]) if mats else 0
        return cls(base, n, mats)

    @classmethod
    def trivial(cls, base: BaseSpace, rank: int = 1) -> "LocalSystem":
        return cls(base, rank, tuple(freeze(identity(rank)) if rank else () for _ in range(base.num_generators)))

    def matrix(self, i: int) -> np.ndarray:
        return thaw(self.monodromies[i], self.rank)

    def matrices(self) -> list[np.ndarray]:
        return [self.matrix(i) for i in range(len(self.monodromies))]

    def validate(self) -> "LocalSystem":
        for i, m in enumerate(self.matrices()):
            if m.shape != (self.rank, self.rank):
                raise ValueError(f"monodromy {i} has shape {m.shape}, expected {self.rank}×{self.rank}")
            if abs(determinant(m)) != 1:
                raise NonUnimodular(f"monodromy {i} has determinant {determinant(m)}")
        if isinstance(self.base, Torus):
            mats = self.matrices()
            for i in range(len(mats)):
                for j in range(i + 1, len(mats)):
                    if not (matmul(mats[i], mats[j]) == matmul(mats[j], mats[i])).all():
                        raise NonCommuting(f"monodromies {i} and {j} do not commute")
        return self

    def dual(self) -> "LocalSystem":
        return LocalSystem(self.base, self.rank, tuple(freeze(integer_inverse(m).T) for m in self.matrices()))

    def exterior_power(self, q: int) -> "LocalSystem":
        if not 0 <= q <= self.rank:
            raise DegreeOutOfRange(f"exterior power {q} of a rank-{self.rank} system")
        mats = tuple(freeze(wedge_power_matrix(m, q)) for m in self.matrices())
        return LocalSystem(self.base, len(wedge_basis(self.rank, q)), mats)

    def w1(self) -> Z2Class:
        """Orientation character: ``g ↦ 1`` exactly when ``det ρ(g) = −1``."""
        return Z2Class(tuple(int(determinant(m) == -1) for m in self.matrices()))

    def is_trivial(self) -> bool:
        return all((m == identity(self.rank)).all() for m in self.matrices())

    def to_json(self) -> list:
        return [[list(r) for r in m] for m in self.monodromies]


def validate(system: LocalSystem) -> LocalSystem:
    return system.validate()


def dual(system: LocalSystem) -> LocalSystem:
    return system.dual()


def exterior_power(system: LocalSystem, q: int) -> LocalSystem:
    return system.exterior_power(q)


def w1(system: LocalSystem) -> Z2Class:
    return system.w1()


def base_w1(base: BaseSpace) -> Z2Class:
    """Orientation character of the base manifold itself."""
    if isinstance(base, Torus):
        return Z2Class.zero(base)
    return Z2Class((0 if base.orientable else 1,))


# ---------------------------------------------------------------------------
# coefficient pairings

Pairing = np.ndarray  # shape (n_out, n_left, n_right)


def contraction_pairing(rank: int, q: int) -> np.ndarray:
    """``Λ ⊗ ∧^q Λ* → ∧^{q−1} Λ*``, ``e_a ⊗ e^I ↦ i_{e_a} e^I``."""
    src = wedge_basis(rank, q)
    dst = wedge_basis(rank, q - 1)
    index = {s: i for i, s in enumerate(dst)}
    out = np.zeros((len(dst), rank, len(src)), dtype=object)
    for j, subset in enumerate(src):
        for pos, a in enumerate(subset):
            rest = subset[:pos] + subset[pos + 1 :]
            out[index[rest], a, j] += -1 if pos % 2 else 1
    return out


def evaluation_pairing(rank: int) -> np.ndarray:
    """``Λ ⊗ Λ* → Z``."""
    out = np.zeros((1, rank, rank), dtype=object)
    for a in range(rank):
        out[0, a, a] = 1
    return out


def scalar_pairing(rank: int, scalar_left: bool = True) -> np.ndarray:
    """``Z ⊗ V → V`` (or ``V ⊗ Z → V``)."""
    out = np.zeros((rank, 1 if scalar_left else rank, rank if scalar_left else 1), dtype=object)
    for a in range(rank):
        if scalar_left:
            out[a, 0, a] = 1
        else:
            out[a, a, 0] = 1
    return out


def apply_pairing(pairing: np.ndarray, u: Sequence[int], v: Sequence[int]) -> list[int]:
    out = [0] * pairing.shape[0]
    for a, ua in enumerate(u):
        if ua:
            for b, vb in enumerate(v):
                if vb:
                    for k in range(pairing.shape[0]):
                        x = pairing[k, a, b]
                        if x:
                            out[k] += ua * vb * int(x)
    return out


# ---------------------------------------------------------------------------
# cochain models


class CochainModel:
    """Finite cochain complex computing ``H*(base, system)``."""

    def __init__(self, system: LocalSystem):
        self.system = system
        self.base = system.base
        self.rank = system.rank
        self.top = self.base.dimension
        if isinstance(self.base, Torus):
            self._cells = [wedge_basis(self.base.k, p) for p in range(self.top + 1)]
        self._differentials = [self._build_differential(p) for p in range(self.top + 1)]
        for p in range(self.top):
            dd = matmul(self._differentials[p + 1], self._differentials[p])
            if any(int(x) for x in dd.flat):
                raise AssertionError(f"d∘d ≠ 0 in degree {p}")

    # sizes and layout ------------------------------------------------------

    def dim(self, p: int) -> int:
        if p < 0 or p > self.top:
            return 0
        if isinstance(self.base, Torus):
            return len(self._cells[p]) * self.rank
        f = self.base.fiber
        return (f.dim(p) + f.dim(p - 1)) * self.rank

    def differential(self, p: int) -> np.ndarray:
        """Matrix of ``d: C^p → C^{p+1}``."""
        if 0 <= p <= self.top:
            return self._differentials[p]
        return zeros(self.dim(p + 1), self.dim(p))

    def _build_differential(self, p: int) -> np.ndarray:
        n = self.rank
        out = zeros(self.dim(p + 1), self.dim(p))
        if isinstance(self.base, Torus):
            if p >= self.top:
                return out
            mats = self.system.matrices()
            tgt = {s: i for i, s in enumerate(self._cells[p + 1])}
            for c, s in enumerate(self._cells[p]):
                for i in range(self.base.k):
                    sign = merge_sign((i,), s)
                    if sign:
                        r = tgt[tuple(sorted((i,) + s))]
                        block = mats[i] - identity(n)
                        out[r * n : (r + 1) * n, c * n : (c + 1) * n] += sign * block
            return out
        # mapping cone: (a, s) ↦ (0, (φ*⊗ρ − 1) a); a-part of C^p feeds s-part of C^{p+1}
        f = self.base.fiber
        a_dim = f.dim(p) * n
        if a_dim and p + 1 <= self.top:
            twist = self._twist(p)
            off = f.dim(p + 1) * n
            out[off : off + a_dim, 0:a_dim] = twist - identity(a_dim)
        return out

    def _twist(self, p: int) -> np.ndarray:
        """``φ* ⊗ ρ(x)`` on ``C^p(F) ⊗ Z^n`` (fiber-major layout)."""
        return np.kron(self.base.phi_matrix(p), self.system.matrix(0)).astype(object)

    # cohomology ------------------------------------------------------------

    @cached_property
    def cohomology(self) -> list[PresentedSubquotient]:
        from .abelian import kernel_lattice

        groups = []
        for p in range(self.top + 1):
            d_out = self.differential(p)
            cycles = kernel_lattice(d_out) if d_out.shape[0] else identity(self.dim(p))
            d_in = self.differential(p - 1) if p else zeros(self.dim(0), 0)
            groups.append(subquotient(cycles, d_in, ambient=self.dim(p)))
        return groups

    def groups(self) -> list[FgAbGroup]:
        return [sq.group for sq in self.cohomology]


@lru_cache(maxsize=512)
def cochain_model(system: LocalSystem) -> CochainModel:
    return CochainModel(system)


def cohomology(base: BaseSpace, system: LocalSystem) -> list[PresentedSubquotient]:
    """``H^i(base, system)`` for ``0 ≤ i ≤ dim base``, as presented subquotients."""
    if system.base != base:
        raise ValueError("local system lives over a different base")
    return cochain_model(system).cohomology


def cohomology_groups(system: LocalSystem) -> list[FgAbGroup]:
    return cochain_model(system).groups()


def euler_characteristic(groups: Sequence[FgAbGroup]) -> int:
    return sum((-1) ** i * g.free_rank for i, g in enumerate(groups))


# ---------------------------------------------------------------------------
# cup products


def cup_cochains(
    left: LocalSystem,
    p: int,
    x: Sequence[int],
    right: LocalSystem,
    q: int,
    y: Sequence[int],
    pairing: np.ndarray,
) -> list[int]:
    """Cup product of cochains ``x ∈ C^p(left)`` and ``y ∈ C^q(right)``.

    Coefficients combine through ``pairing``; the result lives in
    ``C^{p+q}`` of the system with rank ``pairing.shape[0]``.
    """
    base = left.base
    nl, nr, no = left.rank, right.rank, pairing.shape[0]
    if p + q > base.dimension:
        return []
    if isinstance(base, Torus):
        cells = lambda d: wedge_basis(base.k, d)  # noqa: E731
        tgt = {s: i for i, s in enumerate(cells(p + q))}
        out = [0] * (len(tgt) * no)
        rmats = right.matrices()
        for i, s in enumerate(cells(p)):
            u = x[i * nl : (i + 1) * nl]
            if not any(u):
                continue
            act = identity(nr)
            for g in s:
                act = matmul(act, rmats[g])
            for j, t in enumerate(cells(q)):
                sign = merge_sign(s, t)
                v = y[j * nr : (j + 1) * nr]
                if not sign or not any(v):
                    continue
                v = [int(z) for z in matmul(act, int_matrix(list(v), rows=nr, cols=1))[:, 0]]
                r = tgt[tuple(sorted(s + t))]
                for k, z in enumerate(apply_pairing(pairing, u, v)):
                    out[r * no + k] += sign * z
        return out
    # mapping cone: (a,s)⌣(b,t) = (a⌣b, s⌣b + (−1)^{|a|} T(a)⌣t)
    f = base.fiber
    a_x, s_x = _split_cone(f, p, nl, x)
    a_y, s_y = _split_cone(f, q, nr, y)
    twisted = [int(z) for z in matmul(np.kron(base.phi_matrix(p), left.matrix(0)).astype(object), int_matrix(a_x, rows=len(a_x), cols=1))[:, 0]] if a_x else []
    a_out = _fiber_cup(f, p, nl, a_x, q, nr, a_y, pairing)
    s_out = _fiber_cup(f, p - 1, nl, s_x, q, nr, a_y, pairing)
    sign = -1 if p % 2 else 1
    extra = _fiber_cup(f, p, nl, twisted, q - 1, nr, s_y, pairing)
    s_out = [a + sign * b for a, b in zip(s_out, extra)] if extra else s_out
    size_s = f.dim(p + q - 1) * no
    s_out = s_out or [0] * size_s
    a_out = a_out or [0] * (f.dim(p + q) * no)
    return a_out + s_out


def _split_cone(f: FiberModel, p: int, n: int, vec: Sequence[int]) -> tuple[list[int], list[int]]:
    k = f.dim(p) * n
    return list(vec[:k]), list(vec[k:])


def _fiber_cup(f: FiberModel, i, nl, u, j, nr, v, pairing) -> list[int]:
    no = pairing.shape[0]
    if i < 0 or j < 0 or i + j > f.top:
        return [0] * (f.dim(i + j) * no) if 0 <= i + j <= f.top else []
    out = [0] * (f.dim(i + j) * no)
    for a in range(f.dim(i)):
        ua = u[a * nl : (a + 1) * nl]
        if not any(ua):
            continue
        for b in range(f.dim(j)):
            vb = v[b * nr : (b + 1) * nr]
            if not any(vb):
                continue
            prod = f.product(i, a, j, b)
            coef = apply_pairing(pairing, ua, vb)
            for r, m in enumerate(prod):
                if m:
                    for k, z in enumerate(coef):
                        out[r * no + k] += m * z
    return out


# ---------------------------------------------------------------------------
# classes


@dataclass(frozen=True)
class CohClass:
    """A cohomology class: degree, coefficient system and a cocycle representative."""

    degree: int
    system: LocalSystem
    representative: tuple[int, ...]
    _check: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "representative", tuple(int(v) for v in self.representative))
        model = cochain_model(self.system)
        if len(self.representative) != model.dim(self.degree):
            raise ValueError(
                f"representative has length {len(self.representative)}, expected {model.dim(self.degree)}"
            )
        if self._check and 0 <= self.degree <= model.top:
            sq = model.cohomology[self.degree]
            if not sq.contains_cycle(list(self.representative)):
                raise ValueError("representative is not a cocycle")

    @property
    def presentation(self) -> PresentedSubquotient:
        return cochain_model(self.system).cohomology[self.degree]

    @property
    def group(self) -> FgAbGroup:
        return self.presentation.group

    @property
    def coordinates(self) -> tuple[int, ...]:
        if not self.representative:
            return ()
        return self.presentation.coordinates(list(self.representative))

    def is_zero(self) -> bool:
        return not any(self.coordinates)

    def __add__(self, other: "CohClass") -> "CohClass":
        return CohClass(self.degree, self.system, tuple(a + b for a, b in zip(self.representative, other.representative)))

    def __neg__(self) -> "CohClass":
        return CohClass(self.degree, self.system, tuple(-a for a in self.representative))

    def __rmul__(self, k: int) -> "CohClass":
        return CohClass(self.degree, self.system, tuple(k * a for a in self.representative))

    def same_class(self, other: "CohClass") -> bool:
        return self.degree == other.degree and self.system == other.system and self.coordinates == other.coordinates

    @classmethod
    def from_coordinates(cls, system: LocalSystem, degree: int, coords: Sequence[int]) -> "CohClass":
        model = cochain_model(system)
        if not 0 <= degree <= model.top:
            raise DegreeOutOfRange(f"degree {degree} outside 0..{model.top}")
        sq = model.cohomology[degree]
        if len(coords) != sq.group.num_generators:
            raise ValueError(f"H^{degree} = {sq.group} needs {sq.group.num_generators} coordinates, got {len(coords)}")
        return cls(degree, system, tuple(sq.lift(coords)))

    @classmethod
    def zero(cls, system: LocalSystem, degree: int) -> "CohClass":
        return cls(degree, system, (0,) * cochain_model(system).dim(degree))


def cup(x: CohClass, y: CohClass, pairing: np.ndarray, target: LocalSystem) -> CohClass:
    """Cup product through a coefficient pairing ``left ⊗ right → target``."""
    if x.system.base != y.system.base:
        raise ValueError("classes live over different bases")
    degree = x.degree + y.degree
    if degree > x.system.base.dimension:
        return CohClass(degree, target, ())
    rep = cup_cochains(x.system, x.degree, x.representative, y.system, y.degree, y.representative, pairing)
    return CohClass(degree, target, tuple(rep))


def contract_with_chern(chern: CohClass, a: CohClass, q: int) -> CohClass:
    """``c ⌣ a`` with coefficients contracted ``Λ ⊗ ∧^q Λ* → ∧^{q−1} Λ*``.

    ``a`` must have coefficients ``∧^q Λ*`` where ``Λ`` is ``chern.system``.
    Sign rule: ``(φ⊗x) ⌣ (ψ⊗α) = (−1)^{deg ψ} (φ⌣ψ) ⊗ i_x α``.
    """
    lam = chern.system
    if chern.degree != 2:
        raise DegreeOutOfRange("the twisted Chern class has degree 2")
    n = lam.rank
    if not 1 <= q <= n:
        raise DegreeOutOfRange(f"contraction needs 1 <= q <= {n}, got {q}")
    dual_sys = lam.dual()
    if a.system != dual_sys.exterior_power(q):
        raise ValueError("class does not have ∧^q Λ* coefficients")
    target = dual_sys.exterior_power(q - 1)
    if a.degree + 2 > lam.base.dimension:
        return CohClass(a.degree + 2, target, ())
    prod = cup(chern, a, contraction_pairing(n, q), target)
    return -prod if a.degree % 2 else prod
