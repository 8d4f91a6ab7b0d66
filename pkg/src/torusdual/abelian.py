"""Exact integer linear algebra: Smith normal form, finitely generated abelian
groups, lattice subquotients and the homomorphisms they induce.

Matrices are numpy arrays with ``dtype=object`` holding Python ints, so every
operation is exact and arbitrary precision.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce
from typing import Iterable, Sequence

import numpy as np


class BoundaryNotInCycles(ValueError):
    """A boundary vector does not lie in the cycle lattice (d∘d ≠ 0 upstream)."""


class NotWellDefined(ValueError):
    """A lattice map does not descend to the requested subquotients."""


# ---------------------------------------------------------------------------
# matrix helpers


def int_matrix(data, rows: int | None = None, cols: int | None = None) -> np.ndarray:
    """Coerce ``data`` to a 2-d object array of Python ints.

    ``rows``/``cols`` pin the shape for empty inputs.
    """
    if isinstance(data, np.ndarray) and data.dtype == object and data.ndim == 2:
        arr = data.copy()
    else:
        arr = np.array(data, dtype=object)
        if arr.size == 0:
            r = rows if rows is not None else (arr.shape[0] if arr.ndim >= 1 else 0)
            c = cols if cols is not None else (arr.shape[1] if arr.ndim == 2 else 0)
            return zeros(r, c)
        if arr.ndim == 1:
            arr = arr.reshape(1, -1) if rows == 1 else arr.reshape(-1, 1)
    arr = np.vectorize(int, otypes=[object])(arr) if arr.size else arr
    if rows is not None and arr.shape[0] != rows:
        raise ValueError(f"expected {rows} rows, got {arr.shape[0]}")
    if cols is not None and arr.shape[1] != cols:
        raise ValueError(f"expected {cols} columns, got {arr.shape[1]}")
    return arr


def zeros(rows: int, cols: int) -> np.ndarray:
    out = np.empty((rows, cols), dtype=object)
    out.fill(0)
    return out


def identity(n: int) -> np.ndarray:
    out = zeros(n, n)
    for i in range(n):
        out[i, i] = 1
    return out


def matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Exact product that also handles empty inner/outer dimensions."""
    if a.shape[1] != b.shape[0]:
        raise ValueError(f"shape mismatch {a.shape} @ {b.shape}")
    if a.shape[0] == 0 or b.shape[1] == 0 or a.shape[1] == 0:
        return zeros(a.shape[0], b.shape[1])
    return a.dot(b)


def hstack(blocks: Sequence[np.ndarray], rows: int) -> np.ndarray:
    parts = [b for b in blocks if b.shape[1]]
    return np.concatenate(parts, axis=1) if parts else zeros(rows, 0)


def vstack(blocks: Sequence[np.ndarray], cols: int) -> np.ndarray:
    parts = [b for b in blocks if b.shape[0]]
    return np.concatenate(parts, axis=0) if parts else zeros(0, cols)


def block_diag(*blocks: np.ndarray) -> np.ndarray:
    r = sum(b.shape[0] for b in blocks)
    c = sum(b.shape[1] for b in blocks)
    out = zeros(r, c)
    i = j = 0
    for b in blocks:
        out[i : i + b.shape[0], j : j + b.shape[1]] = b
        i += b.shape[0]
        j += b.shape[1]
    return out


def determinant(a: np.ndarray) -> int:
    """Exact determinant by fraction-free Bareiss elimination."""
    n = a.shape[0]
    if n != a.shape[1]:
        raise ValueError("determinant of non-square matrix")
    if n == 0:
        return 1
    m = [[int(x) for x in row] for row in a]
    sign, prev = 1, 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def is_unimodular(a: np.ndarray) -> bool:
    return a.shape[0] == a.shape[1] and abs(determinant(a)) == 1


def integer_inverse(a: np.ndarray) -> np.ndarray:
    """Inverse of a unimodular matrix, exact."""
    n = a.shape[0]
    if not is_unimodular(a):
        raise ValueError("matrix is not invertible over the integers")
    # Solve a·X = I column by column through the Smith form of a.
    u, d, v = smith_normal_form(a)
    # u a v = d, d diagonal of units ±1 (all 1 after normalization)
    return matmul(matmul(v, d), u) if n else zeros(0, 0)


# ---------------------------------------------------------------------------
# Smith normal form


def smith_normal_form(mat) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return ``(U, D, V)`` with ``U @ mat @ V == D``.

    ``U`` and ``V`` are unimodular and ``D`` is diagonal, nonnegative and in
    divisibility order. The pivot at each stage is the entry of smallest
    nonzero absolute value in the trailing block, ties broken by the lowest
    (row, col), which makes the transforms reproducible.
    """
    a = int_matrix(mat)
    m, n = a.shape
    d = [[int(x) for x in row] for row in a]
    u = [[int(i == j) for j in range(m)] for i in range(m)]
    v = [[int(i == j) for j in range(n)] for i in range(n)]

    def swap_rows(i, j):
        d[i], d[j] = d[j], d[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in d:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def add_row(src, dst, q):  # row_dst += q * row_src
        if q:
            d[dst] = [x + q * y for x, y in zip(d[dst], d[src])]
            u[dst] = [x + q * y for x, y in zip(u[dst], u[src])]

    def add_col(src, dst, q):  # col_dst += q * col_src
        if q:
            for row in d:
                row[dst] += q * row[src]
            for row in v:
                row[dst] += q * row[src]

    for t in range(min(m, n)):
        while True:
            best = None
            for i in range(t, m):
                for j in range(t, n):
                    x = abs(d[i][j])
                    if x and (best is None or x < best[0]):
                        best = (x, i, j)
            if best is None:
                break
            _, pi, pj = best
            swap_rows(t, pi)
            swap_cols(t, pj)
            p = d[t][t]
            dirty = False
            for i in range(t + 1, m):
                if d[i][t]:
                    add_row(t, i, -(d[i][t] // p))
                    dirty |= d[i][t] != 0
            for j in range(t + 1, n):
                if d[t][j]:
                    add_col(t, j, -(d[t][j] // p))
                    dirty |= d[t][j] != 0
            if dirty:
                continue
            # Pivot must divide the whole trailing block.
            bad = next(
                (i for i in range(t + 1, m) for j in range(t + 1, n) if d[i][j] % p),
                None,
            )
            if bad is None:
                break
            add_row(bad, t, 1)
        if d[t][t] < 0:
            d[t] = [-x for x in d[t]]
            u[t] = [-x for x in u[t]]

    return (
        int_matrix(u, m, m) if m else zeros(0, 0),
        int_matrix(d, m, n) if m and n else zeros(m, n),
        int_matrix(v, n, n) if n else zeros(0, 0),
    )


def diagonal(d: np.ndarray) -> list[int]:
    return [int(d[i, i]) for i in range(min(d.shape))]


def rank(mat) -> int:
    _, d, _ = smith_normal_form(mat)
    return sum(1 for x in diagonal(d) if x)


# ---------------------------------------------------------------------------
# groups


@dataclass(frozen=True, order=True)
class FgAbGroup:
    """Finitely generated abelian group ``Z^free_rank ⊕ Z/d1 ⊕ … ⊕ Z/dt``.

    The invariant factors satisfy ``d_i >= 2`` and ``d_i | d_{i+1}``, so two
    groups are isomorphic exactly when they compare equal.
    """

    free_rank: int = 0
    invariant_factors: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "invariant_factors", tuple(int(x) for x in self.invariant_factors))
        if self.free_rank < 0:
            raise ValueError("free rank must be nonnegative")
        fs = self.invariant_factors
        if any(x < 2 for x in fs):
            raise ValueError(f"invariant factors must be >= 2, got {fs}")
        if any(b % a for a, b in zip(fs, fs[1:])):
            raise ValueError(f"invariant factors must form a divisibility chain, got {fs}")

    @classmethod
    def from_cyclic_orders(cls, orders: Iterable[int]) -> "FgAbGroup":
        """Canonical form of ``⊕ Z/o`` where ``o = 0`` means a copy of ``Z``."""
        orders = [abs(int(o)) for o in orders]
        return cokernel(block_diag(*[int_matrix([[o]]) for o in orders])) if orders else cls()

    @classmethod
    def free(cls, rank: int) -> "FgAbGroup":
        return cls(rank, ())

    @classmethod
    def cyclic(cls, order: int) -> "FgAbGroup":
        return cls.from_cyclic_orders([order])

    @classmethod
    def parse(cls, text: str) -> "FgAbGroup":
        """Inverse of ``str``: accepts ``"0"``, ``"Z^2 + Z/4"`` and similar."""
        text = text.strip()
        if text in ("0", ""):
            return cls()
        orders: list[int] = []
        for term in text.split("+"):
            term = term.strip()
            if term.startswith("Z/"):
                base, _, power = term[2:].partition("^")
                orders += [int(base)] * (int(power) if power else 1)
            elif term.startswith("Z"):
                _, _, power = term.partition("^")
                orders += [0] * (int(power) if power else 1)
            else:
                raise ValueError(f"cannot parse group term {term!r}")
        return cls.from_cyclic_orders(orders)

    @property
    def torsion_rank(self) -> int:
        return len(self.invariant_factors)

    @property
    def num_generators(self) -> int:
        return self.free_rank + len(self.invariant_factors)

    @property
    def orders(self) -> tuple[int, ...]:
        """Order of each canonical generator, ``0`` meaning infinite."""
        return (0,) * self.free_rank + self.invariant_factors

    @property
    def torsion_order(self) -> int:
        return reduce(lambda a, b: a * b, self.invariant_factors, 1)

    def is_trivial(self) -> bool:
        return self.free_rank == 0 and not self.invariant_factors

    def is_finite(self) -> bool:
        return self.free_rank == 0

    def order(self) -> int | None:
        return self.torsion_order if self.is_finite() else None

    def torsion(self) -> "FgAbGroup":
        return FgAbGroup(0, self.invariant_factors)

    def __add__(self, other: "FgAbGroup") -> "FgAbGroup":
        return FgAbGroup.from_cyclic_orders(self.orders + other.orders)

    def relation_matrix(self) -> np.ndarray:
        """Square relation matrix on the canonical generators."""
        return block_diag(*[int_matrix([[o]]) for o in self.orders]) if self.orders else zeros(0, 0)

    def reduce(self, coords: Sequence[int]) -> tuple[int, ...]:
        """Normalize canonical coordinates (torsion entries reduced mod order)."""
        return tuple(int(c) % o if o else int(c) for c, o in zip(coords, self.orders))

    def __str__(self) -> str:
        terms = []
        if self.free_rank:
            terms.append("Z" if self.free_rank == 1 else f"Z^{self.free_rank}")
        i = 0
        fs = self.invariant_factors
        while i < len(fs):
            j = i
            while j < len(fs) and fs[j] == fs[i]:
                j += 1
            count = j - i
            terms.append(f"Z/{fs[i]}" if count == 1 else f"Z/{fs[i]}^{count}")
            i = j
        return " + ".join(terms) if terms else "0"

    def to_json(self) -> dict:
        return {"free_rank": self.free_rank, "invariant_factors": list(self.invariant_factors)}

    @classmethod
    def from_json(cls, obj: dict) -> "FgAbGroup":
        return cls(int(obj["free_rank"]), tuple(obj["invariant_factors"]))


def cokernel(mat) -> FgAbGroup:
    """``Z^rows / colspan(mat)`` in canonical form."""
    a = int_matrix(mat)
    _, d, _ = smith_normal_form(a)
    diag = diagonal(d)
    nonzero = [x for x in diag if x]
    return FgAbGroup(a.shape[0] - len(nonzero), tuple(x for x in nonzero if x > 1))


# ---------------------------------------------------------------------------
# lattices


def hermite_basis(gens, ambient: int | None = None) -> np.ndarray:
    """Column-echelon basis of the lattice spanned by the columns of ``gens``.

    Pivots are positive and entries to the right of each pivot in its row are
    reduced into ``[0, pivot)``, so equal lattices yield equal bases.
    """
    g = int_matrix(gens, rows=ambient)
    rows = g.shape[0]
    cols = [[int(g[i, j]) for i in range(rows)] for j in range(g.shape[1])]
    basis: list[list[int]] = []
    r = 0
    for i in range(rows):
        active = [c for c in cols if c[i]]
        rest = [c for c in cols if not c[i]]
        while len(active) > 1:
            active.sort(key=lambda c: abs(c[i]))
            p = active[0]
            nxt = [p]
            for c in active[1:]:
                q = c[i] // p[i]
                c = [x - q * y for x, y in zip(c, p)]
                (nxt if c[i] else rest).append(c)
            active = nxt
        if active:
            p = active[0]
            if p[i] < 0:
                p = [-x for x in p]
            basis.append(p)
            r += 1
        cols = rest
    # reduce earlier columns against later pivots
    for k in range(len(basis)):
        piv_row = next(i for i, x in enumerate(basis[k]) if x)
        for j in range(k):
            q = basis[j][piv_row] // basis[k][piv_row]
            if q:
                basis[j] = [x - q * y for x, y in zip(basis[j], basis[k])]
    if not basis:
        return zeros(rows, 0)
    return int_matrix(basis).T.copy()


def image_lattice(mat) -> np.ndarray:
    return hermite_basis(mat)


def kernel_lattice(mat) -> np.ndarray:
    """Basis (columns, Hermite form) of ``{x ∈ Z^cols : mat·x = 0}``."""
    a = int_matrix(mat)
    _, d, v = smith_normal_form(a)
    r = sum(1 for x in diagonal(d) if x)
    return hermite_basis(v[:, r:], ambient=a.shape[1])


def same_lattice(a, b) -> bool:
    ha, hb = hermite_basis(a), hermite_basis(b)
    return ha.shape == hb.shape and bool((ha == hb).all())


class LatticeSolver:
    """Solves ``basis · x = v`` over the integers for a fixed basis."""

    def __init__(self, basis: np.ndarray):
        self.basis = int_matrix(basis)
        self.u, d, self.v = smith_normal_form(self.basis)
        self.diag = diagonal(d)
        self.rank = sum(1 for x in self.diag if x)

    def solve(self, vec) -> list[int] | None:
        w = matmul(self.u, int_matrix(vec, rows=self.basis.shape[0], cols=1))[:, 0]
        y = []
        for i, wi in enumerate(w):
            di = self.diag[i] if i < len(self.diag) else 0
            if di == 0:
                if wi:
                    return None
                if i < self.basis.shape[1]:
                    y.append(0)
            else:
                if wi % di:
                    return None
                y.append(wi // di)
        y += [0] * (self.basis.shape[1] - len(y))
        x = matmul(self.v, int_matrix(y, rows=self.basis.shape[1], cols=1))[:, 0]
        return [int(t) for t in x]

    def contains(self, vec) -> bool:
        return self.solve(vec) is not None


# ---------------------------------------------------------------------------
# subquotients


@dataclass(frozen=True, eq=False)
class PresentedSubquotient:
    """``cycles / boundaries`` inside ``Z^ambient_rank`` with canonical coordinates.

    ``coordinates(v)`` sends a cycle vector to its canonical coordinates
    (free part first, then residues modulo the invariant factors) and
    ``lift(c)`` returns a cycle representative of canonical coordinates ``c``.
    """

    ambient_rank: int
    cycle_basis: np.ndarray
    boundary_basis: np.ndarray
    group: FgAbGroup
    _solver: LatticeSolver = field(repr=False)
    _u: np.ndarray = field(repr=False)
    _u_inv: np.ndarray = field(repr=False)
    _free_idx: tuple[int, ...] = field(repr=False)
    _tors_idx: tuple[int, ...] = field(repr=False)

    def coordinates(self, vec) -> tuple[int, ...]:
        x = self._solver.solve(vec)
        if x is None:
            raise NotWellDefined("vector is not in the cycle lattice")
        y = matmul(self._u, int_matrix(x, rows=len(x), cols=1))[:, 0] if x else []
        free = [int(y[i]) for i in self._free_idx]
        tors = [int(y[i]) for i in self._tors_idx]
        return self.group.reduce(free + tors)

    def contains_cycle(self, vec) -> bool:
        return self._solver.contains(vec)

    def is_boundary(self, vec) -> bool:
        return self.contains_cycle(vec) and not any(self.coordinates(vec))

    def lift(self, coords: Sequence[int]) -> list[int]:
        r = self.cycle_basis.shape[1]
        y = [0] * r
        for c, i in zip(coords, self._free_idx + self._tors_idx):
            y[i] = int(c)
        x = matmul(self._u_inv, int_matrix(y, rows=r, cols=1)) if r else zeros(0, 1)
        v = matmul(self.cycle_basis, x)[:, 0]
        return [int(t) for t in v]

    def generators(self) -> list[list[int]]:
        """Ambient cycle representatives of the canonical generators."""
        k = self.group.num_generators
        return [self.lift([int(i == j) for j in range(k)]) for i in range(k)]


def subquotient(cycles, boundaries, ambient: int | None = None) -> PresentedSubquotient:
    """Present ``span(cycles) / span(boundaries)``; raises ``BoundaryNotInCycles``."""
    z = hermite_basis(cycles, ambient)
    n = z.shape[0]
    b = int_matrix(boundaries, rows=n)
    solver = LatticeSolver(z)
    rel_cols = []
    for j in range(b.shape[1]):
        x = solver.solve(b[:, j : j + 1])
        if x is None:
            raise BoundaryNotInCycles(f"boundary column {j} is not in the cycle lattice")
        rel_cols.append(x)
    r = z.shape[1]
    rel = int_matrix(rel_cols).T.copy() if rel_cols else zeros(r, 0)
    rel = rel if rel.shape[0] == r else zeros(r, 0)
    u, d, _ = smith_normal_form(rel)
    diag = diagonal(d) + [0] * (r - min(rel.shape))
    free_idx = tuple(i for i in range(r) if diag[i] == 0)
    tors_idx = tuple(i for i in range(r) if diag[i] > 1)
    group = FgAbGroup(len(free_idx), tuple(diag[i] for i in tors_idx))
    u_inv = integer_inverse(u) if r else zeros(0, 0)
    return PresentedSubquotient(
        n, z, hermite_basis(b, n), group, solver, u, u_inv, free_idx, tors_idx
    )


def canonical_presentation(group: FgAbGroup) -> PresentedSubquotient:
    """The group itself as ``Z^k / relations`` on its canonical generators."""
    k = group.num_generators
    return subquotient(identity(k), group.relation_matrix(), ambient=k)


# ---------------------------------------------------------------------------
# homomorphisms


@dataclass(frozen=True, eq=False)
class GroupHom:
    """Homomorphism between canonical groups given by an integer matrix.

    Column ``j`` holds the canonical coordinates of the image of generator ``j``.
    """

    source: FgAbGroup
    target: FgAbGroup
    matrix: np.ndarray

    def __post_init__(self):
        m = int_matrix(self.matrix, rows=self.target.num_generators, cols=self.source.num_generators)
        for i, o in enumerate(self.target.orders):
            if o:
                m[i, :] = [int(x) % o for x in m[i, :]]
        object.__setattr__(self, "matrix", m)
        # each torsion generator must land on an element killed by its order
        for j, o in enumerate(self.source.orders):
            if o and any(self.target.reduce([o * int(x) for x in m[:, j]])):
                raise NotWellDefined(f"generator {j} of order {o} maps to an element of larger order")

    def __call__(self, coords: Sequence[int]) -> tuple[int, ...]:
        v = matmul(self.matrix, int_matrix(list(coords), rows=self.source.num_generators, cols=1))
        return self.target.reduce([int(x) for x in v[:, 0]])

    def __matmul__(self, other: "GroupHom") -> "GroupHom":
        if other.target != self.source:
            raise ValueError("cannot compose: groups do not match")
        return GroupHom(other.source, self.target, matmul(self.matrix, other.matrix))

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, GroupHom)
            and self.source == other.source
            and self.target == other.target
            and bool((self.matrix == other.matrix).all())
        )

    def is_zero(self) -> bool:
        return not any(int(x) for x in self.matrix.flat)

    @classmethod
    def zero(cls, source: FgAbGroup, target: FgAbGroup) -> "GroupHom":
        return cls(source, target, zeros(target.num_generators, source.num_generators))

    @classmethod
    def identity(cls, group: FgAbGroup) -> "GroupHom":
        return cls(group, group, identity(group.num_generators))

    def kernel_lattice(self) -> np.ndarray:
        """Lattice in source coordinates mapping into the target relations."""
        k = self.source.num_generators
        rel = self.target.relation_matrix()
        joint = hstack([self.matrix, -rel], rows=self.target.num_generators)
        ker = kernel_lattice(joint) if joint.shape[1] else zeros(0, 0)
        gens = ker[:k, :] if ker.shape[1] else zeros(k, 0)
        return hermite_basis(hstack([gens, self.source.relation_matrix()], rows=k), ambient=k)

    def kernel(self) -> FgAbGroup:
        return subquotient(self.kernel_lattice(), self.source.relation_matrix(), self.source.num_generators).group

    def image(self) -> FgAbGroup:
        tgt = self.target.num_generators
        return subquotient(
            hstack([self.matrix, self.target.relation_matrix()], rows=tgt),
            self.target.relation_matrix(),
            tgt,
        ).group

    def cokernel(self) -> FgAbGroup:
        return cokernel(hstack([self.matrix, self.target.relation_matrix()], rows=self.target.num_generators))


def induced_map(f, source: PresentedSubquotient, target: PresentedSubquotient) -> GroupHom:
    """Homomorphism of canonical groups induced by the lattice map ``f``.

    Raises ``NotWellDefined`` unless ``f`` carries source cycles into target
    cycles and source boundaries into target boundaries.
    """
    fm = int_matrix(f, rows=target.ambient_rank, cols=source.ambient_rank)
    z = source.cycle_basis
    for j in range(z.shape[1]):
        if not target.contains_cycle(matmul(fm, z[:, j : j + 1])):
            raise NotWellDefined("map does not send cycles to cycles")
    b = source.boundary_basis
    for j in range(b.shape[1]):
        if not target.is_boundary(matmul(fm, b[:, j : j + 1])):
            raise NotWellDefined("map does not send boundaries to boundaries")
    cols = [target.coordinates(matmul(fm, int_matrix(g, rows=source.ambient_rank, cols=1))) for g in source.generators()]
    mat = int_matrix(cols).T.copy() if cols else zeros(target.group.num_generators, 0)
    if mat.shape[0] != target.group.num_generators:
        mat = zeros(target.group.num_generators, len(cols))
    return GroupHom(source.group, target.group, mat)


def homology(incoming: GroupHom, outgoing: GroupHom) -> PresentedSubquotient:
    """``ker(outgoing) / im(incoming)`` presented over the middle group's generators."""
    mid = incoming.target
    if outgoing.source != mid:
        raise ValueError("incoming target and outgoing source differ")
    k = mid.num_generators
    if not (outgoing @ incoming).is_zero():
        raise BoundaryNotInCycles("composite of consecutive maps is not zero")
    bounds = hstack([incoming.matrix, mid.relation_matrix()], rows=k)
    return subquotient(outgoing.kernel_lattice(), bounds, ambient=k)
