"""Leray–Serre spectral sequence of an affine torus bundle.

``E₂^{p,q} = H^p(M, ∧^q Λ*)`` and ``d₂`` is contraction with the twisted
Chern class. Later differentials are never guessed: ``d_r`` for ``r ≥ 3`` is
recorded as zero only when its source or target vanishes, otherwise the
affected entries are flagged undetermined.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from math import gcd
from typing import Sequence

import numpy as np

from .abelian import (
    FgAbGroup,
    GroupHom,
    PresentedSubquotient,
    homology,
    induced_map,
    zeros,
)
from .localsys import (
    BaseSpace,
    CohClass,
    LocalSystem,
    Z2Class,
    base_w1,
    cochain_model,
    contraction_pairing,
    cup_cochains,
)


class ExtensionPolicy(Enum):
    SPLIT = "split"
    PD_ASSISTED = "pd-assisted"


@dataclass(frozen=True)
class AffineBundle:
    """Affine torus bundle over ``lam.base`` classified by ``(Λ, c)``."""

    lam: LocalSystem
    chern: CohClass

    def __post_init__(self):
        if self.chern.degree != 2 or self.chern.system != self.lam:
            raise ValueError("the Chern class must live in H²(M, Λ)")

    @classmethod
    def from_coordinates(cls, lam: LocalSystem, coords: Sequence[int]) -> "AffineBundle":
        return cls(lam, CohClass.from_coordinates(lam, 2, list(coords)))

    @classmethod
    def trivial(cls, lam: LocalSystem) -> "AffineBundle":
        return cls(lam, CohClass.zero(lam, 2))

    @property
    def base(self) -> BaseSpace:
        return self.lam.base

    @property
    def fiber_rank(self) -> int:
        return self.lam.rank

    @property
    def dimension(self) -> int:
        return self.base.dimension + self.fiber_rank

    def coefficients(self, q: int) -> LocalSystem:
        """``∧^q Λ*``."""
        return self.lam.dual().exterior_power(q)


@dataclass(frozen=True, eq=False)
class PageEntry:
    """One ``E_r^{p,q}``: a tower of subquotients ending at cochain level.

    ``levels[0]`` is ``H^p`` presented over cochains; each further level is a
    subquotient of the previous level's canonical coordinates.
    """

    levels: tuple[PresentedSubquotient, ...]

    @property
    def group(self) -> FgAbGroup:
        return self.levels[-1].group

    def lift(self, coords: Sequence[int]) -> list[int]:
        """A cochain representative of the class with canonical coordinates ``coords``."""
        vec = list(coords)
        for sq in reversed(self.levels):
            vec = sq.lift(vec)
        return vec

    def coordinates(self, cochain: Sequence[int]) -> tuple[int, ...]:
        vec: Sequence[int] = cochain
        for sq in self.levels:
            vec = sq.coordinates(list(vec))
        return tuple(vec)

    def refine(self, sq: PresentedSubquotient) -> "PageEntry":
        return PageEntry(self.levels + (sq,))


@dataclass(frozen=True, eq=False)
class SpectralPage:
    stage: int | float
    base_dim: int
    fiber_rank: int
    entries: dict[tuple[int, int], PageEntry]
    differentials: dict[tuple[int, int], GroupHom] = field(default_factory=dict)
    final: bool = False
    undetermined: frozenset[tuple[int, int]] = frozenset()

    def group(self, p: int, q: int) -> FgAbGroup:
        entry = self.entries.get((p, q))
        return entry.group if entry else FgAbGroup()

    def grid(self) -> list[list[FgAbGroup]]:
        """Rows indexed by ``q``, columns by ``p``."""
        return [[self.group(p, q) for p in range(self.base_dim + 1)] for q in range(self.fiber_rank + 1)]

    def euler_characteristic(self) -> int:
        return sum((-1) ** (p + q) * e.group.free_rank for (p, q), e in self.entries.items())


@dataclass(frozen=True)
class TotalCohomology:
    """Per total degree: the ``E∞`` pieces (by increasing ``p``) and an assembled group."""

    pieces: tuple[tuple[tuple[int, FgAbGroup], ...], ...]
    assembled: tuple[FgAbGroup, ...]
    extension_flags: tuple[bool, ...]
    undetermined: tuple[bool, ...]
    policy: ExtensionPolicy

    def groups(self) -> list[FgAbGroup]:
        return list(self.assembled)

    def betti(self) -> list[int]:
        return [g.free_rank for g in self.assembled]

    def euler_characteristic(self) -> int:
        return sum((-1) ** i * b for i, b in enumerate(self.betti()))

    def is_certain(self, degree: int) -> bool:
        return not (self.extension_flags[degree] or self.undetermined[degree])


# ---------------------------------------------------------------------------
# pages


def e2_page(bundle: AffineBundle) -> SpectralPage:
    """``E₂^{p,q} = H^p(M, ∧^q Λ*)`` with its ``d₂`` maps."""
    dim_m, n = bundle.base.dimension, bundle.fiber_rank
    entries = {}
    for q in range(n + 1):
        sq = cochain_model(bundle.coefficients(q)).cohomology
        for p in range(dim_m + 1):
            entries[(p, q)] = PageEntry((sq[p],))
    page = SpectralPage(2, dim_m, n, entries)
    d2 = {}
    for (p, q) in entries:
        if q >= 1 and p + 2 <= dim_m:
            d2[(p, q)] = d2_map(bundle, page, p, q)
    return SpectralPage(2, dim_m, n, entries, d2)


def d2_cochain_matrix(bundle: AffineBundle, p: int, q: int) -> np.ndarray:
    """Cochain-level ``a ↦ c ⌣ a`` (contracted) from ``C^p(∧^q Λ*)`` to ``C^{p+2}(∧^{q−1} Λ*)``."""
    src = cochain_model(bundle.coefficients(q))
    dst = cochain_model(bundle.coefficients(q - 1))
    rows, cols = dst.dim(p + 2), src.dim(p)
    out = zeros(rows, cols)
    pairing = contraction_pairing(bundle.fiber_rank, q)
    sign = -1 if p % 2 else 1
    c = bundle.chern.representative
    for j in range(cols):
        e = [0] * cols
        e[j] = 1
        col = cup_cochains(bundle.lam, 2, c, src.system, p, e, pairing)
        for i, x in enumerate(col):
            out[i, j] = sign * x
    return out


def d2_map(bundle: AffineBundle, page: SpectralPage, p: int, q: int) -> GroupHom:
    f = d2_cochain_matrix(bundle, p, q)
    return induced_map(f, page.entries[(p, q)].levels[0], page.entries[(p + 2, q - 1)].levels[0])


def apply_d2(bundle: AffineBundle, page: SpectralPage) -> SpectralPage:
    """``E₃ = ker d₂ / im d₂``, entries refined from ``E₂``."""
    if page.stage != 2:
        raise ValueError("apply_d2 expects the E₂ page")
    entries = {}
    for (p, q), entry in page.entries.items():
        g = entry.group
        incoming = page.differentials.get((p - 2, q + 1)) or GroupHom.zero(FgAbGroup(), g)
        outgoing = page.differentials.get((p, q)) or GroupHom.zero(g, FgAbGroup())
        entries[(p, q)] = entry.refine(homology(incoming, outgoing))
    return SpectralPage(3, page.base_dim, page.fiber_rank, entries)


def e_infinity(bundle: AffineBundle, page: SpectralPage) -> SpectralPage:
    """Declare ``E₃`` final where every later differential is structurally zero.

    Entries touched by a ``d_r`` (``r ≥ 3``) with nonzero source and target
    are flagged undetermined rather than guessed.
    """
    if page.stage < 3:
        raise ValueError("e_infinity expects a page at stage 3 or later")
    flagged: set[tuple[int, int]] = set()
    dim_m, n = page.base_dim, page.fiber_rank
    for r in range(max(3, int(page.stage)), dim_m + 2):
        for (p, q) in page.entries:
            tgt = (p + r, q - r + 1)
            if tgt in page.entries and not page.group(p, q).is_trivial() and not page.group(*tgt).is_trivial():
                flagged.update({(p, q), tgt})
    return SpectralPage(
        float("inf"), dim_m, n, page.entries, {}, final=not flagged, undetermined=frozenset(flagged)
    )


def final_page(bundle: AffineBundle) -> SpectralPage:
    return e_infinity(bundle, apply_d2(bundle, e2_page(bundle)))


# ---------------------------------------------------------------------------
# assembly


def _ext_possible(quotient: FgAbGroup, sub: FgAbGroup) -> bool:
    """Whether ``Ext(quotient, sub) ≠ 0``."""
    if not quotient.invariant_factors or sub.is_trivial():
        return False
    if sub.free_rank:
        return True
    return any(gcd(a, b) > 1 for a in quotient.invariant_factors for b in sub.invariant_factors)


def total_cohomology(page: SpectralPage, policy: ExtensionPolicy = ExtensionPolicy.SPLIT, orientable: bool | None = None) -> TotalCohomology:
    """Assemble ``H^i(X)`` from the final page.

    ``SPLIT`` takes the direct sum of the pieces and flags any degree where a
    nontrivial extension is possible. ``PD_ASSISTED`` additionally resolves a
    flagged degree on a closed orientable total space when the Poincaré-dual
    torsion degree is itself unambiguous.
    """
    total_dim = page.base_dim + page.fiber_rank
    pieces, assembled, flags, undetermined = [], [], [], []
    for i in range(total_dim + 1):
        parts = tuple((p, page.group(p, i - p)) for p in range(page.base_dim + 1) if 0 <= i - p <= page.fiber_rank)
        pieces.append(parts)
        total = FgAbGroup()
        for _, g in parts:
            total = total + g
        assembled.append(total)
        ambiguous = any(
            _ext_possible(gq, gs) for k, (pq, gq) in enumerate(parts) for ps, gs in parts[k + 1 :]
        )
        flags.append(ambiguous)
        undetermined.append(any((p, i - p) in page.undetermined for p, _ in parts))

    if policy is ExtensionPolicy.PD_ASSISTED and orientable:
        for i in range(total_dim + 1):
            dual_deg = total_dim - i + 1
            if flags[i] and 0 <= dual_deg <= total_dim and not flags[dual_deg] and not undetermined[dual_deg]:
                candidate = FgAbGroup(assembled[i].free_rank, assembled[dual_deg].invariant_factors)
                if candidate.torsion_order <= assembled[i].torsion_order:
                    assembled[i] = candidate
                    flags[i] = False
    return TotalCohomology(tuple(pieces), tuple(assembled), tuple(flags), tuple(undetermined), policy)


# ---------------------------------------------------------------------------
# orientation


@dataclass(frozen=True)
class OrientationData:
    w1_vertical: Z2Class
    w1_base: Z2Class
    total_orientable: bool


def orientation_data(bundle: AffineBundle) -> OrientationData:
    wv = bundle.lam.w1()
    wb = base_w1(bundle.base)
    return OrientationData(wv, wb, (wv + wb).is_zero())
