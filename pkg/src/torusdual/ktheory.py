"""Twisted K-theory of torus-bundle total spaces.

Two ingredients:

* the flux-move machine on pairs ``(j, k)`` (Chern class, flux): ``swap``,
  ``shift`` and the Euclidean reduction to ``(gcd, 0)``;
* an Atiyah–Hirzebruch engine with ``d₃ = −h⌣`` (``Sq³`` vanishes in total
  dimension at most 5) acting on the total-space cohomology assembled from
  the Leray–Serre pipeline.

The cup product with ``h`` is realised on the final Leray–Serre page: ``h``
sits in filtration 2 through the class of ``k`` in ``E∞^{2,1}``, so
``h⌣`` sends ``E∞^{p,q}`` to ``E∞^{p+2,q+1}``. This graded component is the
whole map whenever no piece of filtration ``≥ p+3`` can receive it, which is
checked and recorded on every datum.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, NamedTuple, Sequence

from .abelian import FgAbGroup, GroupHom, homology, zeros
from .localsys import (
    LocalSystem,
    MappingTorus,
    Torus,
    cup_cochains,
    wedge_basis,
    merge_sign,
)
from .lsss import AffineBundle, SpectralPage, final_page, total_cohomology, _ext_possible

import numpy as np


class ShiftUndefined(ValueError):
    pass


class Sq3Unjustified(ValueError):
    pass


class UnknownFamily(ValueError):
    pass


# ---------------------------------------------------------------------------
# flux moves


class TwistPair(NamedTuple):
    j: int
    k: int


def swap(pair: TwistPair) -> TwistPair:
    return TwistPair(pair.k, pair.j)


def shift(pair: TwistPair, times: int = 1) -> TwistPair:
    """``(j, k) ↦ (j, k + times·j)``; the twist class is unchanged."""
    if pair.j == 0:
        raise ShiftUndefined("shifting is only meaningful for j ≠ 0")
    return TwistPair(pair.j, pair.k + times * pair.j)


class Move(NamedTuple):
    kind: str  # "swap" or "shift"
    times: int = 0

    def apply(self, pair: TwistPair) -> TwistPair:
        return swap(pair) if self.kind == "swap" else shift(pair, self.times)

    def __str__(self) -> str:
        return "swap" if self.kind == "swap" else f"shift({self.times:+d})"


SWAP = Move("swap")
_NEGATE = (Move("shift", 1), SWAP, Move("shift", -2), SWAP, Move("shift", 1))


def normal_form(pair: TwistPair) -> tuple[TwistPair, list[Move]]:
    """Reduce ``(j, k)`` to ``(gcd(j, k), 0)`` by swaps and shifts, returning the moves."""
    moves: list[Move] = []
    j, k = pair
    while k:
        if j == 0:
            j, k = k, j
            moves.append(SWAP)
            continue
        r = k % abs(j)
        if r != k:
            moves.append(Move("shift", (r - k) // j))
            k = r
        if k:
            j, k = k, j
            moves.append(SWAP)
    if j < 0:
        # (a, 0) → (a, a) → (a, −a) → (−a, a) → (−a, 0)
        moves.extend(_NEGATE)
        j = -j
    return TwistPair(j, 0), moves


def replay(pair: TwistPair, moves: Iterable[Move]) -> TwistPair:
    for m in moves:
        pair = m.apply(pair)
    return pair


# ---------------------------------------------------------------------------
# twisted cohomology data


@dataclass(frozen=True, eq=False)
class TwistedCohDatum:
    """Total-space cohomology with the ``d₃`` maps of the twisted AHSS.

    ``groups[i]`` is ``H^i`` in split coordinates (the concatenated canonical
    coordinates of its ``E∞`` pieces) and ``d3maps[i]`` is ``H^i → H^{i+3}``.
    """

    groups: tuple[FgAbGroup, ...]
    d3maps: tuple[GroupHom | None, ...]
    sq3_assumed_zero: bool = True
    cohomology_flags: tuple[bool, ...] = ()
    filtration_exact: bool = True
    hand_entered: bool = False
    notes: tuple[str, ...] = ()

    @property
    def dimension(self) -> int:
        return len(self.groups) - 1

    def d3(self, i: int) -> GroupHom:
        src = self.groups[i] if 0 <= i < len(self.groups) else FgAbGroup()
        tgt = self.groups[i + 3] if 0 <= i + 3 < len(self.groups) else FgAbGroup()
        m = self.d3maps[i] if 0 <= i < len(self.d3maps) else None
        return m if m is not None else GroupHom.zero(src, tgt)


@dataclass(frozen=True)
class KResult:
    """Twisted K-groups by parity: surviving pieces, split assembly and flags."""

    pieces: dict[int, tuple[tuple[int, FgAbGroup], ...]]
    assembled: dict[int, FgAbGroup]
    extension_flags: dict[int, bool]
    notes: tuple[str, ...] = ()

    def group(self, parity: int) -> FgAbGroup:
        return self.assembled[parity]

    def to_json(self) -> dict:
        return {
            f"K{p}": {
                "pieces": [[i, str(g)] for i, g in self.pieces[p]],
                "assembled": str(self.assembled[p]),
                "extension_ambiguous": self.extension_flags[p],
            }
            for p in (0, 1)
        }


def ahss(datum: TwistedCohDatum) -> KResult:
    """``E₄^i = ker d₃ / im d₃`` and parity-wise assembly under the split policy."""
    if datum.dimension >= 6 and not datum.sq3_assumed_zero:
        raise Sq3Unjustified("Sq³ must be supplied in total dimension ≥ 6")
    if datum.dimension >= 6:
        raise Sq3Unjustified("the Sq³ = 0 guard only covers total dimension ≤ 5")
    e4 = []
    for i in range(datum.dimension + 1):
        outgoing = datum.d3(i)
        incoming = datum.d3(i - 3) if i >= 3 else GroupHom.zero(FgAbGroup(), datum.groups[i])
        e4.append(homology(incoming, outgoing).group)
    pieces, assembled, flags = {}, {}, {}
    for parity in (0, 1):
        parts = tuple((i, g) for i, g in enumerate(e4) if i % 2 == parity)
        pieces[parity] = parts
        total = FgAbGroup()
        for _, g in parts:
            total = total + g
        assembled[parity] = total
        ambiguous = any(_ext_possible(gq, gs) for a, (_, gq) in enumerate(parts) for _, gs in parts[a + 1 :])
        coh_ambiguous = any(datum.cohomology_flags[i] for i, _ in parts) if datum.cohomology_flags else False
        flags[parity] = ambiguous or coh_ambiguous or not datum.filtration_exact
    notes = list(datum.notes)
    if datum.hand_entered:
        notes.append("d3 maps were entered by hand")
    return KResult(pieces, assembled, flags, tuple(notes))


def rank_bookkeeping(hom: GroupHom) -> bool:
    """``rank ker + rank im = rank domain``."""
    return hom.kernel().free_rank + hom.image().free_rank == hom.source.free_rank


# ---------------------------------------------------------------------------
# catalog families


def wedge_pairing(rank: int, q: int) -> np.ndarray:
    """``∧^q V ⊗ V → ∧^{q+1} V``, ``e^I ⊗ e^a ↦ e^I ∧ e^a``."""
    src = wedge_basis(rank, q)
    dst = {s: i for i, s in enumerate(wedge_basis(rank, q + 1))}
    out = np.zeros((len(dst), len(src), rank), dtype=object)
    for i, subset in enumerate(src):
        for a in range(rank):
            sign = merge_sign(subset, (a,))
            if sign:
                out[dst[tuple(sorted(subset + (a,)))], i, a] += sign
    return out


@dataclass(frozen=True)
class Family:
    """A base with a fixed monodromy; cells are indexed by ``(j, k)``."""

    name: str
    lam: LocalSystem
    description: str

    def bundle(self, j: int) -> AffineBundle:
        return AffineBundle.from_coordinates(self.lam, [j])

    def flux_class(self, k: int):
        from .localsys import CohClass

        return CohClass.from_coordinates(self.lam.dual(), 2, [k])


def torus_family(m: int = 2, n: int = 3) -> Family:
    lam = LocalSystem.from_matrices(Torus(2), [[[1, m], [0, 1]], [[1, n], [0, 1]]]).validate()
    return Family("t2-unipotent", lam, f"T^2 base, unipotent monodromy with off-diagonal entries ({m}, {n})")


def antipodal_family() -> Family:
    lam = LocalSystem.from_matrices(MappingTorus.antipodal_sphere(2), [[[-1, -1], [0, -1]]]).validate()
    return Family("s2-antipodal", lam, "mapping torus of the antipodal map on S^2, monodromy [[-1,-1],[0,-1]]")


FAMILIES = {"t2-unipotent": torus_family, "s2-antipodal": antipodal_family}


def family(name: str) -> Family:
    try:
        return FAMILIES[name]()
    except KeyError:
        raise UnknownFamily(f"unknown family {name!r}; choose from {sorted(FAMILIES)}") from None


@lru_cache(maxsize=256)
def _page(lam: LocalSystem, j: int) -> SpectralPage:
    return final_page(AffineBundle.from_coordinates(lam, [j]))


def twisted_datum(fam: Family, pair: TwistPair) -> TwistedCohDatum:
    """Cohomology of ``X_j`` and ``d₃ = −h_k⌣`` built from the Leray–Serre pipeline."""
    lam = fam.lam
    page = _page(lam, pair.j)
    tc = total_cohomology(page)
    dim_m, n = page.base_dim, page.fiber_rank
    total_dim = dim_m + n
    k_rep = list(fam.flux_class(pair.k).representative)

    # split coordinates: pieces of H^i ordered by p
    layout: list[list[tuple[int, int, int]]] = []  # per degree: (p, offset, size)
    for i in range(total_dim + 1):
        off, rows = 0, []
        for p, g in tc.pieces[i]:
            rows.append((p, off, g.num_generators))
            off += g.num_generators
        layout.append(rows)

    exact = True
    notes = []
    d3maps: list[GroupHom | None] = []
    for i in range(total_dim + 1):
        if i + 3 > total_dim:
            d3maps.append(None)
            continue
        src_g, tgt_g = tc.assembled[i], tc.assembled[i + 3]
        mat = zeros(tgt_g.num_generators, src_g.num_generators)
        for p, off, size in layout[i]:
            q = i - p
            if size == 0:
                continue
            # hidden components would land in filtration ≥ p + 3
            if any(pp >= p + 3 and g.num_generators for pp, g in tc.pieces[i + 3]):
                exact = False
            target = next(((pp, o, s) for pp, o, s in layout[i + 3] if pp == p + 2), None)
            if target is None or q + 1 > n or target[2] == 0:
                continue
            src_entry = page.entries[(p, q)]
            tgt_entry = page.entries[(p + 2, q + 1)]
            pairing = wedge_pairing(n, q)
            left = lam.dual().exterior_power(q)
            for c in range(size):
                coords = [int(t == c) for t in range(size)]
                rep = src_entry.lift(coords)
                prod = cup_cochains(left, p, rep, lam.dual(), 2, k_rep, pairing)
                image = tgt_entry.coordinates(prod)
                for r, val in enumerate(image):
                    mat[target[1] + r, off + c] = -val
        d3maps.append(GroupHom(src_g, tgt_g, mat))
    if not exact:
        notes.append("h-cup has components the graded product cannot see; d3 is approximate")
    if page.undetermined:
        notes.append(f"Leray-Serre entries undetermined: {sorted(page.undetermined)}")
    flags = tuple(a or b for a, b in zip(tc.extension_flags, tc.undetermined))
    return TwistedCohDatum(
        tuple(tc.assembled), tuple(d3maps), True, flags, exact and not page.undetermined, False, tuple(notes)
    )


# ---------------------------------------------------------------------------
# tables


@dataclass(frozen=True)
class KCell:
    pair: TwistPair
    direct: KResult
    resolved: dict[int, FgAbGroup]
    resolved_from: TwistPair | None
    normal_form: TwistPair
    moves: tuple[Move, ...]
    consistent: bool

    def to_json(self) -> dict:
        return {
            "j": self.pair.j,
            "k": self.pair.k,
            "normal_form": [self.normal_form.j, self.normal_form.k],
            "moves": [str(m) for m in self.moves],
            "direct": self.direct.to_json(),
            "K0": str(self.resolved[0]),
            "K1": str(self.resolved[1]),
            "resolved_from": None if self.resolved_from is None else [self.resolved_from.j, self.resolved_from.k],
            "consistent": self.consistent,
        }


def k_direct(fam: Family, pair: TwistPair) -> KResult:
    return ahss(twisted_datum(fam, pair))


def admissible_extension(result: FgAbGroup, pieces: Sequence[FgAbGroup]) -> bool:
    """Necessary conditions for ``result`` to be an iterated extension of ``pieces``."""
    free = sum(g.free_rank for g in pieces)
    tors = 1
    for g in pieces:
        tors *= g.torsion_order
    return result.free_rank == free and tors % result.torsion_order == 0 if result.torsion_order else False


def k_cell(fam: Family, pair: TwistPair) -> KCell:
    """Direct AHSS result, with flagged parities resolved along the move orbit.

    The orbit of ``(j, k)`` contains ``(0, d)``; when its assembly is
    unambiguous it fixes the groups for the whole orbit, and the direct
    pieces of ``(j, k)`` are checked to admit that group as an extension.
    """
    direct = k_direct(fam, pair)
    nf, moves = normal_form(pair)
    resolved = dict(direct.assembled)
    source = None
    consistent = True
    if any(direct.extension_flags.values()):
        rep = swap(nf)
        rep_result = k_direct(fam, rep)
        for parity in (0, 1):
            if direct.extension_flags[parity] and not rep_result.extension_flags[parity]:
                candidate = rep_result.assembled[parity]
                ok = admissible_extension(candidate, [g for _, g in direct.pieces[parity]])
                consistent &= ok
                if ok:
                    resolved[parity] = candidate
                    source = rep
    return KCell(pair, direct, resolved, source, nf, tuple(moves), consistent)


def _resolve(fam: Family | str) -> Family:
    return family(fam) if isinstance(fam, str) else fam


def ktable(fam: Family | str, j_range: Iterable[int], k_range: Iterable[int]) -> list[KCell]:
    fam = _resolve(fam)
    return [k_cell(fam, TwistPair(j, k)) for j in j_range for k in k_range]


@dataclass(frozen=True)
class MoveReport:
    orbits: dict[TwistPair, list[TwistPair]]
    violations: list[str]

    @property
    def passed(self) -> bool:
        return not self.violations


def move_invariance_check(fam: Family | str, pairs: Iterable[TwistPair], datum_override=None) -> MoveReport:
    """Check that K-theory data agree along every swap/shift orbit.

    Compared across each orbit: free ranks per parity, every unambiguous
    assembled group, and admissibility of the resolved group for each
    member's own pieces. ``datum_override(pair)`` may replace the datum for
    negative controls.
    """
    fam = _resolve(fam)
    orbits: dict[TwistPair, list[TwistPair]] = {}
    for pair in pairs:
        orbits.setdefault(normal_form(pair)[0], []).append(pair)
    violations = []
    for nf, members in orbits.items():
        results = {}
        for pair in members:
            datum = datum_override(pair) if datum_override else twisted_datum(fam, pair)
            results[pair] = ahss(datum)
        for parity in (0, 1):
            ranks = {r.assembled[parity].free_rank for r in results.values()}
            if len(ranks) > 1:
                violations.append(f"orbit {tuple(nf)}: K{parity} free ranks differ {sorted(ranks)}")
            firm = {str(r.assembled[parity]) for r in results.values() if not r.extension_flags[parity]}
            if len(firm) > 1:
                violations.append(f"orbit {tuple(nf)}: K{parity} unambiguous groups differ {sorted(firm)}")
            if len(firm) == 1:
                value = FgAbGroup.parse(next(iter(firm)))
                for pair, r in results.items():
                    if r.extension_flags[parity] and not admissible_extension(value, [g for _, g in r.pieces[parity]]):
                        violations.append(f"{tuple(pair)}: K{parity} = {value} is not an extension of its pieces")
    return MoveReport(orbits, violations)
