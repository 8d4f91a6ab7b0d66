"""Topological T-duality at the level of classification data.

A flux is carried by a datum ``(ξ, k, h₃)`` with ``ξ ∈ H¹(M, Z/2)``,
``k ∈ H²(M, Λ*)`` and ``h₃ ∈ H³(M, Z)``. Dualizing replaces ``Λ`` by ``Λ*``,
takes ``ĉ = k`` and ``k̂ = c``, transports the grading by ``w₁(Λ)`` and keeps
the base flux ``h₃``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .localsys import (
    CohClass,
    LocalSystem,
    Z2Class,
    contract_with_chern,
    cup,
    evaluation_pairing,
)
from .lsss import AffineBundle, SpectralPage, apply_d2, e2_page, e_infinity


class CoefficientMismatch(ValueError):
    pass


class UnsupportedNonOrientableVertical(ValueError):
    """The vertical bundle is non-orientable and the W₃ correction is not modelled."""


@dataclass(frozen=True)
class FluxDatum:
    xi: Z2Class
    k: CohClass
    h3: CohClass

    @classmethod
    def from_coordinates(cls, bundle: AffineBundle, xi=None, k=None, h3=None) -> "FluxDatum":
        """Build a datum from canonical coordinates (missing parts default to zero)."""
        lam_dual = bundle.lam.dual()
        trivial = LocalSystem.trivial(bundle.base)
        xi_cls = Z2Class(tuple(xi)) if xi is not None else Z2Class.zero(bundle.base)
        k_cls = CohClass.from_coordinates(lam_dual, 2, list(k)) if k is not None else CohClass.zero(lam_dual, 2)
        if h3 is not None and bundle.base.dimension >= 3:
            h3_cls = CohClass.from_coordinates(trivial, 3, list(h3))
        else:
            h3_cls = CohClass.zero(trivial, 3)
        return cls(xi_cls, k_cls, h3_cls)

    @classmethod
    def zero(cls, bundle: AffineBundle) -> "FluxDatum":
        return cls.from_coordinates(bundle)


@dataclass(frozen=True)
class Dualizability:
    dualizable: bool
    certificate: tuple[int, ...] | None
    obstruction: tuple[int, ...] | None
    certificate_final: bool

    def __bool__(self) -> bool:
        return self.dualizable


@dataclass(frozen=True)
class RelationReport:
    results: dict[str, bool]
    notes: tuple[str, ...] = ()

    @property
    def all_pass(self) -> bool:
        return all(self.results.values())

    def to_json(self) -> dict:
        return {"relations": dict(self.results), "all_pass": self.all_pass, "notes": list(self.notes)}


@dataclass(frozen=True, eq=False)
class DualPair:
    bundle: AffineBundle
    flux: FluxDatum
    dual_bundle: AffineBundle
    dual_flux: FluxDatum
    annotations: tuple[str, ...] = ()
    report: RelationReport | None = field(default=None)


def _check_coefficients(bundle: AffineBundle, flux: FluxDatum) -> None:
    if flux.k.degree != 2 or flux.k.system != bundle.lam.dual():
        raise CoefficientMismatch("k must live in H²(M, Λ*)")
    if flux.h3.degree != 3 or flux.h3.system != LocalSystem.trivial(bundle.base):
        raise CoefficientMismatch("h₃ must live in H³(M, Z)")
    if len(flux.xi.bits) != bundle.base.num_generators:
        raise CoefficientMismatch("ξ must have one bit per π₁ generator of the base")


def _e3(bundle: AffineBundle) -> SpectralPage:
    return apply_d2(bundle, e2_page(bundle))


def e_infinity_21_class(bundle: AffineBundle, cls: CohClass, page: SpectralPage | None = None) -> tuple[int, ...]:
    """Coordinates of a class of ``H²(M, Λ*)`` in ``E₃^{2,1}`` (which is ``E∞^{2,1}`` when final)."""
    page = page or _e3(bundle)
    return page.entries[(2, 1)].coordinates(list(cls.representative))


def is_dualizable(bundle: AffineBundle, flux: FluxDatum) -> Dualizability:
    """Check ``d₂(k) = 0`` in ``H⁴(M, Z)`` and certify the class of ``k`` in ``E∞^{2,1}``."""
    _check_coefficients(bundle, flux)
    if bundle.fiber_rank == 0:
        return Dualizability(True, (), None, True)
    obstruction = contract_with_chern(bundle.chern, flux.k, 1)
    if not obstruction.is_zero():
        return Dualizability(False, None, obstruction.coordinates, False)
    page = _e3(bundle)
    final = e_infinity(bundle, page)
    return Dualizability(True, e_infinity_21_class(bundle, flux.k, page), None, (2, 1) not in final.undetermined)


def dualize(bundle: AffineBundle, flux: FluxDatum, strict: bool = False, check: bool = True) -> DualPair:
    """Construct the T-dual ``(Λ*, ĉ = k)`` with flux ``(ξ + w₁, c, h₃)``."""
    verdict = is_dualizable(bundle, flux)
    if not verdict:
        raise ValueError(f"flux is not T-dualizable: d₂(k) has coordinates {verdict.obstruction}")
    notes = []
    w1 = bundle.lam.w1()
    if not w1.is_zero():
        if strict:
            raise UnsupportedNonOrientableVertical("w₁(Λ) ≠ 0: the W₃ correction to the dual flux is not modelled")
        notes.append("w1 of the vertical bundle is nonzero; the W3 correction to the dual flux was not computed")
    lam_hat = bundle.lam.dual()
    dual_bundle = AffineBundle(lam_hat, flux.k)
    # (Λ*)* is Λ entrywise, so c already lives in H²(M, Λ̂*).
    dual_flux = FluxDatum(flux.xi + w1, bundle.chern, flux.h3)
    pair = DualPair(bundle, flux, dual_bundle, dual_flux, tuple(notes))
    if check:
        pair = DualPair(bundle, flux, dual_bundle, dual_flux, tuple(notes), check_relations(pair))
    return pair


def check_relations(pair: DualPair) -> RelationReport:
    b, f, bh, fh = pair.bundle, pair.flux, pair.dual_bundle, pair.dual_flux
    results: dict[str, bool] = {}
    results["dual_monodromy"] = bh.lam == b.lam.dual()
    results["xi_transport"] = fh.xi == f.xi + b.lam.w1()
    product = cup(b.chern, bh.chern, evaluation_pairing(b.fiber_rank), LocalSystem.trivial(b.base))
    results["c_cup_c_hat_zero"] = product.is_zero()
    try:
        results["h_equals_c_hat"] = e_infinity_21_class(b, f.k) == e_infinity_21_class(b, bh.chern)
    except ValueError:
        results["h_equals_c_hat"] = False
    try:
        results["h_hat_equals_c"] = e_infinity_21_class(bh, fh.k) == e_infinity_21_class(bh, b.chern)
    except ValueError:
        results["h_hat_equals_c"] = False
    results["base_flux_preserved"] = fh.h3.same_class(f.h3)
    return RelationReport(results, pair.annotations)


def involution_check(bundle: AffineBundle, flux: FluxDatum, strict: bool = False) -> bool:
    once = dualize(bundle, flux, strict=strict, check=False)
    twice = dualize(once.dual_bundle, once.dual_flux, strict=strict, check=False)
    back, back_flux = twice.dual_bundle, twice.dual_flux
    # ξ picks up w₁(Λ) + w₁(Λ*) = 2 w₁ = 0
    return (
        back.lam == bundle.lam
        and back.chern.same_class(bundle.chern)
        and back_flux.xi == flux.xi
        and back_flux.k.same_class(flux.k)
        and back_flux.h3.same_class(flux.h3)
    )
