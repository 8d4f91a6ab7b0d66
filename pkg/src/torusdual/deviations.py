"""Ledger comparing printed reference tables with values derived by the pipelines.

The printed values ship as package data. Each cell either matches the derived
value or carries a named justification; anything else is an unexplained
deviation.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cache
from importlib import resources
from math import gcd

from .abelian import FgAbGroup
from .ktheory import TwistPair, family, k_cell, _page
from .localsys import LocalSystem, cohomology_groups
from .lsss import total_cohomology


@dataclass(frozen=True)
class LedgerCell:
    id: str
    source: str
    printed: tuple[str, ...]
    derived: tuple[str, ...]
    justification_key: str | None
    justification: str | None

    @property
    def matches(self) -> bool:
        return self.printed == self.derived

    @property
    def status(self) -> str:
        if self.matches:
            return "stale-justification" if self.justification_key else "match"
        return "explained" if self.justification_key else "unexplained"

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "source": self.source,
            "printed": list(self.printed),
            "derived": list(self.derived),
            "status": self.status,
            "justification": self.justification,
        }


@cache
def printed_values() -> dict:
    text = resources.files("torusdual").joinpath("data/printed_values.json").read_text()
    return json.loads(text)


def _canonical(template: str, params: dict) -> str:
    return str(FgAbGroup.parse(template.format(**params)))


def derive(cell: dict) -> tuple[str, ...]:
    fam = family(cell["family"])
    quantity = cell["quantity"]
    if quantity == "base_cohomology":
        system = fam.lam if cell["coefficients"] == "lambda" else LocalSystem.trivial(fam.lam.base)
        return tuple(str(g) for g in cohomology_groups(system))
    if quantity == "total_cohomology":
        return tuple(str(g) for g in total_cohomology(_page(fam.lam, cell["j"])).assembled)
    if quantity == "ktheory":
        result = k_cell(fam, TwistPair(cell["j"], cell["k"]))
        return (str(result.resolved[0]), str(result.resolved[1]))
    raise ValueError(f"unknown quantity {quantity!r}")


def cell_parameters(cell: dict) -> dict:
    params = dict(m=2, n=3)
    if cell["family"] == "t2-unipotent":
        lam = family(cell["family"]).lam
        params = dict(m=int(lam.matrix(0)[0, 1]), n=int(lam.matrix(1)[0, 1]))
    j, k = cell.get("j", 0), cell.get("k", 0)
    return params | dict(j=j, k=k, d=gcd(j, k))


def ledger() -> list[LedgerCell]:
    data = printed_values()
    out = []
    for cell in data["cells"]:
        params = cell_parameters(cell)
        printed = tuple(_canonical(t, params) for t in cell["printed"])
        key = cell.get("justification")
        out.append(
            LedgerCell(cell["id"], cell["source"], printed, derive(cell), key, data["justifications"].get(key) if key else None)
        )
    return out


def unexplained(cells: list[LedgerCell]) -> list[LedgerCell]:
    return [c for c in cells if c.status in ("unexplained", "stale-justification")]
