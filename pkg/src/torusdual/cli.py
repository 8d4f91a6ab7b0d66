"""``tdual``: configuration-driven front end for the cohomology, duality and K-theory tools."""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from . import deviations, hori, ktheory
from .localsys import (
    FiberModel,
    LocalSystem,
    MappingTorus,
    NonCommuting,
    NonUnimodular,
    Torus,
    cohomology_groups,
    freeze,
)
from .lsss import AffineBundle, ExtensionPolicy, apply_d2, e2_page, final_page, orientation_data, total_cohomology
from .tdual import FluxDatum, dualize, involution_check, is_dualizable

EXIT_OK, EXIT_CONFIG, EXIT_UNDETERMINED, EXIT_INVARIANT = 0, 1, 2, 3
COMMANDS = ("cohomology", "bundle", "dualize", "hori-selftest", "ktheory", "tables")


class ConfigError(ValueError):
    def __init__(self, where: str, message: str):
        super().__init__(f"{where}: {message}")
        self.where = where


# ---------------------------------------------------------------------------
# configuration


def _int_matrix(value, where: str) -> list[list[int]]:
    if not isinstance(value, list) or not all(isinstance(r, list) for r in value):
        raise ConfigError(where, "expected a list of integer rows")
    for i, row in enumerate(value):
        for j, x in enumerate(row):
            if not isinstance(x, int) or isinstance(x, bool):
                raise ConfigError(f"{where}[{i}][{j}]", f"expected an integer, got {x!r}")
    if len({len(r) for r in value}) > 1:
        raise ConfigError(where, "rows have different lengths")
    return value


def _int_list(value, where: str) -> list[int]:
    if not isinstance(value, list):
        raise ConfigError(where, "expected a list of integers")
    for i, x in enumerate(value):
        if not isinstance(x, int) or isinstance(x, bool):
            raise ConfigError(f"{where}[{i}]", f"expected an integer, got {x!r}")
    return value


def parse_base(entry) -> Torus | MappingTorus:
    if not isinstance(entry, dict) or len(entry) != 1:
        raise ConfigError("base", 'expected one of {"torus": k}, {"antipodal_sphere": d}, {"mapping_torus": {...}}')
    (kind, value), = entry.items()
    if kind == "torus":
        if not isinstance(value, int) or isinstance(value, bool) or value < 1:
            raise ConfigError("base.torus", "expected a positive integer")
        return Torus(value)
    if kind == "antipodal_sphere":
        if not isinstance(value, int) or value < 1:
            raise ConfigError("base.antipodal_sphere", "expected a positive integer")
        return MappingTorus.antipodal_sphere(value)
    if kind == "mapping_torus":
        if not isinstance(value, dict):
            raise ConfigError("base.mapping_torus", "expected an object")
        fiber = value.get("fiber")
        if fiber == "torus":
            return MappingTorus.of_torus(_int_matrix(value.get("matrix"), "base.mapping_torus.matrix"))
        if fiber == "sphere":
            dim = value.get("dim")
            if not isinstance(dim, int) or dim < 1:
                raise ConfigError("base.mapping_torus.dim", "expected a positive integer")
            phi = value.get("phi")
            if not isinstance(phi, list) or len(phi) != dim + 1:
                raise ConfigError("base.mapping_torus.phi", f"expected {dim + 1} matrices, one per degree")
            mats = [_int_matrix(m, f"base.mapping_torus.phi[{i}]") for i, m in enumerate(phi)]
            try:
                base = MappingTorus(FiberModel.sphere(dim), tuple(freeze(m) for m in mats))
                base.check_ring_map()
            except ValueError as exc:
                raise ConfigError("base.mapping_torus.phi", str(exc)) from None
            return base
        raise ConfigError("base.mapping_torus.fiber", 'expected "torus" or "sphere"')
    raise ConfigError(f"base.{kind}", "unknown base type")


@dataclass
class Workbench:
    """Validated configuration."""

    raw: dict
    base: Torus | MappingTorus | None = None
    lam: LocalSystem | None = None
    bundle: AffineBundle | None = None
    flux: FluxDatum | None = None
    options: dict = field(default_factory=dict)


def load_config(data: dict) -> Workbench:
    if not isinstance(data, dict):
        raise ConfigError("<root>", "expected a JSON object")
    if "config" in data and isinstance(data["config"], dict):
        # an emitted JSON report carries its configuration
        data = data["config"]
    wb = Workbench(raw=data, options=data.get("options", {}))
    if not isinstance(wb.options, dict):
        raise ConfigError("options", "expected an object")
    if "base" in data:
        wb.base = parse_base(data["base"])
    if "monodromy" in data:
        if wb.base is None:
            raise ConfigError("monodromy", "requires a base")
        mats = data["monodromy"]
        if not isinstance(mats, list) or len(mats) != wb.base.num_generators:
            raise ConfigError("monodromy", f"expected {wb.base.num_generators} matrices, one per generator")
        mats = [_int_matrix(m, f"monodromy[{i}]") for i, m in enumerate(mats)]
        try:
            wb.lam = LocalSystem.from_matrices(wb.base, mats).validate()
        except (NonUnimodular, NonCommuting, ValueError) as exc:
            raise ConfigError("monodromy", str(exc)) from None
    if "chern" in data:
        if wb.lam is None:
            raise ConfigError("chern", "requires a monodromy")
        coords = _int_list(data["chern"], "chern")
        try:
            wb.bundle = AffineBundle.from_coordinates(wb.lam, coords)
        except ValueError as exc:
            raise ConfigError("chern", str(exc)) from None
    if "flux" in data:
        if wb.bundle is None:
            raise ConfigError("flux", "requires a chern class")
        flux = data["flux"]
        if not isinstance(flux, dict):
            raise ConfigError("flux", "expected an object with xi, k, h3")
        parts = {}
        for key in ("xi", "k", "h3"):
            if key in flux:
                parts[key] = _int_list(flux[key], f"flux.{key}")
        if "xi" in parts and any(b not in (0, 1) for b in parts["xi"]):
            raise ConfigError("flux.xi", "bits must be 0 or 1")
        try:
            wb.flux = FluxDatum.from_coordinates(wb.bundle, **parts)
        except ValueError as exc:
            raise ConfigError("flux", str(exc)) from None
    return wb


def read_config(path: str | None) -> Workbench:
    if path is None:
        return Workbench(raw={})
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(path, exc.strerror or str(exc)) from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}", exc.msg) from None
    return load_config(data)


def _require(wb: Workbench, attr: str, command: str):
    value = getattr(wb, attr)
    if value is None:
        raise ConfigError(attr if attr != "lam" else "monodromy", f"required by the {command} command")
    return value


# ---------------------------------------------------------------------------
# reports


@dataclass
class Table:
    title: str
    header: list[str]
    rows: list[list[str]]

    def to_json(self) -> dict:
        return {"title": self.title, "header": self.header, "rows": self.rows}


@dataclass
class Report:
    command: str
    tables: list[Table] = field(default_factory=list)
    data: dict = field(default_factory=dict)
    undetermined: bool = False
    violations: list[str] = field(default_factory=list)


def _cells(groups) -> list[str]:
    return [str(g) for g in groups]


def _grid_table(title: str, page) -> Table:
    grid = page.grid()
    header = ["q \\ p"] + [str(p) for p in range(page.base_dim + 1)]
    rows = [[str(q)] + _cells(grid[q]) for q in range(len(grid) - 1, -1, -1)]
    return Table(title, header, rows)


def run_cohomology(wb: Workbench, args) -> Report:
    lam = _require(wb, "lam", "cohomology")
    report = Report("cohomology")
    systems = [("Z", LocalSystem.trivial(lam.base)), ("Lambda", lam), ("Lambda*", lam.dual())]
    for q in range(2, lam.rank + 1):
        systems.append((f"wedge^{q} Lambda*", lam.dual().exterior_power(q)))
    header = ["i"] + [name for name, _ in systems]
    columns = [cohomology_groups(s) for _, s in systems]
    rows = [[str(i)] + [str(col[i]) for col in columns] for i in range(lam.base.dimension + 1)]
    report.tables.append(Table("Cohomology of the base", header, rows))
    report.data["cohomology"] = {name: _cells(col) for (name, _), col in zip(systems, columns)}
    return report


def run_bundle(wb: Workbench, args) -> Report:
    bundle = _require(wb, "bundle", "bundle")
    report = Report("bundle")
    e2 = e2_page(bundle)
    e3 = apply_d2(bundle, e2)
    fin = final_page(bundle)
    policy = ExtensionPolicy.PD_ASSISTED if wb.options.get("policy") == "pd_assisted" else ExtensionPolicy.SPLIT
    orient = orientation_data(bundle)
    tc = total_cohomology(fin, policy, orient.total_orientable)
    report.tables += [_grid_table("E2 page", e2), _grid_table("E3 page", e3), _grid_table("E-infinity page", fin)]
    rows = []
    for i, g in enumerate(tc.assembled):
        status = "undetermined" if tc.undetermined[i] else "extension" if tc.extension_flags[i] else "ok"
        rows.append([str(i), str(g), " | ".join(f"p={p}: {h}" for p, h in tc.pieces[i]), status])
    report.tables.append(Table("Cohomology of the total space", ["i", "H^i", "pieces", "status"], rows))
    chi = tc.euler_characteristic()
    report.data = {
        "E2": [_cells(r) for r in e2.grid()],
        "E3": [_cells(r) for r in e3.grid()],
        "Einf": [_cells(r) for r in fin.grid()],
        "H": _cells(tc.assembled),
        "extension_flags": list(tc.extension_flags),
        "undetermined": sorted([list(x) for x in fin.undetermined]),
        "euler_characteristic": chi,
        "total_orientable": orient.total_orientable,
    }
    report.undetermined = bool(fin.undetermined) or any(tc.extension_flags)
    if isinstance(bundle.base, Torus) and bundle.base.k == 2 and chi != 0:
        report.violations.append(f"Euler characteristic {chi} != 0 over T^2")
    return report


def run_dualize(wb: Workbench, args) -> Report:
    bundle = _require(wb, "bundle", "dualize")
    flux = wb.flux or FluxDatum.zero(bundle)
    report = Report("dualize")
    verdict = is_dualizable(bundle, flux)
    if not verdict:
        report.data = {"dualizable": False, "obstruction": list(verdict.obstruction)}
        report.tables.append(Table("Dualizability", ["dualizable", "obstruction"], [["no", str(verdict.obstruction)]]))
        return report
    pair = dualize(bundle, flux, strict=args.strict)
    rel = pair.report
    rows = [
        ["Chern class", str(bundle.chern.coordinates), str(pair.dual_bundle.chern.coordinates)],
        ["flux k", str(flux.k.coordinates), str(pair.dual_flux.k.coordinates)],
        ["xi", str(flux.xi.bits), str(pair.dual_flux.xi.bits)],
        ["h3", str(flux.h3.coordinates), str(pair.dual_flux.h3.coordinates)],
    ]
    report.tables.append(Table("T-dual pair", ["datum", "original", "dual"], rows))
    report.tables.append(
        Table("Relations", ["relation", "result"], [[k, "pass" if v else "FAIL"] for k, v in rel.results.items()])
    )
    involutive = involution_check(bundle, flux)
    report.data = {
        "dualizable": True,
        "certificate": list(verdict.certificate),
        "dual_chern": list(pair.dual_bundle.chern.coordinates),
        "dual_k": list(pair.dual_flux.k.coordinates),
        "dual_xi": list(pair.dual_flux.xi.bits),
        "relations": rel.to_json(),
        "involution": involutive,
    }
    report.undetermined = not verdict.certificate_final or bool(pair.annotations)
    if not rel.all_pass:
        report.violations.append("relations report failed")
    if not involutive:
        report.violations.append("dualizing twice did not return the input")
    return report


def run_selftest(wb: Workbench, args) -> Report:
    opts = wb.raw.get("selftest", {})
    start = time.perf_counter()
    suite = hori.property_suite(
        seed=args.seed,
        n_max=opts.get("n_max", 4),
        m_max=opts.get("m_max", 3),
        models=opts.get("models", 200),
        pairs=opts.get("pairs", 1000),
        pair_max=opts.get("pair_max", 3),
    )
    elapsed = time.perf_counter() - start
    report = Report("hori-selftest")
    rows = [[name, str(count), str(len(suite.failures.get(name, [])))] for name, count in sorted(suite.checks.items())]
    report.tables.append(Table("Hori property suite", ["property", "checks", "failures"], rows))
    report.data = suite.to_json()
    if not args.quiet:
        print(f"property suite finished in {elapsed:.1f} s", file=sys.stderr)
    if not suite.passed:
        report.violations.append("Hori property suite reported failures")
    return report


def _family(wb: Workbench) -> ktheory.Family:
    opts = wb.raw.get("ktheory", {})
    name = opts.get("family", "t2-unipotent")
    if name == "t2-unipotent" and ("m" in opts or "n" in opts):
        return ktheory.torus_family(opts.get("m", 2), opts.get("n", 3))
    try:
        return ktheory.family(name)
    except ktheory.UnknownFamily as exc:
        raise ConfigError("ktheory.family", str(exc)) from None


def _kcell_row(cell: ktheory.KCell) -> list[str]:
    flags = "".join(f"K{p}" for p in (0, 1) if cell.direct.extension_flags[p])
    return [
        str(cell.pair.j),
        str(cell.pair.k),
        str(cell.resolved[0]),
        str(cell.resolved[1]),
        f"({cell.normal_form.j},{cell.normal_form.k})",
        "" if cell.resolved_from is None else f"({cell.resolved_from.j},{cell.resolved_from.k})",
        flags or "-",
    ]


K_HEADER = ["j", "k", "K^0", "K^1", "normal form", "resolved from", "ambiguous directly"]


def run_ktheory(wb: Workbench, args) -> Report:
    fam = _family(wb)
    opts = wb.raw.get("ktheory", {})
    report = Report("ktheory")
    if args.orbit:
        try:
            j, k = (int(x) for x in args.orbit.split(","))
        except ValueError:
            raise ConfigError("--orbit", "expected two integers j,k") from None
        pair = ktheory.TwistPair(j, k)
        nf, moves = ktheory.normal_form(pair)
        path = [pair]
        for m in moves:
            path.append(m.apply(path[-1]))
        cells = [ktheory.k_cell(fam, p) for p in path]
        report.tables.append(
            Table("Move path", ["step", "move", "pair"], [[str(i), str(m), f"({p.j},{p.k})"] for i, (m, p) in enumerate(zip(["start"] + moves, path))])
        )
        report.tables.append(Table(f"K-theory along the orbit of ({j},{k})", K_HEADER, [_kcell_row(c) for c in cells]))
        check = ktheory.move_invariance_check(fam, path)
        pieces_constant = len({(str(c.resolved[0]), str(c.resolved[1])) for c in cells}) == 1
        report.data = {
            "pair": [j, k],
            "normal_form": [nf.j, nf.k],
            "moves": [str(m) for m in moves],
            "cells": [c.to_json() for c in cells],
            "groups_constant": pieces_constant,
        }
        if not pieces_constant or not check.passed:
            report.violations.append("K-theory changed along a move orbit")
    else:
        lo_j, hi_j = opts.get("j_range", [0, 6])
        lo_k, hi_k = opts.get("k_range", [0, 6])
        cells = [ktheory.k_cell(fam, ktheory.TwistPair(j, k)) for j in range(lo_j, hi_j + 1) for k in range(lo_k, hi_k + 1)]
        report.tables.append(Table(f"Twisted K-theory, family {fam.name}", K_HEADER, [_kcell_row(c) for c in cells]))
        report.data = {"family": fam.name, "cells": [c.to_json() for c in cells]}
    if any(not c.consistent for c in cells):
        report.violations.append("orbit resolution is not an extension of the direct pieces")
    report.undetermined = any(
        c.direct.extension_flags[p] and c.resolved_from is None for c in cells for p in (0, 1)
    )
    return report


def run_tables(wb: Workbench, args) -> Report:
    report = Report("tables")
    for name in ktheory.FAMILIES:
        fam = ktheory.family(name)
        lam = fam.lam
        groups = {
            "Z": cohomology_groups(LocalSystem.trivial(lam.base)),
            "Lambda": cohomology_groups(lam),
        }
        rows = [[str(i), str(groups["Z"][i]), str(groups["Lambda"][i])] for i in range(lam.base.dimension + 1)]
        report.tables.append(Table(f"{fam.name}: base cohomology", ["i", "H^i(M,Z)", "H^i(M,Lambda)"], rows))
        js = [0, 3, 4] if name == "t2-unipotent" else [1, 3, 5]
        columns = [total_cohomology(final_page(fam.bundle(j))).assembled for j in js]
        rows = [[str(i)] + [str(col[i]) for col in columns] for i in range(len(columns[0]))]
        report.tables.append(Table(f"{fam.name}: total-space cohomology", ["i"] + [f"j={j}" for j in js], rows))
        pairs = [(0, 0), (0, 6), (4, 8), (4, 6)] if name == "t2-unipotent" else [(1, 1), (3, 9), (5, 3)]
        cells = [ktheory.k_cell(fam, ktheory.TwistPair(*p)) for p in pairs]
        report.tables.append(Table(f"{fam.name}: twisted K-theory", K_HEADER, [_kcell_row(c) for c in cells]))
        report.data[name] = {
            "base": {k: _cells(v) for k, v in groups.items()},
            "total": {str(j): _cells(col) for j, col in zip(js, columns)},
            "ktheory": [c.to_json() for c in cells],
        }
    return report


RUNNERS = {
    "cohomology": run_cohomology,
    "bundle": run_bundle,
    "dualize": run_dualize,
    "hori-selftest": run_selftest,
    "ktheory": run_ktheory,
    "tables": run_tables,
}


# ---------------------------------------------------------------------------
# emitters


def ledger_table(cells: list[deviations.LedgerCell]) -> Table:
    rows = [
        [c.id, c.status, " ; ".join(c.printed), " ; ".join(c.derived), c.source, c.justification or ""]
        for c in cells
    ]
    return Table("Deviation ledger", ["cell", "status", "printed", "derived", "source", "justification"], rows)


def render_text(tables: list[Table]) -> str:
    out = []
    for t in tables:
        widths = [max(len(r[i]) for r in [t.header] + t.rows) for i in range(len(t.header))]
        fmt = lambda row: "  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip()  # noqa: E731
        out.append(t.title)
        out.append(fmt(t.header))
        out.append(fmt(["-" * w for w in widths]))
        out.extend(fmt(r) for r in t.rows)
        out.append("")
    return "\n".join(out)


def render_csv(tables: list[Table]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    for t in tables:
        writer.writerow([f"# {t.title}"])
        writer.writerow(t.header)
        writer.writerows(t.rows)
    return buf.getvalue()


def render_json(report: Report, config: dict, tables: list[Table], extra: dict) -> str:
    doc = {
        "command": report.command,
        "config": config,
        "tables": [t.to_json() for t in tables],
        "data": report.data,
        "undetermined": report.undetermined,
        "violations": report.violations,
    } | extra
    return json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tdual", description=__doc__)
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", help="JSON configuration file")
    parser.add_argument("--format", choices=("text", "json", "csv"), default="text")
    parser.add_argument("--strict", action="store_true", help="exit 2 when a result is undetermined")
    parser.add_argument("--seed", type=int, default=0, help="seed for randomized property checks")
    parser.add_argument("--out", help="write output here instead of stdout")
    parser.add_argument("--quiet", action="store_true", help="omit the deviation ledger")
    parser.add_argument("--orbit", help="ktheory: follow the move orbit of j,k")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        wb = read_config(args.config)
        report = RUNNERS[args.command](wb, args)
    except ConfigError as exc:
        print(f"invalid config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except AssertionError as exc:
        print(f"internal invariant violated: {exc}", file=sys.stderr)
        return EXIT_INVARIANT

    tables = list(report.tables)
    extra: dict[str, Any] = {}
    if not args.quiet:
        cells = deviations.ledger()
        tables.append(ledger_table(cells))
        extra["ledger"] = [c.to_json() for c in cells]
        if deviations.unexplained(cells):
            report.violations.append("unexplained deviation in the ledger")

    if args.format == "json":
        text = render_json(report, wb.raw, tables, extra)
    elif args.format == "csv":
        text = render_csv(tables)
    else:
        text = render_text(tables)
        if report.violations:
            text += "\n".join(f"VIOLATION: {v}" for v in report.violations) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)

    if report.violations:
        return EXIT_INVARIANT
    if args.strict and report.undetermined:
        return EXIT_UNDETERMINED
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
