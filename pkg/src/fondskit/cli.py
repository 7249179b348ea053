"""Batch command line: validate, normalize, export, harvest, dossier, stats.

Exit codes: 0 success, 1 validation or data errors, 2 I/O, 3 usage.
"""

from __future__ import annotations

import argparse
import configparser
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

from . import crosswalk, harvest, model, network, norm, store
from .model import Finding
from .schema import SchemaMismatch, load_schema
from .plan import PlanError, load_plan
from .sig import SignatureError, parse_signature

EXIT_OK, EXIT_INVALID, EXIT_IO, EXIT_USAGE = 0, 1, 2, 3
CONFIG_KEYS = ("fonds", "records", "persons", "plan", "schema", "gazetteer", "aliases", "out")
FINDING_HEADERS = ["severity", "signature", "field", "message", "before", "after"]


class UsageError(Exception):
    pass


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


@dataclass
class ProjectConfig:
    fonds: Optional[str] = None
    records: Optional[Path] = None
    persons: Optional[Path] = None
    plan: Optional[Path] = None
    schema: Optional[Path] = None
    gazetteer: Optional[Path] = None
    aliases: Optional[Path] = None
    out: Path = Path("out")

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "ProjectConfig":
        """Config file values first, then command-line flags on top.

        Relative paths in a config file are taken relative to that file.
        """
        values: dict[str, str] = {}
        if args.config:
            path = Path(args.config)
            if not path.is_file():
                raise InputError(f"config file not found: {path}")
            parser = configparser.ConfigParser(interpolation=None)
            parser.read_string("[project]\n" + path.read_text(encoding="utf-8"))
            for key, value in parser["project"].items():
                if key not in CONFIG_KEYS:
                    raise UsageError(f"unknown config key {key!r}")
                value = value.strip()
                if key != "fonds" and value and not Path(value).is_absolute():
                    value = str(path.parent / value)
                values[key] = value
        for key in CONFIG_KEYS:
            flag = getattr(args, key, None)
            if flag is not None:
                values[key] = flag
        cfg = cls(fonds=values.get("fonds") or None)
        for key in CONFIG_KEYS[1:]:
            if values.get(key):
                setattr(cfg, key, Path(values[key]))
        return cfg

    def check(self) -> None:
        if self.records is None:
            raise UsageError("no records CSV configured")
        for key in CONFIG_KEYS[1:-1]:
            path = getattr(self, key)
            if path is not None and not path.is_file():
                raise InputError(f"{key} file not found: {path}")


def _read(path: Optional[Path]) -> str:
    if path is None:
        return ""
    try:
        return path.read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(str(exc)) from exc


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _findings_csv(findings: Sequence[Finding]) -> str:
    rows = [
        {
            "severity": f.severity,
            "signature": f.signature,
            "field": f.field,
            "message": f.message,
            "before": f.before or "",
            "after": f.after or "",
        }
        for f in findings
    ]
    return store.write_rows(FINDING_HEADERS, rows)


def _print_findings(findings: Sequence[Finding]) -> None:
    for f in findings:
        where = f" {f.field}" if f.field else ""
        print(f"{f.severity}: {f.signature or '-'}{where}: {f.message}")


def _tables(cfg: ProjectConfig, persons=()):
    gazetteer = norm.load_gazetteer(_read(cfg.gazetteer)) if cfg.gazetteer else None
    aliases = norm.load_aliases(_read(cfg.aliases)) if cfg.aliases else {}
    return gazetteer, norm.PersonIndex(persons, aliases)


def load_project(cfg: ProjectConfig) -> model.Fonds:
    cfg.check()
    return store.read_fonds(
        _read(cfg.records), _read(cfg.persons), _read(cfg.plan), _read(cfg.schema), fonds=cfg.fonds
    )


def write_fonds_files(fonds: model.Fonds, out: Path) -> None:
    files = store.write_fonds(fonds)
    for name, text in files._asdict().items():
        _write(out / f"{name}.csv", text)


# -- commands ---------------------------------------------------------------

def cmd_validate(cfg: ProjectConfig, args: argparse.Namespace) -> int:
    fonds = load_project(cfg)
    gazetteer, _ = _tables(cfg)
    report = model.validate_fonds(fonds, gazetteer)
    _print_findings(report.findings)
    _write(cfg.out / "validation.csv", _findings_csv(report.findings))
    return EXIT_OK if report.valid else EXIT_INVALID


def cmd_normalize(cfg: ProjectConfig, args: argparse.Namespace) -> int:
    cfg.check()
    schema = load_schema(_read(cfg.schema))
    plan = load_plan(_read(cfg.plan))
    gazetteer = norm.load_gazetteer(_read(cfg.gazetteer)) if cfg.gazetteer else {}

    findings: list[Finding] = []
    person_rows = []
    header, rows = store.read_rows(_read(cfg.persons))
    if header:
        store.check_header(header, list(store.PERSON_HEADERS), "persons")
    for row in rows:
        new, notes = norm.normalize_person_row(row, gazetteer)
        person_rows.append(new)
        findings.extend(notes)
    persons = tuple(store.row_to_person(r, i) for i, r in enumerate(person_rows, start=2))
    _, index = _tables(cfg, persons)

    rules = norm.default_rules(schema)
    header, rows = store.read_rows(_read(cfg.records))
    if header:
        store.check_header(header, schema.headers(), "records")
    records = []
    errors = []
    for lineno, row in enumerate(rows, start=2):
        new, notes = norm.normalize_row(row, rules, gazetteer, index, schema)
        findings.extend(notes)
        try:
            records.append(store.row_to_record(new, schema, lineno))
        except store.CellParse as exc:
            errors.append(Finding("error", new.get("signature", ""), exc.column, str(exc)))
    findings.extend(errors)
    _print_findings(findings)
    if args.dry_run:
        return EXIT_INVALID if errors else EXIT_OK
    _write(cfg.out / "normalization.csv", _findings_csv(findings))
    if errors:
        return EXIT_INVALID
    code = cfg.fonds or (records[0].signature.fonds if records else None)
    if code is None:
        raise UsageError("fonds code required for a fonds without records")
    fonds = model.Fonds(code, plan, tuple(records), persons, schema)
    write_fonds_files(fonds, cfg.out)
    return EXIT_OK


def _report_csv(report: crosswalk.CrosswalkReport) -> str:
    rows = [
        {
            "signature": r.signature,
            "emitted": ";".join(r.emitted),
            "dropped": ";".join(r.dropped),
            "warnings": ";".join(r.warnings),
        }
        for r in report.records
    ]
    return store.write_rows(["signature", "emitted", "dropped", "warnings"], rows)


def cmd_export(cfg: ProjectConfig, args: argparse.Namespace) -> int:
    fonds = load_project(cfg)
    out, code = cfg.out, fonds.code
    fmt = args.format
    if fmt == "dc":
        xml, report = crosswalk.to_dublin_core(fonds)
        _write(out / f"{code}-dc.xml", xml)
        _write(out / f"{code}-dc-report.csv", _report_csv(report))
    elif fmt == "ead":
        xml, report = crosswalk.to_ead(fonds)
        _write(out / f"{code}-ead.xml", xml)
        _write(out / f"{code}-ead-report.csv", _report_csv(report))
    elif fmt == "tei":
        docs, report = crosswalk.to_tei_headers(fonds)
        for sig, xml in docs.items():
            _write(out / "tei" / f"{sig}.xml", xml)
        _write(out / f"{code}-tei-report.csv", _report_csv(report))
    elif fmt in ("gexf", "edges"):
        graph, findings = network.build_graph(fonds)
        if fmt == "gexf":
            _write(out / f"{code}.gexf", network.to_gexf(graph))
        else:
            _write(out / f"{code}-edges.csv", network.to_edges_csv(graph))
        _write(out / f"{code}-graph-findings.csv", _findings_csv(findings))
    elif fmt == "itinerary":
        if not args.person:
            raise UsageError("export --format itinerary needs --person")
        try:
            it = network.itinerary(fonds, args.person)
        except network.UnknownPerson:
            raise UsageError(f"unknown person {args.person!r}")
        _write(out / f"{code}-itinerary-{args.person}.csv", it.to_csv())
    return EXIT_OK


def cmd_harvest(cfg: ProjectConfig, args: argparse.Namespace) -> int:
    fonds = load_project(cfg)
    gazetteer, index = _tables(cfg, fonds.persons)
    mapping = harvest.load_mapping(_read(Path(args.mapping)))
    records, findings = harvest.apply_mapping(
        _read(Path(args.source)), mapping, gazetteer, index, fonds.schema
    )
    merged, report = harvest.merge(fonds, records, args.policy)
    _print_findings(findings)
    for e in report.entries:
        detail = f" {e.field}" if e.field else ""
        print(f"{e.disposition}: {e.signature}{detail}")
    write_fonds_files(merged, cfg.out)
    _write(cfg.out / "merge_report.csv", report.to_csv())
    _write(cfg.out / "harvest_findings.csv", _findings_csv(findings))
    return EXIT_INVALID if any(f.severity == "error" for f in findings) else EXIT_OK


def cmd_dossier(cfg: ProjectConfig, args: argparse.Namespace) -> int:
    fonds = load_project(cfg)
    try:
        sig = parse_signature(args.signature)
        members = model.resolve_dossier(fonds, sig)
    except SignatureError as exc:
        raise UsageError(str(exc))
    except KeyError:
        print(f"no record {args.signature}", file=sys.stderr)
        return EXIT_INVALID
    except model.NotInDossier:
        print(f"{args.signature} has no genetic state", file=sys.stderr)
        return EXIT_INVALID
    for rec in members:
        print(rec.key)
    return EXIT_OK


def cmd_stats(cfg: ProjectConfig, args: argparse.Namespace) -> int:
    fonds = load_project(cfg)
    counts: dict[str, int] = {}
    years = []
    correspondents = set()
    for rec in fonds.records:
        counts[rec.signature.category] = counts.get(rec.signature.category, 0) + 1
        date = crosswalk.record_date(rec)
        if date is not None:
            years.append(date.year)
        if rec.nature == "correspondencia":
            correspondents.update(p for p in (rec.sender, rec.recipient) if p)
    print(f"fonds: {fonds.code}")
    print(f"records: {len(fonds.records)}")
    order = [n.code for n in fonds.plan.nodes()]
    for cat in sorted(counts, key=lambda c: (order.index(c) if c in order else len(order), c)):
        print(f"category {cat}: {counts[cat]}")
    if years:
        print(f"date range: {min(years)}-{max(years)}")
    else:
        print("date range: none")
    print(f"correspondents: {len(correspondents)}")
    return EXIT_OK


COMMANDS = {
    "validate": cmd_validate,
    "normalize": cmd_normalize,
    "export": cmd_export,
    "harvest": cmd_harvest,
    "dossier": cmd_dossier,
    "stats": cmd_stats,
}


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("-c", "--config", help="key = value project file")
    for key in CONFIG_KEYS:
        common.add_argument(f"--{key}", help=f"override the config's {key}")

    parser = _Parser(prog="fondskit", description=__doc__.splitlines()[0])
    subs = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    subs.add_parser("validate", parents=[common], help="check the fonds")
    p = subs.add_parser("normalize", parents=[common], help="normalize and rewrite the CSVs")
    p.add_argument("--dry-run", action="store_true", help="print findings only")
    p = subs.add_parser("export", parents=[common], help="publish one output format")
    p.add_argument("--format", required=True, choices=["dc", "ead", "tei", "gexf", "edges", "itinerary"])
    p.add_argument("--person", help="person id for itinerary export")
    p = subs.add_parser("harvest", parents=[common], help="import foreign data via a mapping")
    p.add_argument("--source", required=True)
    p.add_argument("--mapping", required=True)
    p.add_argument("--policy", default="strict", choices=list(harvest.POLICIES))
    p = subs.add_parser("dossier", parents=[common], help="list a genetic dossier")
    p.add_argument("signature")
    subs.add_parser("stats", parents=[common], help="summary counts")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = ProjectConfig.from_args(args)
        return COMMANDS[args.command](cfg, args)
    except UsageError as exc:
        print(f"fondskit: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InputError, OSError) as exc:
        print(f"fondskit: {exc}", file=sys.stderr)
        return EXIT_IO
    except (store.StoreError, SchemaMismatch, PlanError, harvest.MappingError, SignatureError) as exc:
        print(f"fondskit: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
