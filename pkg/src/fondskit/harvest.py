"""Import foreign CSV exports through a declarative mapping, then merge."""

from __future__ import annotations

import csv
import io
import re
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Optional

from .model import Finding, Fonds, PlaceRef, Record
from .norm import PersonIndex, UnparseableDate, normalize_date, normalize_place, split_person_name
from .schema import ColumnSchema, core_schema
from .sig import sort_key
from .store import CellParse, FondsMismatch, read_rows, record_cells, row_to_record, write_rows

TRANSFORMS = ("date_iso", "person_name", "place", "split_list", "none")
POLICIES = ("keep_base", "prefer_incoming", "strict")
MERGE_REPORT_HEADERS = ["signature", "disposition", "field", "base_value", "incoming_value"]


class MappingError(ValueError):
    pass


class MissingSourceField(MappingError):
    pass


class NoSignatureMapping(MappingError):
    pass


@dataclass(frozen=True)
class MappingRow:
    source_field: str
    canonical_field: str
    transform: str = "none"


@dataclass(frozen=True)
class MappingDoc:
    rows: tuple[MappingRow, ...]

    def check(self, schema: ColumnSchema) -> None:
        headers = set(schema.headers())
        for row in self.rows:
            if row.canonical_field not in headers:
                raise MappingError(f"unknown canonical field {row.canonical_field!r}")
            if row.transform not in TRANSFORMS:
                raise MappingError(f"unknown transform {row.transform!r}")
        if not any(r.canonical_field == "signature" for r in self.rows):
            raise NoSignatureMapping("no source field maps to signature")


def load_mapping(doc: str) -> MappingDoc:
    """Read a ``source_field,canonical_field,transform`` CSV."""
    rows = []
    for line in csv.DictReader(io.StringIO(doc)):
        rows.append(MappingRow(
            line["source_field"].strip(),
            line["canonical_field"].strip(),
            (line.get("transform") or "").strip() or "none",
        ))
    return MappingDoc(tuple(rows))


def _transform(
    name: str,
    value: str,
    gazetteer: Mapping[str, PlaceRef],
    index: Optional[PersonIndex],
) -> tuple[str, Optional[str], list[str]]:
    """Apply one named transform; returns (value, country, warnings)."""
    if name == "none" or not value.strip():
        return value, None, []
    if name == "date_iso":
        try:
            return str(normalize_date(value)), None, []
        except UnparseableDate as exc:
            return value, None, [str(exc)]
    if name == "person_name":
        if index is not None:
            pid = index.lookup(value)
            if pid is not None:
                return pid, None, []
        return split_person_name(value)[0], None, []
    if name == "place":
        place, notes = normalize_place(value, gazetteer)
        return place.name, place.country, [n.message for n in notes]
    if name == "split_list":
        items = [t.strip() for t in re.split(r"[;,|]", value)]
        return ";".join(t for t in items if t), None, []
    raise MappingError(f"unknown transform {name!r}")


def apply_mapping(
    foreign_csv: str,
    mapping: MappingDoc,
    gazetteer: Optional[Mapping[str, PlaceRef]] = None,
    aliases: Optional[PersonIndex] = None,
    schema: Optional[ColumnSchema] = None,
) -> tuple[list[Record], list[Finding]]:
    """Turn each foreign row into a candidate record.

    Rows that fail to parse become findings instead of records.  Foreign
    columns the mapping ignores are reported once each.
    """
    schema = schema or core_schema()
    mapping.check(schema)
    gazetteer = gazetteer or {}
    header, rows = read_rows(foreign_csv)
    if not header:
        return [], []
    missing = sorted({m.source_field for m in mapping.rows} - set(header))
    if missing:
        raise MissingSourceField(f"foreign CSV lacks {missing}")

    findings: list[Finding] = []
    mapped_sources = {m.source_field for m in mapping.rows}
    for h in header:
        if h not in mapped_sources:
            findings.append(Finding("warning", "", h, f"foreign field {h!r} ignored"))

    records = []
    canonical_headers = schema.headers()
    for lineno, row in enumerate(rows, start=2):
        target = {h: "" for h in canonical_headers}
        notes = []
        for m in mapping.rows:
            value, country, warnings = _transform(m.transform, row[m.source_field], gazetteer, aliases)
            target[m.canonical_field] = value
            country_header = f"{m.canonical_field}_country"
            if country and country_header in target and not target[country_header]:
                target[country_header] = country
            notes.extend((m.canonical_field, w) for w in warnings)
        try:
            rec = row_to_record(target, schema, lineno)
        except CellParse as exc:
            findings.append(Finding("error", target.get("signature", ""), exc.column, f"row {lineno}: {exc}"))
            continue
        records.append(rec)
        findings.extend(Finding("warning", rec.key, f, w) for f, w in notes)
    return records, findings


@dataclass(frozen=True)
class MergeEntry:
    signature: str
    disposition: str  # added | identical | kept_base | took_incoming | conflict
    field: str = ""
    base_value: str = ""
    incoming_value: str = ""


@dataclass
class MergeReport:
    entries: list[MergeEntry] = field(default_factory=list)

    def by_disposition(self, disposition: str) -> list[MergeEntry]:
        return [e for e in self.entries if e.disposition == disposition]

    @property
    def added(self) -> list[str]:
        return [e.signature for e in self.by_disposition("added")]

    @property
    def identical(self) -> list[str]:
        return [e.signature for e in self.by_disposition("identical")]

    @property
    def conflicting(self) -> list[str]:
        seen: dict[str, None] = {}
        for e in self.entries:
            if e.disposition in ("kept_base", "took_incoming", "conflict"):
                seen.setdefault(e.signature)
        return list(seen)

    def to_csv(self) -> str:
        return write_rows(MERGE_REPORT_HEADERS, [e.__dict__ for e in self.entries])


def merge(base: Fonds, incoming: Iterable[Record], policy: str = "strict") -> tuple[Fonds, MergeReport]:
    """Fold incoming records into ``base``, keyed by formatted signature."""
    if policy not in POLICIES:
        raise ValueError(f"unknown merge policy {policy!r}")
    incoming = list(incoming)
    for rec in incoming:
        if rec.signature.fonds != base.code:
            raise FondsMismatch(f"{rec.key} does not belong to fonds {base.code}")

    current: dict[str, Record] = {r.key: r for r in base.records}
    order = list(dict.fromkeys(r.key for r in base.records))
    report = MergeReport()
    for rec in incoming:
        old = current.get(rec.key)
        if old is None:
            current[rec.key] = rec
            order.append(rec.key)
            report.entries.append(MergeEntry(rec.key, "added"))
            continue
        if old == rec:
            report.entries.append(MergeEntry(rec.key, "identical"))
            continue
        before = record_cells(old, base.schema)
        after = record_cells(rec, base.schema)
        diffs = [h for h in before if before[h] != after[h]]
        disposition = {"keep_base": "kept_base", "prefer_incoming": "took_incoming", "strict": "conflict"}[policy]
        for h in diffs:
            report.entries.append(MergeEntry(rec.key, disposition, h, before[h], after[h]))
        if policy == "prefer_incoming":
            current[rec.key] = rec

    records = tuple(current[k] for k in order)
    report.entries.sort(key=lambda e: sort_key(current[e.signature].signature))
    return replace(base, records=records), report
