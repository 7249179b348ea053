"""Read and write the canonical CSV single source.

Output is deterministic: records in signature order, persons by id, columns
in schema order, RFC 4180 quoting, LF line endings, UTF-8 without BOM.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Any, Mapping, NamedTuple, Optional

from .model import Fonds, Person, PlaceRef, Record
from .plan import dump_plan, load_plan
from .schema import CORE_NAMES, ColumnSchema, SchemaMismatch, dump_schema, load_schema
from .sig import ArchiveDate, GeneticState, format_signature, parse_signature, sort_key

LIST_SEP = ";"

PERSON_HEADERS = (
    "person_id",
    "canonical_name",
    "aliases",
    "birth_date",
    "birth_place",
    "birth_country",
    "death_date",
    "death_place",
    "death_country",
    "professions",
    "role",
    "associated_star",
)

# core text fields stored as "" rather than None when the cell is empty
_PLAIN_TEXT = {"title", "form", "doc_type", "nature", "localizacion"}


class StoreError(ValueError):
    pass


class CsvSyntax(StoreError):
    def __init__(self, message: str, row: int, col: Optional[int] = None):
        super().__init__(f"row {row}" + (f", col {col}" if col else "") + f": {message}")
        self.row = row
        self.col = col


class CellParse(StoreError):
    def __init__(self, message: str, row: int, column: str, kind: str):
        super().__init__(f"row {row}, column {column} ({kind}): {message}")
        self.row = row
        self.column = column
        self.kind = kind


class FondsMismatch(ValueError):
    pass


class FondsFiles(NamedTuple):
    records: str
    persons: str
    plan: str
    schema: str


# -- cells ------------------------------------------------------------------

def render_value(kind: str, value: Any) -> str:
    if value is None:
        return ""
    if kind == "date":
        return str(value)
    if kind == "signature":
        return format_signature(value)
    if kind == "signature_list":
        return LIST_SEP.join(format_signature(s) for s in value)
    if kind == "place":
        return value.name
    if kind == "genetic_state":
        return str(value)
    return value


def parse_value(kind: str, text: str) -> Any:
    """Parse one non-empty cell; raises ``ValueError`` on bad input."""
    if kind == "date":
        return ArchiveDate.parse(text)
    if kind == "signature":
        return parse_signature(text)
    if kind == "signature_list":
        return tuple(parse_signature(t) for t in text.split(LIST_SEP) if t.strip())
    if kind == "place":
        return PlaceRef(text)
    if kind == "genetic_state":
        return GeneticState.parse(text)
    return text


def record_value(rec: Record, header: str) -> Any:
    """Value behind one CSV header of a record."""
    if header in CORE_NAMES:
        return getattr(rec, header)
    if header in rec.extensions or not header.endswith("_country"):
        return rec.extensions.get(header)
    base = header[: -len("_country")]
    place = getattr(rec, base) if base in CORE_NAMES else rec.extensions.get(base)
    return place.country if isinstance(place, PlaceRef) else None


def record_cells(rec: Record, schema: ColumnSchema) -> dict[str, str]:
    cells: dict[str, str] = {}
    for col in schema.columns:
        if col.name in CORE_NAMES:
            value = getattr(rec, col.name)
        else:
            value = rec.extensions.get(col.name)
        cells[col.name] = render_value(col.kind, value)
        if col.kind == "place":
            cells[f"{col.name}_country"] = (value.country or "") if value else ""
    return cells


def row_to_record(row: Mapping[str, str], schema: ColumnSchema, lineno: int = 0) -> Record:
    """Build a record from a header->cell mapping; raises ``CellParse``."""
    values: dict[str, Any] = {}
    extensions: dict[str, Any] = {}
    for col in schema.columns:
        text = row.get(col.name, "")
        country = row.get(f"{col.name}_country", "") if col.kind == "place" else ""
        if not text:
            if col.required:
                raise CellParse("required cell is empty", lineno, col.name, col.kind)
            if country:
                raise CellParse("country without place name", lineno, col.name, col.kind)
            if col.name in _PLAIN_TEXT:
                values[col.name] = ""
            continue
        try:
            value = parse_value(col.kind, text)
            if col.kind == "place" and country:
                value = PlaceRef(value.name, country)
        except ValueError as exc:
            raise CellParse(str(exc), lineno, col.name, col.kind) from exc
        if col.name in CORE_NAMES:
            values[col.name] = value
        else:
            extensions[col.name] = value
    if "signature" not in values:
        raise CellParse("missing signature", lineno, "signature", "signature")
    return Record(extensions=extensions, **values)


# -- CSV plumbing -----------------------------------------------------------

def read_rows(doc: str) -> tuple[list[str], list[dict[str, str]]]:
    """Strictly parse a CSV document into its header and row mappings."""
    reader = csv.reader(io.StringIO(doc, newline=""), strict=True)
    try:
        rows = list(reader)
    except csv.Error as exc:
        raise CsvSyntax(str(exc), reader.line_num) from exc
    rows = [r for r in rows if r]
    if not rows:
        return [], []
    header = rows[0]
    out = []
    for i, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise CsvSyntax(f"expected {len(header)} fields, got {len(row)}", i, min(len(row), len(header)) + 1)
        out.append(dict(zip(header, row)))
    return header, out


def write_rows(header: list[str], rows: list[Mapping[str, str]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([row.get(h, "") for h in header])
    return buf.getvalue()


def check_header(header: list[str], expected: list[str], what: str) -> None:
    unknown = [h for h in header if h not in expected]
    missing = [h for h in expected if h not in header]
    if unknown or missing or len(set(header)) != len(header):
        raise SchemaMismatch(f"{what} header mismatch: unknown={unknown} missing={missing}")


# -- persons ----------------------------------------------------------------

def _split(text: str) -> tuple[str, ...]:
    return tuple(t for t in (x.strip() for x in text.split(LIST_SEP)) if t)


def person_to_row(p: Person) -> dict[str, str]:
    def place(pl: Optional[PlaceRef]) -> tuple[str, str]:
        return (pl.name, pl.country or "") if pl else ("", "")

    birth_place, birth_country = place(p.birth_place)
    death_place, death_country = place(p.death_place)
    return {
        "person_id": p.person_id,
        "canonical_name": p.canonical_name,
        "aliases": LIST_SEP.join(p.aliases),
        "birth_date": str(p.birth_date) if p.birth_date else "",
        "birth_place": birth_place,
        "birth_country": birth_country,
        "death_date": str(p.death_date) if p.death_date else "",
        "death_place": death_place,
        "death_country": death_country,
        "professions": LIST_SEP.join(p.professions),
        "role": p.role,
        "associated_star": p.associated_star or "",
    }


def row_to_person(row: Mapping[str, str], lineno: int = 0) -> Person:
    def date(col: str) -> Optional[ArchiveDate]:
        if not row[col]:
            return None
        try:
            return ArchiveDate.parse(row[col])
        except ValueError as exc:
            raise CellParse(str(exc), lineno, col, "date") from exc

    def place(col: str, country_col: str) -> Optional[PlaceRef]:
        if not row[col]:
            if row[country_col]:
                raise CellParse("country without place name", lineno, col, "place")
            return None
        return PlaceRef(row[col], row[country_col] or None)

    if not row["person_id"]:
        raise CellParse("required cell is empty", lineno, "person_id", "text")
    return Person(
        person_id=row["person_id"],
        canonical_name=row["canonical_name"],
        aliases=_split(row["aliases"]),
        birth_date=date("birth_date"),
        birth_place=place("birth_place", "birth_country"),
        death_date=date("death_date"),
        death_place=place("death_place", "death_country"),
        professions=_split(row["professions"]),
        role=row["role"] or "otro",
        associated_star=row["associated_star"] or None,
    )


def read_persons(doc: str) -> tuple[Person, ...]:
    header, rows = read_rows(doc)
    if not header:
        return ()
    check_header(header, list(PERSON_HEADERS), "persons")
    return tuple(row_to_person(r, i) for i, r in enumerate(rows, start=2))


def write_persons(persons: tuple[Person, ...]) -> str:
    ordered = sorted(persons, key=lambda p: p.person_id)
    return write_rows(list(PERSON_HEADERS), [person_to_row(p) for p in ordered])


# -- fonds ------------------------------------------------------------------

def read_records(doc: str, schema: ColumnSchema) -> tuple[Record, ...]:
    header, rows = read_rows(doc)
    if not header:
        return ()
    check_header(header, schema.headers(), "records")
    return tuple(row_to_record(r, schema, i) for i, r in enumerate(rows, start=2))


def write_records(records, schema: ColumnSchema) -> str:
    ordered = sorted(records, key=lambda r: sort_key(r.signature))
    return write_rows(schema.headers(), [record_cells(r, schema) for r in ordered])


def read_fonds(
    records_csv: str,
    persons_csv: str = "",
    plan_csv: str = "",
    schema_csv: str = "",
    fonds: Optional[str] = None,
) -> Fonds:
    """Load a fonds from its four CSV documents.

    The fonds code comes from ``fonds`` or, failing that, from the first
    record's signature.
    """
    schema = load_schema(schema_csv)
    records = read_records(records_csv, schema)
    if fonds is None:
        if not records:
            raise StoreError("fonds code required for a fonds without records")
        fonds = records[0].signature.fonds
    return Fonds(
        code=fonds,
        plan=load_plan(plan_csv),
        records=records,
        persons=read_persons(persons_csv),
        schema=schema,
    )


def write_fonds(fonds: Fonds) -> FondsFiles:
    return FondsFiles(
        records=write_records(fonds.records, fonds.schema),
        persons=write_persons(fonds.persons),
        plan=dump_plan(fonds.plan),
        schema=dump_schema(fonds.schema),
    )


@dataclass(frozen=True)
class Change:
    signature: str
    change: str  # added | removed | changed
    field: str = ""
    before: str = ""
    after: str = ""


def diff_fonds(a: Fonds, b: Fonds) -> list[Change]:
    """Added/removed signatures and per-cell changes, in signature order."""
    if a.code != b.code:
        raise FondsMismatch(f"{a.code} != {b.code}")
    old = {r.key: r for r in a.records}
    new = {r.key: r for r in b.records}
    sigs = {**{k: r.signature for k, r in old.items()}, **{k: r.signature for k, r in new.items()}}
    changes = []
    for key in sorted(sigs, key=lambda k: sort_key(sigs[k])):
        if key not in new:
            changes.append(Change(key, "removed"))
        elif key not in old:
            changes.append(Change(key, "added"))
        else:
            before = record_cells(old[key], a.schema)
            after = record_cells(new[key], b.schema)
            for h in list(before) + [h for h in after if h not in before]:
                if before.get(h, "") != after.get(h, ""):
                    changes.append(Change(key, "changed", h, before.get(h, ""), after.get(h, "")))
    return changes
