"""Column schema for the canonical records CSV.

The core columns are fixed and always come first; projects append typed
extension columns through a sidecar ``name,kind,required`` CSV.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

KINDS = (
    "text",
    "date",
    "signature",
    "signature_list",
    "person_ref",
    "place",
    "language",
    "genetic_state",
)


class SchemaMismatch(ValueError):
    pass


@dataclass(frozen=True)
class Column:
    name: str
    kind: str = "text"
    required: bool = False

    def headers(self) -> list[str]:
        # a place occupies two CSV columns: name and ISO country code
        if self.kind == "place":
            return [self.name, f"{self.name}_country"]
        return [self.name]


CORE_COLUMNS: tuple[Column, ...] = (
    Column("signature", "signature", True),
    Column("title"),
    Column("form"),
    Column("doc_type"),
    Column("nature"),
    Column("date", "date"),
    Column("place", "place"),
    Column("language", "language"),
    Column("creator", "person_ref"),
    Column("sender", "person_ref"),
    Column("recipient", "person_ref"),
    Column("sending_place", "place"),
    Column("genetic_dossier"),
    Column("genetic_state", "genetic_state"),
    Column("genetic_relations", "signature_list"),
    Column("localizacion"),
    Column("description"),
    Column("rights"),
)
CORE_NAMES = tuple(c.name for c in CORE_COLUMNS)


@dataclass(frozen=True)
class ColumnSchema:
    columns: tuple[Column, ...] = CORE_COLUMNS

    def __post_init__(self) -> None:
        if self.columns[: len(CORE_COLUMNS)] != CORE_COLUMNS:
            raise SchemaMismatch("core columns must come first, in order")
        headers = self.headers()
        if len(set(headers)) != len(headers):
            raise SchemaMismatch("duplicate column names")
        for col in self.columns:
            if col.kind not in KINDS:
                raise SchemaMismatch(f"unknown column kind {col.kind!r}")

    @property
    def extensions(self) -> tuple[Column, ...]:
        return self.columns[len(CORE_COLUMNS):]

    def headers(self) -> list[str]:
        return [h for c in self.columns for h in c.headers()]

    def column(self, name: str) -> Column:
        for c in self.columns:
            if c.name == name:
                return c
        raise KeyError(name)

    def kind_of_header(self, header: str) -> str:
        """Kind governing one CSV header (``place_country`` -> ``country``)."""
        for c in self.columns:
            hs = c.headers()
            if header == hs[0]:
                return c.kind
            if len(hs) == 2 and header == hs[1]:
                return "country"
        raise KeyError(header)


def core_schema() -> ColumnSchema:
    return ColumnSchema()


def extend_schema(*extensions: Column) -> ColumnSchema:
    return ColumnSchema(CORE_COLUMNS + tuple(extensions))


def load_schema(doc: str) -> ColumnSchema:
    """Read the sidecar schema; core rows may be listed but must match."""
    reader = csv.reader(io.StringIO(doc))
    rows = [r for r in reader if r]
    if not rows:
        return core_schema()
    if [h.strip() for h in rows[0]] != ["name", "kind", "required"]:
        raise SchemaMismatch(f"schema header must be name,kind,required, got {rows[0]}")
    extra = []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != 3:
            raise SchemaMismatch(f"schema line {lineno}: expected 3 fields")
        name, kind, required = (x.strip() for x in row)
        if required not in ("true", "false"):
            raise SchemaMismatch(f"schema line {lineno}: required must be true or false")
        col = Column(name, kind, required == "true")
        if name in CORE_NAMES:
            if col != CORE_COLUMNS[CORE_NAMES.index(name)]:
                raise SchemaMismatch(f"core column {name} redeclared differently")
            continue
        extra.append(col)
    return extend_schema(*extra)


def dump_schema(schema: ColumnSchema) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["name", "kind", "required"])
    for col in schema.columns:
        writer.writerow([col.name, col.kind, "true" if col.required else "false"])
    return buf.getvalue()
