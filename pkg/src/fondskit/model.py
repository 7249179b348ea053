"""Canonical record and person schema, fonds validation, genetic dossiers."""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from typing import Any, Callable, Iterable, Mapping, Optional, Union

from .plan import ClassificationPlan, UnknownCode, resolve
from .schema import ColumnSchema, core_schema
from .sig import (
    ArchiveDate,
    GeneticState,
    Sequential,
    Signature,
    format_signature,
    sort_key,
)

NATURES = (
    "grabación",
    "iconografía",
    "prensa",
    "correspondencia",
    "manuscrito",
    "tapuscrito",
    "dibujo",
    "objeto",
    "otro",
)
ROLES = ("estrella", "satélite", "otro")

LANGUAGE_RE = re.compile(r"^[a-z]{2}$")
COUNTRY_RE = re.compile(r"^[A-Z]{2}$")


@dataclass(frozen=True)
class PlaceRef:
    name: str
    country: Optional[str] = None

    def __post_init__(self) -> None:
        if not self.name or not self.name.strip():
            raise ValueError("place name must be nonempty")


@dataclass(frozen=True)
class Person:
    person_id: str
    canonical_name: str
    aliases: tuple[str, ...] = ()
    birth_date: Optional[ArchiveDate] = None
    birth_place: Optional[PlaceRef] = None
    death_date: Optional[ArchiveDate] = None
    death_place: Optional[PlaceRef] = None
    professions: tuple[str, ...] = ()
    role: str = "otro"
    associated_star: Optional[str] = None


@dataclass(frozen=True)
class Record:
    signature: Signature
    title: str = ""
    form: str = ""
    doc_type: str = ""
    nature: str = ""
    date: Optional[ArchiveDate] = None
    place: Optional[PlaceRef] = None
    language: Optional[str] = None
    creator: Optional[str] = None
    sender: Optional[str] = None
    recipient: Optional[str] = None
    sending_place: Optional[PlaceRef] = None
    genetic_dossier: Optional[str] = None
    genetic_state: Optional[GeneticState] = None
    genetic_relations: tuple[Signature, ...] = ()
    localizacion: str = ""
    description: Optional[str] = None
    rights: Optional[str] = None
    extensions: Mapping[str, Any] = field(default_factory=dict)

    @property
    def key(self) -> str:
        return format_signature(self.signature)


@dataclass(frozen=True)
class Fonds:
    code: str
    plan: ClassificationPlan = field(default_factory=ClassificationPlan)
    records: tuple[Record, ...] = ()
    persons: tuple[Person, ...] = ()
    schema: ColumnSchema = field(default_factory=core_schema)

    def sorted_records(self) -> list[Record]:
        return sorted(self.records, key=lambda r: sort_key(r.signature))

    def canonical(self) -> "Fonds":
        """Same fonds with records in signature order and persons by id."""
        return replace(
            self,
            records=tuple(self.sorted_records()),
            persons=tuple(sorted(self.persons, key=lambda p: p.person_id)),
        )

    def person(self, person_id: Optional[str]) -> Optional[Person]:
        if person_id is None:
            return None
        for p in self.persons:
            if p.person_id == person_id:
                return p
        return None

    def record(self, sig: Union[Signature, str]) -> Record:
        key = sig if isinstance(sig, str) else format_signature(sig)
        for r in self.records:
            if r.key == key:
                return r
        raise KeyError(key)


@dataclass(frozen=True)
class Finding:
    severity: str
    signature: str
    field: str
    message: str
    before: Optional[str] = None
    after: Optional[str] = None


@dataclass
class ValidationReport:
    findings: list[Finding]

    @property
    def errors(self) -> list[Finding]:
        return [f for f in self.findings if f.severity == "error"]

    @property
    def warnings(self) -> list[Finding]:
        return [f for f in self.findings if f.severity == "warning"]

    @property
    def valid(self) -> bool:
        return not self.errors


class NotInDossier(ValueError):
    pass


class UnknownField(KeyError):
    pass


def _check_record(
    rec: Record,
    fonds: Fonds,
    persons: set[str],
    by_key: dict[str, Record],
    incoming: dict[str, set[str]],
    gazetteer: Optional[Mapping[str, Any]],
) -> list[Finding]:
    out: list[Finding] = []
    key = rec.key

    def err(field_name: str, msg: str) -> None:
        out.append(Finding("error", key, field_name, msg))

    def warn(field_name: str, msg: str) -> None:
        out.append(Finding("warning", key, field_name, msg))

    sig = rec.signature
    if sig.fonds != fonds.code:
        err("signature", f"signature belongs to fonds {sig.fonds}, not {fonds.code}")
    try:
        resolve(fonds.plan, sig.category)
    except UnknownCode:
        err("signature", f"unresolved category {sig.category}")
    if sig.category.startswith("E") and sig.is_chronological:
        err("signature", "category E takes sequential signatures only")

    if rec.nature and rec.nature not in NATURES:
        err("nature", f"unknown nature {rec.nature!r}")
    if rec.nature == "correspondencia" and not rec.sender:
        err("sender", "correspondence record without sender")
    if rec.language is not None and not LANGUAGE_RE.match(rec.language):
        err("language", f"not an ISO 639-1 code: {rec.language!r}")

    for name in ("creator", "sender", "recipient"):
        pid = getattr(rec, name)
        if pid is not None and pid not in persons:
            err(name, f"unresolved person {pid!r}")
    for name in ("place", "sending_place"):
        place = getattr(rec, name)
        if place is None:
            continue
        if place.country is not None and not COUNTRY_RE.match(place.country):
            err(name, f"not an ISO 3166-1 alpha-2 code: {place.country!r}")
        if gazetteer is not None and place.name.casefold() not in gazetteer:
            warn(name, f"place {place.name!r} not in gazetteer")

    if (rec.genetic_state is None) != (rec.genetic_dossier is None):
        err("genetic_state", "genetic state and genetic dossier must be given together")
    if rec.genetic_state is not None and sig.genetic not in (None, rec.genetic_state):
        err("genetic_state", f"state {rec.genetic_state} disagrees with signature")
    if rec.date is not None and sig.date is not None and rec.date != sig.date:
        warn("date", f"date {rec.date} differs from signature date {sig.date}")

    seen = set()
    for rel in rec.genetic_relations:
        rel_key = format_signature(rel)
        if rel_key in seen:
            warn("genetic_relations", f"repeated genetic relation {rel_key}")
        seen.add(rel_key)
        if rel_key == key:
            err("genetic_relations", "record lists itself as a genetic relation")
            continue
        other = by_key.get(rel_key)
        if other is None:
            err("genetic_relations", f"dangling genetic relation {rel_key}")
            continue
        if rel.category != sig.category:
            warn("genetic_relations", f"genetic relation {rel_key} crosses categories")
    for other_key in sorted(incoming.get(key, set()) - seen, key=lambda k: sort_key(by_key[k].signature)):
        warn("genetic_relations", f"asymmetric genetic relation {key}↛{other_key}")
    return out


def _check_persons(persons: Iterable[Person]) -> list[Finding]:
    out = []
    by_id: dict[str, Person] = {}
    for p in persons:
        if p.person_id in by_id:
            out.append(Finding("error", "", "person_id", f"duplicate person {p.person_id!r}"))
        by_id[p.person_id] = p
    for p in sorted(by_id.values(), key=lambda p: p.person_id):
        where = f"persons[{p.person_id}]"
        if p.role not in ROLES:
            out.append(Finding("error", "", f"{where}.role", f"unknown role {p.role!r}"))
        if p.associated_star is not None:
            if p.role != "satélite":
                out.append(Finding("error", "", f"{where}.associated_star", "only satellites have an associated star"))
            star = by_id.get(p.associated_star)
            if star is None or star.role != "estrella":
                out.append(Finding(
                    "error", "", f"{where}.associated_star",
                    f"associated star {p.associated_star!r} is not a known estrella",
                ))
    return out


def validate_fonds(fonds: Fonds, gazetteer: Optional[Mapping[str, Any]] = None) -> ValidationReport:
    """Check a fonds; findings come back ordered by signature.

    ``gazetteer`` is an optional alias table (casefolded keys); when given,
    places missing from it are reported as warnings.
    """
    findings: list[Finding] = []
    counts: dict[str, int] = {}
    for rec in fonds.records:
        counts[rec.key] = counts.get(rec.key, 0) + 1
    by_key = {r.key: r for r in fonds.records}
    persons = {p.person_id for p in fonds.persons}
    incoming: dict[str, set[str]] = {}
    for rec in fonds.records:
        for rel in rec.genetic_relations:
            rel_key = format_signature(rel)
            if rel_key != rec.key:
                incoming.setdefault(rel_key, set()).add(rec.key)

    reported_dupes = set()
    for rec in fonds.sorted_records():
        if counts[rec.key] > 1 and rec.key not in reported_dupes:
            reported_dupes.add(rec.key)
            findings.append(Finding("error", rec.key, "signature", "duplicate signature"))
        findings.extend(_check_record(rec, fonds, persons, by_key, incoming, gazetteer))
    findings.extend(_check_persons(fonds.persons))
    return ValidationReport(findings)


def repair_genetic_symmetry(fonds: Fonds) -> Fonds:
    """Add the missing back-link for every one-way genetic relation."""
    by_key = {r.key: r for r in fonds.records}
    extra: dict[str, list[Signature]] = {}
    for rec in fonds.sorted_records():
        for rel in rec.genetic_relations:
            target = by_key.get(format_signature(rel))
            if target is None or target.key == rec.key:
                continue
            if rec.signature not in target.genetic_relations:
                pending = extra.setdefault(target.key, [])
                if rec.signature not in pending:
                    pending.append(rec.signature)
    if not extra:
        return fonds
    records = tuple(
        replace(r, genetic_relations=r.genetic_relations + tuple(extra[r.key]))
        if r.key in extra else r
        for r in fonds.records
    )
    return replace(fonds, records=records)


def resolve_dossier(fonds: Fonds, sig: Union[Signature, str]) -> list[Record]:
    """All witnesses of the creative project ``sig`` belongs to, in copy order."""
    start = fonds.record(sig)
    if start.genetic_state is None:
        raise NotInDossier(start.key)
    by_key = {r.key: r for r in fonds.records}

    # relations are followed in both directions so the result does not
    # depend on the entry point when back-links are missing
    neighbours: dict[str, set[str]] = {k: set() for k in by_key}
    for rec in fonds.records:
        for rel in rec.genetic_relations:
            other = format_signature(rel)
            if other in by_key and other != rec.key:
                neighbours[rec.key].add(other)
                neighbours[other].add(rec.key)

    def same_work(rec: Record) -> bool:
        s, t = rec.signature, start.signature
        return (
            rec.genetic_state is not None
            and isinstance(s.tail, Sequential)
            and isinstance(t.tail, Sequential)
            and (s.fonds, s.category, s.tail.item_no) == (t.fonds, t.category, t.tail.item_no)
        )

    members = {r.key for r in fonds.records if same_work(r)} | {start.key}
    stack = list(members)
    while stack:
        k = stack.pop()
        for n in neighbours[k]:
            if n not in members:
                members.add(n)
                stack.append(n)
    return sorted((by_key[k] for k in members), key=lambda r: sort_key(r.signature))


Predicate = Union[str, Callable[[Any], bool]]


def query(fonds: Fonds, filters: Optional[Mapping[str, Predicate]] = None) -> list[Record]:
    """Records matching every predicate, in signature order.

    A string predicate is compared with the field's CSV cell text; a
    callable receives the field's value.
    """
    from .store import record_cells, record_value

    filters = dict(filters or {})
    known = set(fonds.schema.headers())
    for name in filters:
        if name not in known:
            raise UnknownField(name)

    out = []
    for rec in fonds.sorted_records():
        cells = record_cells(rec, fonds.schema) if filters else {}
        ok = True
        for name, pred in filters.items():
            if callable(pred):
                ok = bool(pred(record_value(rec, name)))
            else:
                ok = cells[name] == pred
            if not ok:
                break
        if ok:
            out.append(rec)
    return out
