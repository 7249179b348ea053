"""Deterministic value normalization: dates, names, places, countries.

Normalization works on CSV cells, so it can clean data that would not yet
parse into typed records (``17/08/1923`` in a date column, say).  All
rules are idempotent.
"""

from __future__ import annotations

import csv
import io
import re
import unicodedata
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Union

from .model import NATURES, ROLES, Finding, Person, PlaceRef, Record
from .schema import ColumnSchema, core_schema
from .sig import ArchiveDate, InvalidDate, format_signature, parse_signature, sort_key

RULE_IDS = ("date_iso", "person_name", "place", "trim_case", "country_code")

SPANISH_MONTHS = {
    "enero": 1,
    "febrero": 2,
    "marzo": 3,
    "abril": 4,
    "mayo": 5,
    "junio": 6,
    "julio": 7,
    "agosto": 8,
    "septiembre": 9,
    "setiembre": 9,
    "octubre": 10,
    "noviembre": 11,
    "diciembre": 12,
}

# lowercase particles that stay attached to the surname
PARTICLES = {"de", "del", "la", "las", "los", "y", "da", "das", "do", "dos", "di", "van", "von"}

COUNTRY_NAMES = {
    "alemania": "DE",
    "argentina": "AR",
    "bolivia": "BO",
    "brasil": "BR",
    "brazil": "BR",
    "chile": "CL",
    "colombia": "CO",
    "cuba": "CU",
    "el salvador": "SV",
    "españa": "ES",
    "espana": "ES",
    "spain": "ES",
    "francia": "FR",
    "france": "FR",
    "guatemala": "GT",
    "italia": "IT",
    "italy": "IT",
    "méxico": "MX",
    "mexico": "MX",
    "paraguay": "PY",
    "perú": "PE",
    "peru": "PE",
    "portugal": "PT",
    "reino unido": "GB",
    "united kingdom": "GB",
    "estados unidos": "US",
    "united states": "US",
    "uruguay": "UY",
    "venezuela": "VE",
}


class UnparseableDate(ValueError):
    pass


class EmptyName(ValueError):
    pass


@dataclass(frozen=True)
class NormalizationRule:
    rule_id: str
    applies_to: tuple[str, ...]

    def __post_init__(self) -> None:
        if self.rule_id not in RULE_IDS:
            raise ValueError(f"unknown rule {self.rule_id!r}")


def check_rules(rules: Iterable[NormalizationRule]) -> None:
    seen: set[tuple[str, str]] = set()
    for rule in rules:
        for col in rule.applies_to:
            if (rule.rule_id, col) in seen:
                raise ValueError(f"column {col} governed twice by {rule.rule_id}")
            seen.add((rule.rule_id, col))


def default_rules(schema: Optional[ColumnSchema] = None) -> list[NormalizationRule]:
    schema = schema or core_schema()
    by_rule: dict[str, list[str]] = {r: [] for r in RULE_IDS}
    for col in schema.columns:
        if col.kind == "date":
            by_rule["date_iso"].append(col.name)
        elif col.kind == "person_ref":
            by_rule["person_name"].append(col.name)
        elif col.kind == "place":
            by_rule["place"].append(col.name)
            by_rule["country_code"].append(f"{col.name}_country")
        elif col.kind != "signature":
            by_rule["trim_case"].append(col.name)
    return [NormalizationRule(r, tuple(cols)) for r, cols in by_rule.items() if cols]


def _fold(text: str) -> str:
    """Casefold, strip accents, collapse whitespace."""
    decomposed = unicodedata.normalize("NFKD", text.casefold())
    stripped = "".join(c for c in decomposed if not unicodedata.combining(c))
    return " ".join(stripped.split())


def _key(text: str) -> str:
    return " ".join(text.casefold().split())


# -- lookup tables ----------------------------------------------------------

def load_gazetteer(doc: str) -> dict[str, PlaceRef]:
    """``alias,canonical,country`` CSV -> casefolded alias table."""
    table: dict[str, PlaceRef] = {}
    for row in csv.DictReader(io.StringIO(doc)):
        place = PlaceRef(row["canonical"].strip(), (row.get("country") or "").strip().upper() or None)
        table[_key(row["alias"])] = place
        table.setdefault(_key(place.name), place)
    return table


class PersonIndex:
    """Alias -> person id lookup backed by the person registry."""

    def __init__(self, persons: Iterable[Person] = (), aliases: Optional[Mapping[str, str]] = None):
        self.names: dict[str, str] = {}
        self.ids: dict[str, str] = {}
        for p in persons:
            self.names[p.person_id] = p.canonical_name
            for alias in (p.person_id, p.canonical_name, *p.aliases):
                self.ids.setdefault(_key(alias), p.person_id)
        for alias, pid in (aliases or {}).items():
            self.ids[_key(alias)] = pid

    def lookup(self, raw: str) -> Optional[str]:
        if raw.strip() in self.names:
            return raw.strip()
        return self.ids.get(_key(raw))


def load_aliases(doc: str) -> dict[str, str]:
    return {row["alias"]: row["person_id"].strip() for row in csv.DictReader(io.StringIO(doc))}


# -- single values ----------------------------------------------------------

def normalize_date(raw: str) -> ArchiveDate:
    """Parse the date spellings found in archival data.

    >>> str(normalize_date("17 de agosto de 1923"))
    '1923-08-17'
    """
    text = " ".join(raw.strip().split())
    if not text:
        raise UnparseableDate("empty date")
    try:
        m = re.fullmatch(r"(\d{4})(?:-(\d{1,2})(?:-(\d{1,2}))?)?", text)
        if m:
            return ArchiveDate(int(m[1]), int(m[2] or 0), int(m[3] or 0))
        m = re.fullmatch(r"(\d{1,2})[-/.](\d{1,2})[-/.](\d{4})", text)
        if m:
            return ArchiveDate(int(m[3]), int(m[2]), int(m[1]))
        m = re.fullmatch(r"(\d{1,2})[-/.](\d{4})", text)
        if m:
            return ArchiveDate(int(m[2]), int(m[1]))
        folded = _fold(text)  # also turns the ordinal sign of "1º" into "o"
        m = re.fullmatch(r"(?:(\d{1,2})o? de )?([a-z]+),? (?:de |del )?(\d{4})", folded)
        if m and m[2] in SPANISH_MONTHS:
            return ArchiveDate(int(m[3]), SPANISH_MONTHS[m[2]], int(m[1] or 0))
    except InvalidDate as exc:
        raise UnparseableDate(f"{raw!r}: {exc}") from exc
    raise UnparseableDate(f"unrecognised date {raw!r}")


def _cap(token: str, first: bool) -> str:
    if not first and token.casefold() in PARTICLES:
        return token.casefold()
    if token.islower() or token.isupper():
        return "-".join(p[:1].upper() + p[1:].lower() for p in token.split("-"))
    return token


def _cap_all(tokens: list[str]) -> str:
    return " ".join(_cap(t, i == 0) for i, t in enumerate(tokens))


def split_person_name(raw: str, index: Optional[PersonIndex] = None) -> tuple[str, bool]:
    """Canonical ``Surname, Given`` and whether it is trustworthy.

    Names found in ``index`` are returned verbatim from the registry.
    Otherwise ``Surname, Given`` input is tidied, and ``Given Surname``
    input is split with the last two non-particle tokens as surname,
    which is flagged as low confidence.  Particles ahead of the surname
    go after the given name.
    """
    text = " ".join(raw.split())
    if not text:
        raise EmptyName("empty name")
    if index is not None:
        pid = index.lookup(text)
        if pid is not None and pid in index.names:
            return index.names[pid], True
    if "," in text:
        surname, _, given = (p.strip() for p in text.partition(","))
        surname_t, given_t = surname.split(), given.split()
        if not surname_t:
            raise EmptyName(f"no surname in {raw!r}")
        if not given_t:
            return _cap_all(surname_t), True
        return f"{_cap_all(surname_t)}, {_cap_all(given_t)}", True
    tokens = text.split()
    if len(tokens) == 1:
        return _cap(tokens[0], True), False
    # walk back over two surname tokens plus interleaved particles,
    # keeping at least one given name
    cut, found = len(tokens), 0
    while cut > 1 and found < 2:
        cut -= 1
        if tokens[cut].casefold() not in PARTICLES:
            found += 1
    # a particle opening the surname is filed after the given name:
    # "Manuel de Falla" -> "Falla, Manuel de"
    while cut < len(tokens) - 1 and tokens[cut].casefold() in PARTICLES:
        cut += 1
    surname = [_cap(t, i == 0) for i, t in enumerate(tokens[cut:])]
    return f"{' '.join(surname)}, {_cap_all(tokens[:cut])}", False


def normalize_person_name(raw: str, index: Optional[PersonIndex] = None) -> str:
    return split_person_name(raw, index)[0]


def normalize_place(raw: str, gazetteer: Mapping[str, PlaceRef]) -> tuple[PlaceRef, list[Finding]]:
    """Look a place up case-insensitively; unknown names pass through."""
    name = " ".join(raw.split())
    place = gazetteer.get(_key(name))
    if place is not None:
        return place, []
    return PlaceRef(name), [Finding("warning", "", "place", f"place {name!r} not in gazetteer")]


def normalize_country(raw: str) -> str:
    text = " ".join(raw.split())
    if re.fullmatch(r"[A-Za-z]{2}", text):
        return text.upper()
    return COUNTRY_NAMES.get(text.casefold(), text)


def _trim(header: str, kind: str, value: str) -> tuple[str, Optional[str]]:
    """Whitespace and case tidy-up by column kind; returns (value, warning)."""
    if header in ("description", "rights"):
        lines = [re.sub(r"[ \t]+", " ", ln).strip() for ln in value.strip().splitlines()]
        return "\n".join(lines), None
    text = " ".join(value.split())
    if kind == "language":
        return text.lower(), None
    if kind == "genetic_state":
        return text.upper(), None
    if kind == "signature_list":
        sigs, seen = [], set()
        for tok in re.split(r"[;,|]", text):
            if not tok.strip():
                continue
            try:
                sig = parse_signature(tok)
            except ValueError:
                return text, f"unparseable signature {tok.strip()!r}"
            if format_signature(sig) not in seen:
                seen.add(format_signature(sig))
                sigs.append(sig)
        sigs.sort(key=sort_key)
        return ";".join(format_signature(s) for s in sigs), None
    if header == "nature":
        folded = _fold(text)  # also turns the ordinal sign of "1º" into "o"
        for nature in NATURES:
            if _fold(nature) == folded:
                return nature, None
        return text.lower(), None
    return text, None


# -- rows and records -------------------------------------------------------

def normalize_row(
    row: Mapping[str, str],
    rules: Optional[Iterable[NormalizationRule]] = None,
    gazetteer: Optional[Mapping[str, PlaceRef]] = None,
    index: Optional[PersonIndex] = None,
    schema: Optional[ColumnSchema] = None,
) -> tuple[dict[str, str], list[Finding]]:
    """Normalize one records-CSV row; one finding per changed cell."""
    schema = schema or core_schema()
    rules = list(rules) if rules is not None else default_rules(schema)
    check_rules(rules)
    gazetteer = gazetteer or {}
    out = dict(row)
    sig = out.get("signature", "").strip()
    try:
        sig = format_signature(parse_signature(sig))
    except ValueError:
        pass
    findings: list[Finding] = []
    warnings: list[Finding] = []

    def warn(header: str, msg: str) -> None:
        warnings.append(Finding("warning", sig, header, msg))

    for rule in rules:
        for header in rule.applies_to:
            value = out.get(header)
            if value is None or not value.strip():
                if value:
                    out[header] = ""
                continue
            kind = schema.kind_of_header(header)
            if rule.rule_id == "date_iso":
                try:
                    out[header] = str(normalize_date(value))
                except UnparseableDate as exc:
                    warn(header, str(exc))
            elif rule.rule_id == "person_name":
                text = " ".join(value.split())
                if kind == "person_ref":
                    pid = index.lookup(text) if index else None
                    if pid is None:
                        if index is not None:
                            warn(header, f"unresolved person {text!r}")
                        out[header] = text
                    else:
                        out[header] = pid
                else:
                    name, confident = split_person_name(text, index)
                    out[header] = name
                    if not confident:
                        warn(header, f"low-confidence name split {name!r}")
            elif rule.rule_id == "place":
                place, notes = normalize_place(value, gazetteer)
                for n in notes:
                    warn(header, n.message)
                out[header] = place.name
                country_header = f"{header}_country"
                if place.country and country_header in out:
                    out[country_header] = place.country
            elif rule.rule_id == "country_code":
                out[header] = normalize_country(value)
            elif rule.rule_id == "trim_case":
                out[header], note = _trim(header, kind, value)
                if note:
                    warn(header, note)

    for header in row:
        if out.get(header, "") != row[header]:
            findings.append(Finding("info", sig, header, "normalized", row[header], out[header]))
    return out, findings + warnings


def normalize_record(
    rec: Union[Record, Mapping[str, str]],
    rules: Optional[Iterable[NormalizationRule]] = None,
    gazetteer: Optional[Mapping[str, PlaceRef]] = None,
    index: Optional[PersonIndex] = None,
    schema: Optional[ColumnSchema] = None,
):
    """Normalize a record (typed or as a CSV row) and report changes.

    Returns the same shape it was given. The signature is never altered.
    """
    from .store import record_cells, row_to_record

    schema = schema or core_schema()
    if isinstance(rec, Record):
        row, findings = normalize_row(record_cells(rec, schema), rules, gazetteer, index, schema)
        new = row_to_record(row, schema)
        assert new.signature == rec.signature
        return new, findings
    return normalize_row(rec, rules, gazetteer, index, schema)


def normalize_person_row(
    row: Mapping[str, str], gazetteer: Optional[Mapping[str, PlaceRef]] = None
) -> tuple[dict[str, str], list[Finding]]:
    gazetteer = gazetteer or {}
    out = dict(row)
    pid = out.get("person_id", "").strip()
    out["person_id"] = pid
    warnings: list[Finding] = []
    if out.get("canonical_name", "").strip():
        name, confident = split_person_name(out["canonical_name"])
        out["canonical_name"] = name
        if not confident:
            warnings.append(Finding("warning", pid, "canonical_name", f"low-confidence name split {name!r}"))
    for col in ("birth_date", "death_date"):
        if out.get(col, "").strip():
            try:
                out[col] = str(normalize_date(out[col]))
            except UnparseableDate as exc:
                warnings.append(Finding("warning", pid, col, str(exc)))
        else:
            out[col] = ""
    for prefix in ("birth", "death"):
        place_col, country_col = f"{prefix}_place", f"{prefix}_country"
        if out.get(place_col, "").strip():
            place, notes = normalize_place(out[place_col], gazetteer)
            out[place_col] = place.name
            if place.country:
                out[country_col] = place.country
            warnings.extend(Finding("warning", pid, place_col, n.message) for n in notes)
        if out.get(country_col, "").strip():
            out[country_col] = normalize_country(out[country_col])
    for col in ("aliases", "professions"):
        items = [" ".join(t.split()) for t in out.get(col, "").split(";")]
        out[col] = ";".join(t for t in items if t)
    role = _fold(out.get("role", ""))
    out["role"] = next((r for r in ROLES if _fold(r) == role), out.get("role", "").strip())
    out["associated_star"] = out.get("associated_star", "").strip()

    findings = [
        Finding("info", pid, col, "normalized", row[col], out[col])
        for col in row
        if out.get(col, "") != row[col]
    ]
    return out, findings + warnings
