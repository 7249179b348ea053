"""Fixture loading and random data generators shared by the tests."""

from __future__ import annotations

import calendar
import random
from pathlib import Path

from fondskit.model import Fonds, Person, PlaceRef, Record
from fondskit.norm import PersonIndex, load_aliases, load_gazetteer
from fondskit.plan import build_plan
from fondskit.schema import Column, extend_schema
from fondskit.sig import (
    ArchiveDate,
    Chronological,
    GeneticState,
    Sequential,
    Signature,
    assign_disambiguator,
)
from fondskit.store import read_fonds

FIXTURES = Path(__file__).parent / "fixtures"
FILES = ("records.csv", "persons.csv", "plan.csv", "schema.csv")


def fixture_text(project: str, name: str) -> str:
    return (FIXTURES / project / name).read_text(encoding="utf-8")


def load_fixture(project: str) -> Fonds:
    return read_fonds(*(fixture_text(project, n) for n in FILES), fonds=project.upper())


def jmg_tables() -> tuple[dict[str, PlaceRef], PersonIndex]:
    fonds = load_fixture("jmg")
    gazetteer = load_gazetteer(fixture_text("jmg", "gazetteer.csv"))
    aliases = load_aliases(fixture_text("jmg", "aliases.csv"))
    return gazetteer, PersonIndex(fonds.persons, aliases)


# -- random well-formed fonds ----------------------------------------------

TEXT_ALPHABET = "abcñáéíóúü ABZ,;\"'\n\t-¿¡0123456789ÇØ"
PLACES = ["Granada", "Montevideo", "Buenos Aires", "París", "La Habana", "México"]
COUNTRIES = ["ES", "UY", "AR", "FR", "CU", "MX"]
EXTENSIONS = (
    Column("fecha_recepcion", "date"),
    Column("lugar_recepcion", "place"),
    Column("nota", "text"),
    Column("lengua_original", "language"),
    Column("traductor", "person_ref"),
    Column("original", "signature"),
    Column("vease", "signature_list"),
)


def random_text(rng: random.Random, max_len: int = 20, allow_empty: bool = True) -> str:
    n = rng.randint(0 if allow_empty else 1, max_len)
    text = "".join(rng.choice(TEXT_ALPHABET) for _ in range(n))
    if not allow_empty and not text.strip():
        text = "x" + text
    return text


def random_date(rng: random.Random, lo: int = 1900, hi: int = 1990, partial: bool = True) -> ArchiveDate:
    year = rng.randint(lo, hi)
    if partial and rng.random() < 0.1:
        return ArchiveDate(year)
    month = rng.randint(1, 12)
    if partial and rng.random() < 0.1:
        return ArchiveDate(year, month)
    return ArchiveDate(year, month, rng.randint(1, calendar.monthrange(year, month)[1]))


def random_place(rng: random.Random) -> PlaceRef:
    i = rng.randrange(len(PLACES))
    return PlaceRef(PLACES[i], COUNTRIES[i] if rng.random() < 0.8 else None)


def random_signatures(rng: random.Random, code: str, n: int) -> list[Signature]:
    """``n`` distinct signatures mixing both tail families and collisions."""
    sigs: list[Signature] = []
    keys: set = set()
    while len(sigs) < n:
        if rng.random() < 0.5:
            cat = rng.choice(["A", "AA", "AA1", "C", "E", "EA"])
            item = rng.randint(1, 120)
            genetic = GeneticState(rng.randint(1, 4)) if rng.random() < 0.3 else None
            sig = Signature(code, cat, Sequential(item, genetic))
            if str(sig) in keys:
                continue
        else:
            cat = rng.choice(["B", "BA", "D"])
            # few distinct dates so disambiguators get exercised
            date = random_date(rng, 1923, 1925)
            sig = Signature(code, cat, Chronological(date))
            try:
                sig = assign_disambiguator(sigs, sig)
            except ValueError:
                continue
        keys.add(str(sig))
        sigs.append(sig)
    return sigs


def random_persons(rng: random.Random, n: int = 8) -> tuple[Person, ...]:
    persons = []
    for i in range(n):
        role = "estrella" if i == 0 else rng.choice(["satélite", "otro"])
        persons.append(Person(
            person_id=f"P{i:02d}",
            canonical_name=random_text(rng, 15, allow_empty=False),
            aliases=tuple(f"alias {i} {k}" for k in range(rng.randint(0, 2))),
            birth_date=random_date(rng) if rng.random() < 0.7 else None,
            birth_place=random_place(rng) if rng.random() < 0.5 else None,
            death_date=random_date(rng) if rng.random() < 0.5 else None,
            death_place=random_place(rng) if rng.random() < 0.3 else None,
            professions=tuple(rng.sample(["poeta", "editor", "pintor", "músico"], rng.randint(0, 2))),
            role=role,
            associated_star="P00" if role == "satélite" else None,
        ))
    rng.shuffle(persons)
    return tuple(persons)


def _maybe(rng: random.Random, p: float, make):
    return make() if rng.random() < p else None


def random_fonds(seed: int, n: int = 500, code: str = "RND") -> Fonds:
    """A random fonds exercising every column kind, in random order."""
    rng = random.Random(seed)
    schema = extend_schema(*EXTENSIONS)
    plan = build_plan([("AA", "Teatro"), ("AA1", "Interludios"), ("BA", "Cartas"), ("EA", "Prensa")])
    persons = random_persons(rng)
    pids = [p.person_id for p in persons]
    sigs = random_signatures(rng, code, n)
    records = []
    for sig in sigs:
        seq = isinstance(sig.tail, Sequential)
        genetic = sig.genetic if seq else None
        ext = {}
        if rng.random() < 0.3:
            ext["fecha_recepcion"] = random_date(rng)
        if rng.random() < 0.3:
            ext["lugar_recepcion"] = random_place(rng)
        if rng.random() < 0.3:
            ext["nota"] = random_text(rng, allow_empty=False)
        if rng.random() < 0.2:
            ext["lengua_original"] = rng.choice(["fr", "en", "ca"])
        if rng.random() < 0.2:
            ext["traductor"] = rng.choice(pids)
        if rng.random() < 0.2:
            ext["original"] = rng.choice(sigs)
        if rng.random() < 0.2:
            ext["vease"] = tuple(rng.sample(sigs, rng.randint(1, min(3, len(sigs)))))
        records.append(Record(
            signature=sig,
            title=random_text(rng),
            form=rng.choice(["", "folio", "cuaderno", "tapuscrito"]),
            doc_type=random_text(rng, 8),
            nature=rng.choice(["", "manuscrito", "tapuscrito", "impreso", "correspondencia"]),
            date=_maybe(rng, 0.6, lambda: random_date(rng)),
            place=_maybe(rng, 0.5, lambda: random_place(rng)),
            language=_maybe(rng, 0.6, lambda: rng.choice(["es", "fr", "en"])),
            creator=_maybe(rng, 0.4, lambda: rng.choice(pids)),
            sender=_maybe(rng, 0.4, lambda: rng.choice(pids)),
            recipient=_maybe(rng, 0.4, lambda: rng.choice(pids)),
            sending_place=_maybe(rng, 0.4, lambda: random_place(rng)),
            genetic_dossier=random_text(rng, allow_empty=False) if genetic else None,
            genetic_state=genetic,
            genetic_relations=tuple(rng.sample(sigs, rng.randint(0, min(2, len(sigs))))),
            localizacion=random_text(rng),
            description=_maybe(rng, 0.4, lambda: random_text(rng, 60, allow_empty=False)),
            rights=_maybe(rng, 0.2, lambda: random_text(rng, allow_empty=False)),
            extensions=ext,
        ))
    rng.shuffle(records)
    return Fonds(code, plan, tuple(records), persons, schema)


# -- dirty rows for normalization --------------------------------------------

MONTHS_ES = ["enero", "febrero", "marzo", "abril", "mayo", "junio", "julio",
             "agosto", "septiembre", "octubre", "noviembre", "diciembre"]
GAZ_ALIASES = ["granada", "montevideo", "madrid", "buenos aires", "paris", "parís",
               "la habana", "mexico", "viznar"]
PERSON_ALIASES = ["José Mora Guarnido", "Mora Guarnido", "Federico García Lorca", "Lorca",
                  "Manuel de Falla", "Guillermo de Torre", "JMG", "FGL", "GT"]
COUNTRY_SPELLINGS = ["es", "ES", " uy", "España", "uruguay", "Argentina", "fr", "México"]
NATURE_SPELLINGS = ["Manuscrito", "TAPUSCRITO", "impreso", "Correspondencia", " correspondencia ",
                    "Tapuscrito"]


def _messy_case(rng: random.Random, text: str) -> str:
    style = rng.randrange(4)
    if style == 0:
        text = text.upper()
    elif style == 1:
        text = text.lower()
    elif style == 2:
        text = text.title()
    return rng.choice(["", " ", "  "]) + text.replace(" ", rng.choice([" ", "  "])) + rng.choice(["", " ", "\t"])


def dirty_date(rng: random.Random) -> str:
    d = random_date(rng, 1923, 1960)
    if d.month == 0:
        return rng.choice([str(d.year), f" {d.year} "])
    if d.day == 0:
        return rng.choice([f"{d.month:02d}/{d.year}", f"{d.year}-{d.month}", f"{MONTHS_ES[d.month - 1]} de {d.year}"])
    return rng.choice([
        f"{d.day}/{d.month}/{d.year}",
        f"{d.day:02d}-{d.month:02d}-{d.year}",
        f"{d.day}.{d.month}.{d.year}",
        f"{d.year}-{d.month}-{d.day}",
        f"{d.day} de {MONTHS_ES[d.month - 1]} de {d.year}",
        f"{d.day} de {MONTHS_ES[d.month - 1].capitalize()} de {d.year}",
        str(d),
    ])


def dirty_rows(seed: int, n: int = 1000) -> list[dict[str, str]]:
    """Records-CSV rows with the kinds of mess normalization has to fix."""
    rng = random.Random(seed)
    headers = extend_schema().headers()
    rows = []
    sigs = random_signatures(rng, "JMG", n)
    for sig in sigs:
        row = {h: "" for h in headers}
        row["signature"] = str(sig)
        row["title"] = _messy_case(rng, "carta a un amigo") if rng.random() < 0.8 else ""
        row["form"] = rng.choice(["folio", " folio", "Cuaderno  ", ""])
        row["nature"] = rng.choice(NATURE_SPELLINGS)
        row["date"] = dirty_date(rng) if rng.random() < 0.8 else ""
        for col in ("place", "sending_place"):
            if rng.random() < 0.7:
                row[col] = _messy_case(rng, rng.choice(GAZ_ALIASES))
                if rng.random() < 0.3:
                    row[f"{col}_country"] = rng.choice(COUNTRY_SPELLINGS)
        row["language"] = rng.choice(["ES", " es", "Fr", "", "en "])
        for col in ("creator", "sender", "recipient"):
            if rng.random() < 0.6:
                row[col] = _messy_case(rng, rng.choice(PERSON_ALIASES)) if rng.random() < 0.7 else rng.choice(PERSON_ALIASES)
        if isinstance(sig.tail, Sequential) and sig.genetic is not None:
            row["genetic_dossier"] = _messy_case(rng, "celebración en la plaza")
            row["genetic_state"] = rng.choice([str(sig.genetic).lower(), f" {sig.genetic}"])
        if rng.random() < 0.3:
            others = rng.sample(sigs, rng.randint(1, min(3, len(sigs))))
            sep = rng.choice([";", ", ", " | ", " ; "])
            row["genetic_relations"] = sep.join(str(s) for s in others + others[:1])
        row["localizacion"] = _messy_case(rng, "archivo familiar") if rng.random() < 0.5 else ""
        if rng.random() < 0.4:
            row["description"] = "  Primera  línea \n\tsegunda   línea  \n"
        rows.append(row)
    return rows


# -- synthetic correspondence --------------------------------------------------

CORRESPONDENTS = [f"C{i:02d}" for i in range(1, 31)]


def synthetic_letters(seed: int = 1923, n: int = 432) -> Fonds:
    """``n`` letters sent by JMG, dated uniformly over 1923-1960.

    The first and last letters are pinned to 1923 and 1960 so the date
    range is exact whatever the seed.
    """
    rng = random.Random(seed)
    base = load_fixture("jmg")
    persons = [base.person("JMG"), base.person("FGL")] + [
        Person(pid, f"Corresponsal, {pid}", role="otro") for pid in CORRESPONDENTS
    ]
    places = [PlaceRef("Granada", "ES"), PlaceRef("Madrid", "ES"), PlaceRef("Montevideo", "UY"),
              PlaceRef("Buenos Aires", "AR")]
    dates = []
    for i in range(n):
        if i == 0:
            year = 1923
        elif i == n - 1:
            year = 1960
        else:
            year = rng.randint(1923, 1960)
        month = rng.randint(1, 12)
        dates.append(ArchiveDate(year, month, rng.randint(1, calendar.monthrange(year, month)[1])))
    same_day: dict[ArchiveDate, int] = {}
    for d in dates:
        same_day[d] = same_day.get(d, 0) + 1
    used: dict[ArchiveDate, int] = {}
    records = []
    for i, date in enumerate(dates):
        letter = None
        if same_day[date] > 1:
            letter = "abcdefghijklmnopqrstuvwxyz"[used.get(date, 0)]
            used[date] = used.get(date, 0) + 1
        sig = Signature("JMG", "B", Chronological(date, letter))
        place = places[0] if date.year < 1924 else rng.choice(places[1:])
        records.append(Record(
            signature=sig,
            title=f"Carta {i + 1}",
            form="folio",
            doc_type="carta",
            nature="correspondencia",
            date=date,
            place=place,
            language="es",
            sender="JMG",
            recipient=rng.choice(CORRESPONDENTS),
            sending_place=place,
            localizacion="Archivo familiar, Montevideo",
        ))
    return Fonds("JMG", base.plan, tuple(records), tuple(persons), base.schema)
