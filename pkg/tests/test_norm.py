from datetime import date

import pytest
from hypothesis import given
from hypothesis import strategies as st

from fondskit.model import PlaceRef, Record
from fondskit.norm import (
    EmptyName,
    NormalizationRule,
    PersonIndex,
    UnparseableDate,
    check_rules,
    default_rules,
    normalize_country,
    normalize_date,
    normalize_person_row,
    normalize_place,
    normalize_record,
    normalize_row,
    split_person_name,
)
from fondskit.schema import core_schema
from fondskit.sig import ArchiveDate, parse_signature
from fondskit.store import record_cells, row_to_record
from helpers import dirty_rows, jmg_tables, load_fixture

# month names typed out independently of the implementation's table
MONTHS = {
    1: "enero", 2: "febrero", 3: "marzo", 4: "abril", 5: "mayo", 6: "junio",
    7: "julio", 8: "agosto", 9: "septiembre", 10: "octubre", 11: "noviembre", 12: "diciembre",
}


@pytest.mark.parametrize(
    "raw, iso",
    [
        ("17/08/1923", "1923-08-17"),
        ("17-08-1923", "1923-08-17"),
        ("9.6.1923", "1923-06-09"),
        ("1923-8-17", "1923-08-17"),
        ("1923", "1923-00-00"),
        ("1923-08", "1923-08-00"),
        ("08/1923", "1923-08-00"),
        ("17 de agosto de 1923", "1923-08-17"),
        ("17 de Agosto de 1923", "1923-08-17"),
        ("1º de setiembre de 1924", "1924-09-01"),
        ("agosto de 1923", "1923-08-00"),
        ("  1923-00-00 ", "1923-00-00"),
    ],
)
def test_date_spellings(raw, iso):
    assert str(normalize_date(raw)) == iso


@pytest.mark.parametrize("month", range(1, 13))
def test_every_spanish_month(month):
    assert normalize_date(f"3 de {MONTHS[month]} de 1950") == ArchiveDate(1950, month, 3)


@pytest.mark.parametrize("raw", ["", "mañana", "31/02/1923", "17 de brumario de 1923", "1923/17/08"])
def test_unparseable_dates(raw):
    with pytest.raises(UnparseableDate):
        normalize_date(raw)


def test_place_lookup_case_insensitive():
    gazetteer, _ = jmg_tables()
    assert normalize_place("montevideo", gazetteer) == (PlaceRef("Montevideo", "UY"), [])
    assert normalize_place("  MONTEVIDEO ", gazetteer)[0] == PlaceRef("Montevideo", "UY")
    place, notes = normalize_place("Tánger", gazetteer)
    assert place == PlaceRef("Tánger") and notes[0].severity == "warning"


@pytest.mark.parametrize(
    "raw, code",
    [("es", "ES"), (" uy ", "UY"), ("España", "ES"), ("uruguay", "UY"), ("Atlántida", "Atlántida")],
)
def test_country(raw, code):
    assert normalize_country(raw) == code


@pytest.mark.parametrize(
    "raw, name, confident",
    [
        ("Federico García Lorca", "García Lorca, Federico", False),
        ("manuel de falla", "Falla, Manuel de", False),
        ("Ramón Gómez de la Serna", "Gómez de la Serna, Ramón", False),
        ("MORA GUARNIDO, JOSÉ", "Mora Guarnido, José", True),
        ("Torre ,  Guillermo de", "Torre, Guillermo de", True),
        ("Lorca", "Lorca", False),
    ],
)
def test_name_split(raw, name, confident):
    assert split_person_name(raw) == (name, confident)


def test_name_split_uses_registry():
    _, index = jmg_tables()
    assert split_person_name("José  Mora Guarnido", index) == ("Mora Guarnido, José", True)
    with pytest.raises(EmptyName):
        split_person_name("   ")


def test_person_index():
    _, index = jmg_tables()
    assert index.lookup("lorca") == "FGL"
    assert index.lookup(" Mora  Guarnido ") == "JMG"
    assert index.lookup("JMG") == "JMG"
    assert index.lookup("jmg") == "JMG"
    assert index.lookup("Nadie") is None
    assert PersonIndex().lookup("JMG") is None


def test_rule_validation():
    with pytest.raises(ValueError):
        NormalizationRule("shout", ("title",))
    with pytest.raises(ValueError):
        check_rules([NormalizationRule("trim_case", ("title",)), NormalizationRule("trim_case", ("title",))])
    rules = {r.rule_id: r.applies_to for r in default_rules()}
    assert rules["date_iso"] == ("date",)
    assert rules["person_name"] == ("creator", "sender", "recipient")
    assert rules["country_code"] == ("place_country", "sending_place_country")
    assert "signature" not in rules["trim_case"]


def _row(**cells):
    row = {h: "" for h in core_schema().headers()}
    row.update(cells)
    return row


def test_row_normalization_with_findings():
    gazetteer, index = jmg_tables()
    row = _row(
        signature="JMG-B-17-08-1923",
        title="  Adiós,   Madrid ",
        nature="Correspondencia",
        date="17/08/1923",
        sending_place="granada",
        language="ES",
        sender="José Mora Guarnido",
        recipient="lorca",
    )
    out, findings = normalize_row(row, gazetteer=gazetteer, index=index)
    assert out["signature"] == "JMG-B-17-08-1923"
    assert out["title"] == "Adiós, Madrid"
    assert out["nature"] == "correspondencia"
    assert out["date"] == "1923-08-17"
    assert (out["sending_place"], out["sending_place_country"]) == ("Granada", "ES")
    assert out["language"] == "es"
    assert (out["sender"], out["recipient"]) == ("JMG", "FGL")
    date = [f for f in findings if f.field == "date"][0]
    assert (date.severity, date.signature, date.before, date.after) == (
        "info", "JMG-B-1923-08-17", "17/08/1923", "1923-08-17",
    )
    assert all(f.severity == "info" for f in findings)


def test_row_warnings():
    gazetteer, index = jmg_tables()
    row = _row(signature="JMG-B-01", date="pronto", place="Tánger", recipient="Nadie Nunca",
               genetic_relations="JMG-B-02;basura")
    out, findings = normalize_row(row, gazetteer=gazetteer, index=index)
    warned = {f.field for f in findings if f.severity == "warning"}
    assert warned == {"date", "place", "recipient", "genetic_relations"}
    assert out["date"] == "pronto"


def test_relations_canonicalized():
    out, _ = normalize_row(_row(signature="CDM-AA1-01-C1",
                                genetic_relations="CDM-AA1-3-C3, CDM-AA1-02-C2;CDM-AA1-03-C3"))
    assert out["genetic_relations"] == "CDM-AA1-02-C2;CDM-AA1-03-C3"


def test_description_keeps_line_breaks():
    out, _ = normalize_row(_row(signature="JMG-B-01", description="  uno  dos \n\t tres  "))
    assert out["description"] == "uno dos\ntres"


def test_normalize_typed_record():
    gazetteer, index = jmg_tables()
    rec = Record(parse_signature("JMG-B-1923-08-17"), title=" x ", sending_place=PlaceRef("granada"))
    new, findings = normalize_record(rec, gazetteer=gazetteer, index=index)
    assert new.sending_place == PlaceRef("Granada", "ES")
    assert new.title == "x" and new.signature == rec.signature
    assert {f.field for f in findings} == {"title", "sending_place", "sending_place_country"}


def test_fixture_is_already_normal():
    gazetteer, index = jmg_tables()
    fonds = load_fixture("jmg")
    for rec in fonds.records:
        row = record_cells(rec, fonds.schema)
        assert normalize_row(row, gazetteer=gazetteer, index=index) == (row, [])


def test_person_row():
    gazetteer, _ = jmg_tables()
    row = {
        "person_id": " X ", "canonical_name": "guillermo de torre", "aliases": "", "birth_date": "13/8/1900",
        "birth_place": "madrid", "birth_country": "", "death_date": "", "death_place": "buenos aires",
        "death_country": "", "professions": "", "role": "otro", "associated_star": "",
    }
    out, findings = normalize_person_row(row, gazetteer)
    assert out["person_id"] == "X"
    assert out["canonical_name"] == "Torre, Guillermo de"
    assert (out["birth_date"], out["birth_place"], out["birth_country"]) == ("1900-08-13", "Madrid", "ES")
    assert out["death_country"] == "AR"
    assert [f.field for f in findings if f.severity == "warning"] == ["canonical_name"]
    assert {f.field for f in findings if f.severity == "info"} == {
        "person_id", "canonical_name", "birth_date", "birth_place", "birth_country",
        "death_place", "death_country",
    }
    assert normalize_person_row(out, gazetteer) == (out, [])


def test_dirty_rows_parse_after_one_pass():
    gazetteer, index = jmg_tables()
    for row in dirty_rows(3, 200):
        out, _ = normalize_row(row, gazetteer=gazetteer, index=index)
        row_to_record(out, core_schema())


names = st.lists(
    st.text(alphabet="abcdeñóúABCDE", min_size=1, max_size=8) | st.sampled_from(["de", "la", "del", "y"]),
    min_size=1, max_size=5,
).map(" ".join)


@given(names)
def test_name_split_idempotent(raw):
    once, _ = split_person_name(raw)
    assert split_person_name(once)[0] == once


@given(st.dates(date(1000, 1, 1), date(2999, 12, 31)).map(lambda d: (d.year, d.month, d.day)),
       st.sampled_from(["{d}/{m}/{y}", "{d:02d}-{m:02d}-{y}", "{y}-{m}-{d}", "{d} de {mes} de {y}"]))
def test_date_spelling_property(ymd, pattern):
    y, m, d = ymd
    raw = pattern.format(y=y, m=m, d=d, mes=MONTHS[m])
    once = normalize_date(raw)
    assert once == ArchiveDate(y, m, d)
    assert normalize_date(str(once)) == once


@given(st.integers(0, 10**6))
def test_row_normalization_idempotent(seed):
    gazetteer, index = jmg_tables()
    for row in dirty_rows(seed, 5):
        once, _ = normalize_row(row, gazetteer=gazetteer, index=index)
        assert normalize_row(once, gazetteer=gazetteer, index=index) == (once, [])
