from dataclasses import replace

import pytest

from fondskit.harvest import (
    MappingError,
    MissingSourceField,
    NoSignatureMapping,
    apply_mapping,
    load_mapping,
    merge,
)
from fondskit.model import Fonds, PlaceRef
from fondskit.sig import ArchiveDate
from fondskit.store import FondsMismatch, write_fonds
from helpers import jmg_tables, load_fixture

FOREIGN = """Signatura,Fecha,Destinatario,Lugar,Asunto,Notas
JMG-B-17-08-1923,17 de agosto de 1923,Federico García Lorca,granada,"Adiós, Madrid",sin fechar
JMG-B-1925-03-02,2/3/1925,Lorca,MONTEVIDEO,Carta nueva,
"""

MAPPING = """source_field,canonical_field,transform
Signatura,signature,none
Fecha,date,date_iso
Destinatario,recipient,person_name
Lugar,sending_place,place
Asunto,title,
"""


def test_apply_mapping():
    gazetteer, index = jmg_tables()
    records, findings = apply_mapping(FOREIGN, load_mapping(MAPPING), gazetteer, index)
    assert [r.key for r in records] == ["JMG-B-1923-08-17", "JMG-B-1925-03-02"]
    first, second = records
    assert first.date == ArchiveDate(1923, 8, 17)
    assert first.recipient == "FGL" and second.recipient == "FGL"
    assert second.sending_place == PlaceRef("Montevideo", "UY")
    assert first.title == "Adiós, Madrid"
    assert [(f.severity, f.field) for f in findings] == [("warning", "Notas")]


def test_mapping_errors():
    with pytest.raises(NoSignatureMapping):
        apply_mapping(FOREIGN, load_mapping("source_field,canonical_field,transform\nFecha,date,date_iso\n"))
    with pytest.raises(MappingError):
        apply_mapping(FOREIGN, load_mapping(MAPPING + "Notas,colour,none\n"))
    with pytest.raises(MappingError):
        apply_mapping(FOREIGN, load_mapping(MAPPING + "Notas,description,shout\n"))
    with pytest.raises(MissingSourceField):
        apply_mapping(FOREIGN, load_mapping(MAPPING + "Caja,localizacion,none\n"))


def test_bad_rows_become_findings():
    doc = "Signatura,Fecha,Destinatario,Lugar,Asunto,Notas\nJMG-B-17-1923-08,,,,,\nJMG-B-01,1/1/1930,,,x,\n"
    records, findings = apply_mapping(doc, load_mapping(MAPPING))
    assert [r.key for r in records] == ["JMG-B-01"]
    errors = [f for f in findings if f.severity == "error"]
    assert len(errors) == 1 and errors[0].field == "signature"


def test_unparseable_date_is_error_finding():
    doc = "Signatura,Fecha,Destinatario,Lugar,Asunto,Notas\nJMG-B-01,pronto,,,,\n"
    records, findings = apply_mapping(doc, load_mapping(MAPPING))
    assert records == []
    assert {f.field for f in findings} >= {"date"}


def test_split_list_transform():
    doc = "sig,rel\nCDM-AA1-01-C1,\"CDM-AA1-01-C2, CDM-AA1-01-C3\"\n"
    mapping = load_mapping("source_field,canonical_field,transform\nsig,signature,none\nrel,genetic_relations,split_list\n")
    records, findings = apply_mapping(doc, mapping)
    assert [str(s) for s in records[0].genetic_relations] == ["CDM-AA1-01-C2", "CDM-AA1-01-C3"]
    assert findings == []


def test_empty_foreign_csv():
    assert apply_mapping("", load_mapping(MAPPING)) == ([], [])


def _incoming():
    gazetteer, index = jmg_tables()
    return apply_mapping(FOREIGN, load_mapping(MAPPING), gazetteer, index)[0]


@pytest.mark.parametrize(
    "policy, disposition",
    [("strict", "conflict"), ("keep_base", "kept_base"), ("prefer_incoming", "took_incoming")],
)
def test_merge_policies(policy, disposition):
    base = load_fixture("jmg")
    merged, report = merge(base, _incoming(), policy)
    assert report.added == ["JMG-B-1925-03-02"]
    assert report.conflicting == ["JMG-B-1923-08-17"]
    fields = {e.field for e in report.entries if e.disposition == disposition}
    assert "description" in fields and "title" not in fields
    rec = merged.record("JMG-B-1923-08-17")
    if policy == "prefer_incoming":
        assert rec.description is None
    else:
        assert rec == base.record("JMG-B-1923-08-17")
    assert len(merged.records) == 6


def test_merge_identical_and_report_csv():
    base = load_fixture("jmg")
    merged, report = merge(base, base.records)
    assert merged == base
    assert report.identical == [r.key for r in base.sorted_records()]
    assert report.to_csv().splitlines()[0] == "signature,disposition,field,base_value,incoming_value"


def test_merge_rejects_other_fonds():
    with pytest.raises(FondsMismatch):
        merge(Fonds("CDM"), load_fixture("jmg").records)
    with pytest.raises(ValueError):
        merge(load_fixture("jmg"), [], "newest")


def test_merge_into_empty_reproduces_fixture():
    base = load_fixture("jmg")
    merged, report = merge(replace(base, records=()), base.records[::-1])
    assert write_fonds(merged) == write_fonds(base)
    assert len(report.added) == 5
