"""Single-source publishing: Dublin Core, EAD 2002 and TEI P5 headers.

Every exporter returns the XML together with a :class:`CrosswalkReport`
listing, per record, which populated canonical fields were emitted and
which had no slot in the target format.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from typing import Optional

from .model import Fonds, Record
from .plan import PlanNode
from .schema import CORE_NAMES
from .sig import ArchiveDate, format_signature
from .xmlout import DC_NS, EAD_NS, OAI_DC_NS, TEI_NS, q, serialize, sub


@dataclass
class RecordReport:
    signature: str
    emitted: list[str] = field(default_factory=list)
    dropped: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)


@dataclass
class CrosswalkReport:
    target: str
    records: list[RecordReport] = field(default_factory=list)

    def for_signature(self, signature: str) -> RecordReport:
        for r in self.records:
            if r.signature == signature:
                return r
        raise KeyError(signature)


def populated_fields(rec: Record) -> list[str]:
    """Canonical fields carrying a value, in schema order."""
    out = []
    for name in CORE_NAMES:
        value = getattr(rec, name)
        if value not in (None, "", ()):
            out.append(name)
    out.extend(k for k, v in rec.extensions.items() if v not in (None, "", ()))
    return out


def record_date(rec: Record) -> Optional[ArchiveDate]:
    return rec.date if rec.date is not None else rec.signature.date


def _bookkeep(report: CrosswalkReport, rec: Record, emitted: set[str]) -> None:
    populated = populated_fields(rec)
    report.records.append(RecordReport(
        rec.key,
        emitted=[f for f in populated if f in emitted],
        dropped=[f for f in populated if f not in emitted],
    ))


def _person_name(fonds: Fonds, pid: str) -> str:
    person = fonds.person(pid)
    return person.canonical_name if person else pid


# -- Dublin Core ------------------------------------------------------------

def _dc_record(fonds: Fonds, rec: Record) -> tuple[ET.Element, set[str]]:
    dc = ET.Element(q(OAI_DC_NS, "dc"))
    emitted: set[str] = set()

    def put(element: str, text: str, source: str) -> None:
        sub(dc, q(DC_NS, element), text)
        emitted.add(source)

    if rec.title:
        put("title", rec.title, "title")
    if rec.creator:
        put("creator", _person_name(fonds, rec.creator), "creator")
    if rec.sender and rec.sender != rec.creator:
        put("creator", _person_name(fonds, rec.sender), "sender")
    elif rec.sender:
        emitted.add("sender")
    if rec.description:
        put("description", rec.description, "description")
    if rec.recipient:
        put("contributor", _person_name(fonds, rec.recipient), "recipient")
    date = record_date(rec)
    if date is not None:
        put("date", date.iso(), "date")
    if rec.nature:
        put("type", rec.nature, "nature")
    if rec.form:
        put("format", rec.form, "form")
    put("identifier", rec.key, "signature")
    if rec.localizacion:
        put("source", rec.localizacion, "localizacion")
    if rec.language:
        put("language", rec.language, "language")
    for rel in rec.genetic_relations:
        put("relation", format_signature(rel), "genetic_relations")
    if rec.place:
        put("coverage", rec.place.name, "place")
    if rec.rights:
        put("rights", rec.rights, "rights")
    return dc, emitted


def to_dublin_core(fonds: Fonds) -> tuple[str, CrosswalkReport]:
    """One ``oai_dc:dc`` block per record, using only the 15 simple elements."""
    report = CrosswalkReport("dc")
    root = ET.Element("records", {"fonds": fonds.code})
    for rec in fonds.sorted_records():
        dc, emitted = _dc_record(fonds, rec)
        root.append(dc)
        _bookkeep(report, rec, emitted)
    return serialize(root), report


# -- EAD --------------------------------------------------------------------

_EAD_LEVELS = {1: ("series", None), 2: ("subseries", None), 3: ("otherlevel", "subsubseries")}


def _e(tag: str) -> str:
    return q(EAD_NS, tag)


def _ead_item(fonds: Fonds, rec: Record, parent: ET.Element) -> set[str]:
    c = sub(parent, _e("c"), level="item")
    did = sub(c, _e("did"))
    emitted = {"signature"}
    sub(did, _e("unitid"), rec.key)
    if rec.title:
        sub(did, _e("unittitle"), rec.title)
        emitted.add("title")
    date = record_date(rec)
    if date is not None:
        sub(did, _e("unitdate"), date.iso(), normal=date.iso())
        emitted.add("date")
    for name in ("creator", "sender"):
        pid = getattr(rec, name)
        if pid:
            orig = sub(did, _e("origination"), label=name)
            sub(orig, _e("persname"), _person_name(fonds, pid))
            emitted.add(name)
    if rec.form or rec.doc_type:
        physdesc = sub(did, _e("physdesc"))
        if rec.form:
            sub(physdesc, _e("physfacet"), rec.form, type="form")
            emitted.add("form")
        if rec.doc_type:
            sub(physdesc, _e("genreform"), rec.doc_type)
            emitted.add("doc_type")
    if rec.language:
        lang = sub(did, _e("langmaterial"))
        sub(lang, _e("language"), rec.language)
        emitted.add("language")
    if rec.localizacion:
        repo = sub(did, _e("repository"))
        sub(repo, _e("corpname"), rec.localizacion)
        emitted.add("localizacion")

    if rec.nature or rec.recipient or rec.place or rec.sending_place:
        ca = sub(c, _e("controlaccess"))
        if rec.nature:
            sub(ca, _e("genreform"), rec.nature, source="nature")
            emitted.add("nature")
        if rec.recipient:
            sub(ca, _e("persname"), _person_name(fonds, rec.recipient), role="recipient")
            emitted.add("recipient")
        if rec.place:
            sub(ca, _e("geogname"), rec.place.name)
            emitted.add("place")
        if rec.sending_place:
            sub(ca, _e("geogname"), rec.sending_place.name, role="sending place")
            emitted.add("sending_place")
    if rec.description:
        sub(sub(c, _e("scopecontent")), _e("p"), rec.description)
        emitted.add("description")
    if rec.rights:
        sub(sub(c, _e("userestrict")), _e("p"), rec.rights)
        emitted.add("rights")
    if rec.genetic_relations:
        rm = sub(c, _e("relatedmaterial"))
        for rel in rec.genetic_relations:
            sub(rm, _e("p"), format_signature(rel))
        emitted.add("genetic_relations")
    if rec.genetic_dossier:
        sub(sub(c, _e("odd"), type="geneticDossier"), _e("p"), rec.genetic_dossier)
        emitted.add("genetic_dossier")
    if rec.genetic_state:
        sub(sub(c, _e("odd"), type="geneticState"), _e("p"), str(rec.genetic_state))
        emitted.add("genetic_state")
    return emitted


def to_ead(fonds: Fonds) -> tuple[str, CrosswalkReport]:
    """EAD 2002 finding aid whose components mirror the classification plan."""
    report = CrosswalkReport("ead")
    by_category: dict[str, list[Record]] = {}
    for rec in fonds.sorted_records():
        by_category.setdefault(rec.signature.category, []).append(rec)
    placed: set[str] = set()

    root = ET.Element(_e("ead"))
    header = sub(root, _e("eadheader"))
    sub(header, _e("eadid"), fonds.code)
    titlestmt = sub(sub(header, _e("filedesc")), _e("titlestmt"))
    sub(titlestmt, _e("titleproper"), f"Fonds {fonds.code}")
    archdesc = sub(root, _e("archdesc"), level="fonds")
    did = sub(archdesc, _e("did"))
    sub(did, _e("unitid"), fonds.code)
    sub(did, _e("unittitle"), f"Fonds {fonds.code}")
    dsc = sub(archdesc, _e("dsc"))

    emitted_by_key: dict[str, set[str]] = {}

    def component(node: PlanNode, parent: ET.Element, depth: int) -> None:
        level, other = _EAD_LEVELS[depth]
        attrs = {"level": level}
        if other:
            attrs["otherlevel"] = other
        c = sub(parent, _e("c"), **attrs)
        cdid = sub(c, _e("did"))
        sub(cdid, _e("unitid"), node.code)
        sub(cdid, _e("unittitle"), node.label)
        for rec in by_category.get(node.code, []):
            emitted_by_key[rec.key] = _ead_item(fonds, rec, c)
            placed.add(node.code)
        for child in node.children:
            component(child, c, depth + 1)

    for root_node in fonds.plan.roots:
        component(root_node, dsc, 1)

    for rec in fonds.sorted_records():
        if rec.signature.category in placed:
            _bookkeep(report, rec, emitted_by_key[rec.key])
        else:
            _bookkeep(report, rec, set())
            report.records[-1].warnings.append(
                f"category {rec.signature.category} not in plan; record omitted"
            )
    return serialize(root, default_namespace=EAD_NS), report


# -- TEI --------------------------------------------------------------------

def _t(tag: str) -> str:
    return q(TEI_NS, tag)


def _tei_header(fonds: Fonds, rec: Record) -> tuple[ET.Element, set[str]]:
    emitted = {"signature"}
    root = ET.Element(_t("teiHeader"))
    file_desc = sub(root, _t("fileDesc"))
    title_stmt = sub(file_desc, _t("titleStmt"))
    sub(title_stmt, _t("title"), rec.title or rec.key)
    if rec.title:
        emitted.add("title")
    if rec.creator:
        sub(title_stmt, _t("author"), _person_name(fonds, rec.creator), ref=f"#{rec.creator}")
        emitted.add("creator")

    pub = sub(file_desc, _t("publicationStmt"))
    sub(pub, _t("authority"), f"Fonds {fonds.code}")
    if rec.rights:
        sub(sub(pub, _t("availability")), _t("p"), rec.rights)
        emitted.add("rights")

    if rec.genetic_relations or rec.genetic_dossier or rec.genetic_state:
        notes = sub(file_desc, _t("notesStmt"))
        if rec.genetic_dossier:
            sub(notes, _t("note"), rec.genetic_dossier, type="geneticDossier")
            emitted.add("genetic_dossier")
        if rec.genetic_state:
            sub(notes, _t("note"), str(rec.genetic_state), type="geneticState")
            emitted.add("genetic_state")
        for rel in rec.genetic_relations:
            text = format_signature(rel)
            note = sub(notes, _t("note"), type="geneticRelation")
            sub(note, _t("ref"), text, target=f"{text}.xml")
            emitted.add("genetic_relations")

    ms = sub(sub(file_desc, _t("sourceDesc")), _t("msDesc"))
    ident = sub(ms, _t("msIdentifier"))
    if rec.localizacion:
        sub(ident, _t("repository"), rec.localizacion)
        emitted.add("localizacion")
    sub(ident, _t("idno"), rec.key)
    if rec.description:
        sub(sub(ms, _t("msContents")), _t("summary"), rec.description)
        emitted.add("description")
    if rec.form:
        obj = sub(sub(ms, _t("physDesc")), _t("objectDesc"), form=rec.form)
        sub(obj, _t("p"), rec.form)
        emitted.add("form")

    is_letter = rec.nature == "correspondencia"
    date = record_date(rec)
    if rec.place or (date is not None and not is_letter):
        origin = sub(sub(ms, _t("history")), _t("origin"))
        if rec.place:
            sub(origin, _t("origPlace"), rec.place.name)
            emitted.add("place")
        if date is not None and not is_letter:
            sub(origin, _t("origDate"), date.iso(), when=date.iso())
            emitted.add("date")

    profile = ET.Element(_t("profileDesc"))
    if is_letter:
        corresp = sub(profile, _t("correspDesc"))
        sent = sub(corresp, _t("correspAction"), type="sent")
        if rec.sender:
            sub(sent, _t("persName"), _person_name(fonds, rec.sender), ref=f"#{rec.sender}")
            emitted.add("sender")
        if rec.sending_place:
            sub(sent, _t("placeName"), rec.sending_place.name)
            emitted.add("sending_place")
        if date is not None:
            sub(sent, _t("date"), date.iso(), when=date.iso())
            emitted.add("date")
        if rec.recipient:
            received = sub(corresp, _t("correspAction"), type="received")
            sub(received, _t("persName"), _person_name(fonds, rec.recipient), ref=f"#{rec.recipient}")
            emitted.add("recipient")
    if rec.language:
        usage = sub(profile, _t("langUsage"))
        sub(usage, _t("language"), rec.language, ident=rec.language)
        emitted.add("language")
    if rec.nature or rec.doc_type:
        keywords = sub(sub(profile, _t("textClass")), _t("keywords"))
        if rec.nature:
            sub(keywords, _t("term"), rec.nature, type="nature")
            emitted.add("nature")
        if rec.doc_type:
            sub(keywords, _t("term"), rec.doc_type, type="docType")
            emitted.add("doc_type")
    if len(profile):
        root.append(profile)
    return root, emitted


def to_tei_headers(fonds: Fonds) -> tuple[dict[str, str], CrosswalkReport]:
    """One TEI P5 ``teiHeader`` document per record, keyed by signature."""
    report = CrosswalkReport("tei")
    docs: dict[str, str] = {}
    for rec in fonds.sorted_records():
        header, emitted = _tei_header(fonds, rec)
        docs[rec.key] = serialize(header, default_namespace=TEI_NS)
        _bookkeep(report, rec, emitted)
    return docs, report
