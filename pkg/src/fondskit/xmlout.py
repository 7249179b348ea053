"""Deterministic XML serialization shared by the exporters."""

from __future__ import annotations

import copy
import xml.etree.ElementTree as ET
from typing import Optional

DC_NS = "http://purl.org/dc/elements/1.1/"
OAI_DC_NS = "http://www.openarchives.org/OAI/2.0/oai_dc/"
EAD_NS = "urn:isbn:1-931666-22-9"
TEI_NS = "http://www.tei-c.org/ns/1.0"
GEXF_NS = "http://www.gexf.net/1.2draft"

ET.register_namespace("dc", DC_NS)
ET.register_namespace("oai_dc", OAI_DC_NS)


def sub(parent: ET.Element, tag: str, text: Optional[str] = None, **attrs: str) -> ET.Element:
    el = ET.SubElement(parent, tag, {k.rstrip("_"): v for k, v in attrs.items()})
    if text is not None:
        el.text = text
    return el


def serialize(root: ET.Element, default_namespace: Optional[str] = None) -> str:
    """Two-space indented UTF-8 document with LF line endings."""
    if default_namespace is not None:
        # ElementTree refuses default_namespace when attributes are
        # unqualified, so declare the namespace by hand instead
        root = copy.deepcopy(root)
        prefix = f"{{{default_namespace}}}"
        for el in root.iter():
            if el.tag.startswith(prefix):
                el.tag = el.tag[len(prefix):]
        root.set("xmlns", default_namespace)
    ET.indent(root, space="  ")
    body = ET.tostring(root, encoding="unicode")
    return '<?xml version="1.0" encoding="UTF-8"?>\n' + body + "\n"


def q(ns: str, tag: str) -> str:
    return f"{{{ns}}}{tag}"
