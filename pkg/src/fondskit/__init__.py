"""Canonical-CSV management of literary archive fonds.

Signatures, classification plans, validation, normalization, Dublin Core /
EAD / TEI publishing, harvesting and correspondence networks.
"""

from .model import Finding, Fonds, Person, PlaceRef, Record, resolve_dossier, validate_fonds
from .plan import ClassificationPlan, load_plan
from .sig import ArchiveDate, Signature, format_signature, parse_signature, sort_key
from .store import read_fonds, write_fonds

__version__ = "0.1.0"

__all__ = [
    "ArchiveDate",
    "ClassificationPlan",
    "Finding",
    "Fonds",
    "Person",
    "PlaceRef",
    "Record",
    "Signature",
    "format_signature",
    "load_plan",
    "parse_signature",
    "read_fonds",
    "resolve_dossier",
    "sort_key",
    "validate_fonds",
    "write_fonds",
]
