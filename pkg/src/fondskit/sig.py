"""Archive signatures: grammar, canonical rendering, ordering, disambiguation.

A signature binds a physical document and its digital surrogate::

    JMG-B-1924-09-17a      fonds JMG, category B, chronological tail
    CDM-AA1-01-C1          fonds CDM, sub-series AA1, item 01, copy 1

Chronological tails are accepted as ``YYYY-MM-DD`` or the legacy
``DD-MM-YYYY`` and always rendered in the first order.
"""

from __future__ import annotations

import calendar
import re
import string
from dataclasses import dataclass, replace
from typing import Iterable, Optional, Union

FONDS_RE = re.compile(r"^[A-Z]{2,4}$")
CATEGORY_RE = re.compile(r"^[A-E]([A-Z](\d+)?)?$")
_TOKEN_RE = re.compile(r"^(\d+)([a-z])?$")
_COPY_RE = re.compile(r"^C([1-9]\d*)$")
_ITEM_RE = re.compile(r"^\d+$")

DISAMBIGUATORS = string.ascii_lowercase


class SignatureError(ValueError):
    """Base class for signature grammar failures."""


class MalformedSignature(SignatureError):
    pass


class AmbiguousDate(SignatureError):
    pass


class InvalidDate(SignatureError):
    pass


class DisambiguatorExhausted(SignatureError):
    pass


@dataclass(frozen=True, order=True)
class ArchiveDate:
    """A possibly partial date; 0 marks an unknown month or day."""

    year: int
    month: int = 0
    day: int = 0

    def __post_init__(self) -> None:
        if not 1000 <= self.year <= 2999:
            raise InvalidDate(f"year out of range: {self.year}")
        if not 0 <= self.month <= 12:
            raise InvalidDate(f"month out of range: {self.month}")
        if not 0 <= self.day <= 31:
            raise InvalidDate(f"day out of range: {self.day}")
        if self.day and not self.month:
            raise InvalidDate("day given without month")
        if self.day and self.day > calendar.monthrange(self.year, self.month)[1]:
            raise InvalidDate(
                f"no day {self.day} in {self.year:04d}-{self.month:02d}"
            )

    @classmethod
    def parse(cls, text: str) -> "ArchiveDate":
        """Parse the canonical ``YYYY-MM-DD`` form (``00`` for unknown parts)."""
        m = re.fullmatch(r"(\d{4})-(\d{2})-(\d{2})", text.strip())
        if not m:
            raise InvalidDate(f"not a canonical date: {text!r}")
        return cls(int(m[1]), int(m[2]), int(m[3]))

    def __str__(self) -> str:
        return f"{self.year:04d}-{self.month:02d}-{self.day:02d}"

    def iso(self) -> str:
        """ISO 8601 with reduced precision: unknown parts are omitted."""
        if not self.month:
            return f"{self.year:04d}"
        if not self.day:
            return f"{self.year:04d}-{self.month:02d}"
        return str(self)


@dataclass(frozen=True)
class GeneticState:
    copy_number: int

    def __post_init__(self) -> None:
        if self.copy_number < 1:
            raise ValueError("copy number must be >= 1")

    @classmethod
    def parse(cls, text: str) -> "GeneticState":
        m = _COPY_RE.match(text.strip())
        if not m:
            raise MalformedSignature(f"bad genetic state: {text!r}")
        return cls(int(m[1]))

    def __str__(self) -> str:
        return f"C{self.copy_number}"


@dataclass(frozen=True)
class Sequential:
    item_no: int
    genetic: Optional[GeneticState] = None

    def __post_init__(self) -> None:
        if self.item_no < 1:
            raise MalformedSignature("item number must be positive")


@dataclass(frozen=True)
class Chronological:
    date: ArchiveDate
    disambiguator: Optional[str] = None

    def __post_init__(self) -> None:
        d = self.disambiguator
        if d is not None and (len(d) != 1 or d not in DISAMBIGUATORS):
            raise MalformedSignature(f"bad disambiguator: {d!r}")


Tail = Union[Sequential, Chronological]


@dataclass(frozen=True)
class Signature:
    fonds: str
    category: str
    tail: Tail

    def __post_init__(self) -> None:
        if not FONDS_RE.match(self.fonds):
            raise MalformedSignature(f"bad fonds code: {self.fonds!r}")
        if not CATEGORY_RE.match(self.category):
            raise MalformedSignature(f"bad category code: {self.category!r}")

    @property
    def is_chronological(self) -> bool:
        return isinstance(self.tail, Chronological)

    @property
    def genetic(self) -> Optional[GeneticState]:
        return self.tail.genetic if isinstance(self.tail, Sequential) else None

    @property
    def date(self) -> Optional[ArchiveDate]:
        return self.tail.date if isinstance(self.tail, Chronological) else None

    def __str__(self) -> str:
        return format_signature(self)


def _parse_date_tokens(tokens: list[str], raw: str) -> Chronological:
    parsed = []
    for i, tok in enumerate(tokens):
        m = _TOKEN_RE.match(tok)
        if not m or (m[2] and i != len(tokens) - 1):
            raise MalformedSignature(f"bad date token {tok!r} in {raw!r}")
        parsed.append(m[1])
    letter = _TOKEN_RE.match(tokens[-1])[2]
    long_tokens = [i for i, t in enumerate(parsed) if len(t) == 4]
    if len(long_tokens) != 1 or long_tokens[0] not in (0, 2):
        raise AmbiguousDate(f"cannot place the year in {raw!r}")
    if any(len(t) != 2 for i, t in enumerate(parsed) if i != long_tokens[0]):
        raise MalformedSignature(f"month and day must be 2 digits in {raw!r}")
    if long_tokens[0] == 0:
        year, month, day = parsed
    else:
        day, month, year = parsed
    return Chronological(ArchiveDate(int(year), int(month), int(day)), letter)


def parse_signature(raw: str) -> Signature:
    """Parse a signature in either accepted date order.

    >>> str(parse_signature("JMG-B-17-08-1923"))
    'JMG-B-1923-08-17'
    """
    if not raw or not raw.strip():
        raise MalformedSignature("empty signature")
    text = raw.strip()
    parts = text.split("-")
    if len(parts) < 3:
        raise MalformedSignature(f"too few components: {raw!r}")
    fonds, category, tokens = parts[0], parts[1], parts[2:]
    if not FONDS_RE.match(fonds):
        raise MalformedSignature(f"bad fonds code in {raw!r}")
    if not CATEGORY_RE.match(category):
        raise MalformedSignature(f"bad category code in {raw!r}")

    if len(tokens) == 3:
        tail: Tail = _parse_date_tokens(tokens, raw)
    elif len(tokens) in (1, 2) and _ITEM_RE.match(tokens[0]):
        genetic = GeneticState.parse(tokens[1]) if len(tokens) == 2 else None
        tail = Sequential(int(tokens[0]), genetic)
    else:
        raise MalformedSignature(f"unrecognised tail in {raw!r}")
    return Signature(fonds, category, tail)


def format_signature(sig: Signature) -> str:
    head = f"{sig.fonds}-{sig.category}"
    tail = sig.tail
    if isinstance(tail, Chronological):
        return f"{head}-{tail.date}{tail.disambiguator or ''}"
    text = f"{head}-{tail.item_no:02d}"
    if tail.genetic is not None:
        text += f"-{tail.genetic}"
    return text


def sort_key(sig: Signature) -> tuple:
    """Total order: fonds, category, then the tail.

    Chronological tails sort before sequential ones in the same category;
    unknown date parts (0) and a missing letter sort first.
    """
    tail = sig.tail
    if isinstance(tail, Chronological):
        d = tail.date
        rest = (0, d.year, d.month, d.day, tail.disambiguator or "")
    else:
        copy = tail.genetic.copy_number if tail.genetic else 0
        rest = (1, tail.item_no, copy, "")
    return (sig.fonds, sig.category) + rest


def _same_slot(a: Signature, b: Signature) -> bool:
    return (
        a.is_chronological
        and b.is_chronological
        and a.fonds == b.fonds
        and a.category == b.category
        and a.date == b.date
    )


def disambiguate(
    existing: Iterable[Signature], candidate: Signature
) -> tuple[Signature, Optional[Signature]]:
    """Assign the next free letter to ``candidate``.

    Returns ``(new_candidate, rename)`` where ``rename`` is the first
    colliding existing signature that carries no letter yet and must be
    renamed to ``...a`` by the caller, or ``None``.
    """
    if not candidate.is_chronological or candidate.tail.disambiguator:
        raise MalformedSignature("candidate must be chronological without a letter")
    colliding = [s for s in existing if _same_slot(s, candidate)]
    if not colliding:
        return candidate, None

    used = set()
    rename = None
    for s in colliding:
        letter = s.tail.disambiguator
        if letter is None:
            if rename is None:
                rename = s
            letter = "a"
        used.add(letter)
    for letter in DISAMBIGUATORS:
        if letter not in used:
            return replace(candidate, tail=replace(candidate.tail, disambiguator=letter)), rename
    raise DisambiguatorExhausted(
        f"more than {len(DISAMBIGUATORS)} items share {format_signature(candidate)}"
    )


def assign_disambiguator(existing: Iterable[Signature], candidate: Signature) -> Signature:
    return disambiguate(existing, candidate)[0]
