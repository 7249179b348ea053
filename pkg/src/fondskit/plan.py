"""Per-fonds classification plan rooted at the five fixed categories A-E."""

from __future__ import annotations

import csv
import io
import re
from dataclasses import dataclass, field
from typing import Iterator, Optional

from .sig import CATEGORY_RE

DEFAULT_ROOTS = {
    "A": "Obras, creaciones, producciones",
    "B": "Correspondencia",
    "C": "Documentación",
    "D": "Archivo biográfico",
    "E": "Recepción",
}


class PlanError(ValueError):
    pass


class DuplicateCode(PlanError):
    pass


class OrphanCode(PlanError):
    pass


class BadLabel(PlanError):
    pass


class InvalidCode(PlanError):
    pass


class UnknownCode(KeyError):
    pass


def parent_code(code: str) -> Optional[str]:
    """``AA1 -> AA -> A -> None``."""
    if len(code) == 1:
        return None
    if len(code) == 2:
        return code[0]
    return code[:2]


def _sibling_key(code: str) -> tuple:
    # AA2 before AA10
    m = re.match(r"^([A-Z]+)(\d*)$", code)
    return (m[1], int(m[2]) if m[2] else -1)


@dataclass(frozen=True)
class PlanNode:
    code: str
    label: str
    children: tuple["PlanNode", ...] = ()

    def walk(self) -> Iterator["PlanNode"]:
        yield self
        for child in self.children:
            yield from child.walk()


@dataclass(frozen=True)
class ClassificationPlan:
    roots: tuple[PlanNode, ...] = field(
        default_factory=lambda: tuple(PlanNode(c, l) for c, l in DEFAULT_ROOTS.items())
    )

    def nodes(self) -> Iterator[PlanNode]:
        for root in self.roots:
            yield from root.walk()

    def __contains__(self, code: str) -> bool:
        return any(n.code == code for n in self.nodes())


def build_plan(entries: list[tuple[str, str]]) -> ClassificationPlan:
    """Build a plan from ``(code, label)`` pairs in any order."""
    labels: dict[str, str] = {}
    for code, label in entries:
        if not CATEGORY_RE.match(code):
            raise InvalidCode(f"not a category code: {code!r}")
        if code in labels:
            raise DuplicateCode(code)
        if not label or not label.strip():
            raise BadLabel(f"empty label for {code}")
        labels[code] = label
    for code in labels:
        parent = parent_code(code)
        if parent is not None and parent not in labels and parent not in DEFAULT_ROOTS:
            raise OrphanCode(f"{code} has no parent {parent}")
    for code, label in DEFAULT_ROOTS.items():
        labels.setdefault(code, label)

    children: dict[Optional[str], list[str]] = {}
    for code in labels:
        children.setdefault(parent_code(code), []).append(code)

    def make(code: str) -> PlanNode:
        kids = sorted(children.get(code, []), key=_sibling_key)
        return PlanNode(code, labels[code], tuple(make(k) for k in kids))

    return ClassificationPlan(tuple(make(c) for c in sorted(DEFAULT_ROOTS)))


def load_plan(doc: str) -> ClassificationPlan:
    """Load a ``code,label`` CSV; omitted roots get their default labels."""
    rows = list(csv.reader(io.StringIO(doc)))
    rows = [r for r in rows if r]
    if not rows:
        return build_plan([])
    header = [h.strip() for h in rows[0]]
    if header != ["code", "label"]:
        raise PlanError(f"plan header must be code,label, got {rows[0]}")
    entries = []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != 2:
            raise PlanError(f"line {lineno}: expected 2 fields, got {len(row)}")
        entries.append((row[0].strip(), row[1]))
    return build_plan(entries)


def dump_plan(plan: ClassificationPlan) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["code", "label"])
    for node in plan.nodes():
        writer.writerow([node.code, node.label])
    return buf.getvalue()


def resolve(plan: ClassificationPlan, code: str) -> list[PlanNode]:
    """Root-to-node path, e.g. ``AA1 -> [A, AA, AA1]``."""

    def search(node: PlanNode, path: list[PlanNode]) -> Optional[list[PlanNode]]:
        path = path + [node]
        if node.code == code:
            return path
        if not code.startswith(node.code):
            return None
        for child in node.children:
            found = search(child, path)
            if found:
                return found
        return None

    for root in plan.roots:
        found = search(root, [])
        if found:
            return found
    raise UnknownCode(code)


def enumerate_leaves(plan: ClassificationPlan) -> list[str]:
    """Every code in the plan, depth-first with siblings in order."""
    return [n.code for n in plan.nodes()]
