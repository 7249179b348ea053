"""Correspondence networks, mediator metrics and exile itineraries."""

from __future__ import annotations

import xml.etree.ElementTree as ET
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Hashable, Iterable, Mapping, Optional, Union

from .model import Finding, Fonds, Person, PlaceRef
from .sig import ArchiveDate, parse_signature, sort_key
from .store import write_rows
from .xmlout import GEXF_NS, q, serialize, sub

EDGE_HEADERS = ["source", "target", "signature", "date", "place"]
ITINERARY_HEADERS = ["person_id", "date", "place", "country"]


class UnknownPerson(KeyError):
    pass


@dataclass(frozen=True)
class Node:
    person_id: str
    canonical_name: str
    role: str = "otro"
    birth_date: Optional[ArchiveDate] = None
    birth_place: Optional[PlaceRef] = None
    death_date: Optional[ArchiveDate] = None
    death_place: Optional[PlaceRef] = None
    professions: tuple[str, ...] = ()

    @classmethod
    def from_person(cls, p: Person) -> "Node":
        return cls(
            p.person_id, p.canonical_name, p.role, p.birth_date, p.birth_place,
            p.death_date, p.death_place, p.professions,
        )


@dataclass(frozen=True)
class Edge:
    source: str
    target: str
    signature: str
    date: Optional[ArchiveDate] = None
    place: Optional[PlaceRef] = None


@dataclass(frozen=True)
class CorrespondenceGraph:
    nodes: tuple[Node, ...] = ()
    edges: tuple[Edge, ...] = ()

    def undirected(self) -> dict[str, set[str]]:
        """Simple undirected projection: parallel edges and loops dropped."""
        adj: dict[str, set[str]] = {n.person_id: set() for n in self.nodes}
        for e in self.edges:
            if e.source != e.target:
                adj[e.source].add(e.target)
                adj[e.target].add(e.source)
        return adj


@dataclass(frozen=True)
class NodeMetrics:
    degree_in: int
    degree_out: int
    betweenness: float

    @property
    def brokerage(self) -> float:
        """Betweenness per letter: high values mark go-betweens."""
        degree = self.degree_in + self.degree_out
        return self.betweenness / degree if degree else 0.0


def build_graph(fonds: Fonds) -> tuple[CorrespondenceGraph, list[Finding]]:
    """One edge per letter whose sender and recipient both resolve."""
    persons = {p.person_id: p for p in fonds.persons}
    nodes: dict[str, Node] = {}
    edges = []
    findings = []
    for rec in fonds.sorted_records():
        if rec.nature != "correspondencia":
            continue
        ends = {}
        for role in ("sender", "recipient"):
            pid = getattr(rec, role)
            if pid is None:
                findings.append(Finding("warning", rec.key, role, f"letter without {role}; no edge"))
            elif pid not in persons:
                findings.append(Finding("warning", rec.key, role, f"unresolved {role} {pid!r}; no edge"))
            else:
                ends[role] = pid
                nodes.setdefault(pid, Node.from_person(persons[pid]))
        if len(ends) == 2:
            date = rec.date if rec.date is not None else rec.signature.date
            edges.append(Edge(ends["sender"], ends["recipient"], rec.key, date, rec.sending_place))
    graph = CorrespondenceGraph(
        tuple(sorted(nodes.values(), key=lambda n: n.person_id)),
        tuple(edges),
    )
    return graph, findings


def betweenness(
    adjacency: Mapping[Hashable, Iterable[Hashable]], exact: bool = False
) -> dict[Hashable, Union[float, Fraction]]:
    """Unnormalized betweenness of an unweighted undirected graph.

    Brandes' accumulation: one BFS per source, then dependencies are summed
    in reverse BFS order.  Sources are visited in sorted order so float
    summation is reproducible.  With ``exact=True`` the result is a
    ``Fraction`` per node.
    """
    zero = Fraction(0) if exact else 0.0
    nodes = sorted(adjacency)
    nbrs = {v: sorted(adjacency[v]) for v in nodes}
    score = {v: zero for v in nodes}
    for s in nodes:
        order = []
        preds: dict[Hashable, list] = {v: [] for v in nodes}
        sigma = dict.fromkeys(nodes, 0)
        dist = dict.fromkeys(nodes, -1)
        sigma[s], dist[s] = 1, 0
        queue = deque([s])
        while queue:
            v = queue.popleft()
            order.append(v)
            for w in nbrs[v]:
                if dist[w] < 0:
                    dist[w] = dist[v] + 1
                    queue.append(w)
                if dist[w] == dist[v] + 1:
                    sigma[w] += sigma[v]
                    preds[w].append(v)
        delta = {v: zero for v in nodes}
        for w in reversed(order):
            for v in preds[w]:
                if exact:
                    delta[v] += Fraction(sigma[v], sigma[w]) * (1 + delta[w])
                else:
                    delta[v] += sigma[v] / sigma[w] * (1 + delta[w])
            if w != s:
                score[w] += delta[w]
    # each unordered pair was counted from both ends
    return {v: c / 2 for v, c in score.items()}


def mediator_metrics(g: CorrespondenceGraph) -> dict[str, NodeMetrics]:
    deg_in = {n.person_id: 0 for n in g.nodes}
    deg_out = dict(deg_in)
    for e in g.edges:
        deg_out[e.source] += 1
        deg_in[e.target] += 1
    bc = betweenness(g.undirected())
    return {pid: NodeMetrics(deg_in[pid], deg_out[pid], float(bc[pid])) for pid in sorted(deg_in)}


# -- export -----------------------------------------------------------------

_NODE_ATTRS = ("role", "professions", "birth_date", "birth_place", "death_date", "death_place")
_EDGE_ATTRS = ("date", "place", "signature")


def _node_values(n: Node) -> dict[str, str]:
    return {
        "role": n.role,
        "professions": ";".join(n.professions),
        "birth_date": str(n.birth_date) if n.birth_date else "",
        "birth_place": n.birth_place.name if n.birth_place else "",
        "death_date": str(n.death_date) if n.death_date else "",
        "death_place": n.death_place.name if n.death_place else "",
    }


def _edge_values(e: Edge) -> dict[str, str]:
    return {
        "date": str(e.date) if e.date else "",
        "place": e.place.name if e.place else "",
        "signature": e.signature,
    }


def _sorted_edges(g: CorrespondenceGraph) -> list[Edge]:
    return sorted(g.edges, key=lambda e: sort_key(parse_signature(e.signature)))


def to_gexf(g: CorrespondenceGraph) -> str:
    def t(tag: str) -> str:
        return q(GEXF_NS, tag)

    root = ET.Element(t("gexf"), version="1.2")
    graph = sub(root, t("graph"), defaultedgetype="directed", mode="static")
    for cls, names in (("node", _NODE_ATTRS), ("edge", _EDGE_ATTRS)):
        attrs = sub(graph, t("attributes"), class_=cls)
        for name in names:
            sub(attrs, t("attribute"), id=name, title=name, type="string")
    nodes = sub(graph, t("nodes"))
    for n in sorted(g.nodes, key=lambda n: n.person_id):
        node = sub(nodes, t("node"), id=n.person_id, label=n.canonical_name)
        values = sub(node, t("attvalues"))
        for name, value in _node_values(n).items():
            if value:
                sub(values, t("attvalue"), for_=name, value=value)
    edges = sub(graph, t("edges"))
    for e in _sorted_edges(g):
        edge = sub(edges, t("edge"), id=e.signature, source=e.source, target=e.target)
        values = sub(edge, t("attvalues"))
        for name, value in _edge_values(e).items():
            if value:
                sub(values, t("attvalue"), for_=name, value=value)
    return serialize(root, default_namespace=GEXF_NS)


def to_edges_csv(g: CorrespondenceGraph) -> str:
    rows = [
        {"source": e.source, "target": e.target, **_edge_values(e)}
        for e in _sorted_edges(g)
    ]
    return write_rows(EDGE_HEADERS, rows)


def export_graph(g: CorrespondenceGraph, format: str = "gexf") -> str:
    if format == "gexf":
        return to_gexf(g)
    if format == "edges_csv":
        return to_edges_csv(g)
    raise ValueError(f"unknown graph format {format!r}")


# -- itineraries ------------------------------------------------------------

@dataclass(frozen=True)
class Itinerary:
    person_id: str
    stops: tuple[tuple[ArchiveDate, PlaceRef], ...] = ()

    def to_csv(self) -> str:
        rows = [
            {"person_id": self.person_id, "date": str(d), "place": p.name, "country": p.country or ""}
            for d, p in self.stops
        ]
        return write_rows(ITINERARY_HEADERS, rows)


def itinerary(fonds: Fonds, person: str) -> Itinerary:
    """Where ``person`` wrote from, in date order, consecutive repeats collapsed."""
    if fonds.person(person) is None:
        raise UnknownPerson(person)
    dated = []
    for rec in fonds.records:
        if rec.nature != "correspondencia" or rec.sender != person or rec.sending_place is None:
            continue
        date = rec.date if rec.date is not None else rec.signature.date
        if date is None:
            continue
        dated.append((date, sort_key(rec.signature), rec.sending_place))
    dated.sort(key=lambda x: (x[0], x[1]))
    stops: list[tuple[ArchiveDate, PlaceRef]] = []
    for date, _, place in dated:
        if stops and stops[-1][1] == place:
            continue
        stops.append((date, place))
    return Itinerary(person, tuple(stops))
