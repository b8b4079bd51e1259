# gkm.py
# GKM moment graphs: flag-variety builders, K-theoretic euler classes and the
# edge-divisibility membership test for fixed-point restriction images.

from __future__ import annotations
from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import networkx as nx

from affine_weyl import FiniteWeylElement, enumerate_finite_weyl, weyl_group
from char_ring import (
    CharacterSeries, add, divide_exact, make_series, monomial, monomial_series, mul, one, scale,
    series_from_json, series_to_json,
)
from config import MAX_FLAG_RANK
from errors import CapacityError, DomainError
from lattice_core import RootDatum, is_positive_root, positive_roots

Weight = Tuple[int, ...]


@dataclass(frozen=True)
class GkmEdge:
    src: str
    dst: str
    weights: Tuple[Weight, ...]

    def to_json(self) -> dict:
        return {"src": self.src, "dst": self.dst, "weights": [list(w) for w in self.weights]}


@dataclass
class GkmGraph:
    vertices: List[str]
    edges: List[GkmEdge]
    order: Dict[str, int]                                  # stratification level of each vertex
    elements: Dict[str, FiniteWeylElement] = field(default_factory=dict)   # flag graphs only

    def to_networkx(self) -> nx.MultiGraph:
        G = nx.MultiGraph()
        for v in self.vertices:
            G.add_node(v, order=self.order.get(v, 0))
        for idx, e in enumerate(self.edges):
            G.add_edge(e.src, e.dst, key=idx, weights=e.weights)
        return G

    def to_json(self) -> dict:
        return {
            "vertices": list(self.vertices),
            "edges": [e.to_json() for e in self.edges],
            "order": [self.order.get(v, 0) for v in self.vertices],
        }


def _require(obj, key: str, where: str):
    if not isinstance(obj, Mapping) or key not in obj:
        raise DomainError(f"{where} is missing the {key!r} field", {"field": key})
    return obj[key]


def graph_from_json(obj: Mapping) -> GkmGraph:
    vertices = [str(v) for v in _require(obj, "vertices", "graph")]
    raw_edges = obj.get("edges", [])
    if raw_edges and "order" not in obj:
        # levels orient every edge
        raise DomainError("graph with edges is missing the 'order' field", {"field": "order"})
    order_raw = obj.get("order") or [0] * len(vertices)
    if len(order_raw) != len(vertices):
        raise DomainError("order must list one level per vertex", {"vertices": len(vertices), "order": len(order_raw)})
    edges = []
    for e in raw_edges:
        src, dst = str(_require(e, "src", "edge")), str(_require(e, "dst", "edge"))
        weights = _require(e, "weights", "edge")
        if src not in vertices or dst not in vertices:
            raise DomainError("edge endpoint is not a vertex", {"edge": e})
        try:
            edges.append(GkmEdge(src, dst, tuple(tuple(int(x) for x in w) for w in weights)))
        except (TypeError, ValueError) as exc:
            raise DomainError("edge weights must be integer vectors", {"edge": e, "reason": str(exc)})
    try:
        order = dict(zip(vertices, (int(x) for x in order_raw)))
    except (TypeError, ValueError) as exc:
        raise DomainError("order entries must be integers", {"reason": str(exc)})
    return GkmGraph(vertices, edges, order)


def class_from_json(obj: Mapping) -> Dict[str, CharacterSeries]:
    if not isinstance(obj, Mapping):
        raise DomainError("class must map vertices to series")
    out = {}
    for v, s in obj.items():
        try:
            out[str(v)] = series_from_json(s)
        except (AttributeError, KeyError, TypeError, ValueError) as exc:
            raise DomainError("cannot read the series at a vertex", {"vertex": str(v), "reason": repr(exc)})
    return out


def class_to_json(c: Mapping[str, CharacterSeries]) -> dict:
    return {v: series_to_json(s) for v, s in sorted(c.items())}


# ------------------------------
# Flag varieties
# ------------------------------

def build_flag_gkm(d: RootDatum) -> GkmGraph:
    """Moment graph of G/T: vertices W, edges {w, w s_beta} labelled by the positive root +-w(beta)."""
    if d.rank > MAX_FLAG_RANK:
        raise CapacityError(f"flag graphs are built up to rank {MAX_FLAG_RANK}", {"type": d.name})
    wg = weyl_group(d)
    elements = enumerate_finite_weyl(d)
    labels = {w: w.label for w in elements}
    edges: List[GkmEdge] = []
    seen = set()
    for w in elements:
        for beta in positive_roots(d):
            other = wg.multiply(w, wg.reflection(beta))
            pair = frozenset((w, other))
            if pair in seen:
                continue
            seen.add(pair)
            chi = tuple(int(x) for x in w.act_weight(beta))
            if not is_positive_root(d, chi):
                chi = tuple(-x for x in chi)
            src, dst = (w, other) if w.length < other.length else (other, w)
            edges.append(GkmEdge(labels[src], labels[dst], (chi,)))
    return GkmGraph(
        vertices=[labels[w] for w in elements],
        edges=edges,
        order={labels[w]: w.length for w in elements},
        elements={labels[w]: w for w in elements},
    )


def restrict_line_bundle(d: RootDatum, g: GkmGraph, lam: Sequence[int]) -> Dict[str, CharacterSeries]:
    if not g.elements:
        raise DomainError("line-bundle restriction needs a flag graph")
    return {v: monomial_series(0, 0, g.elements[v].act_weight(tuple(lam))) for v in g.vertices}


# ------------------------------
# Euler classes and membership
# ------------------------------

def euler_class(weights: Sequence[Sequence[int]], rank: Optional[int] = None) -> CharacterSeries:
    """prod (1 - e^{-chi}) over the multiset, factors in sorted order; the empty product is 1."""
    if rank is None:
        rank = len(weights[0]) if weights else 0
    out = one(rank)
    for chi in sorted(tuple(int(x) for x in w) for w in weights):
        if not any(chi):
            raise DomainError("euler class of a zero weight", {"weight": list(chi)})
        factor = make_series({monomial(0, 0, (0,) * rank): 1, monomial(0, 0, tuple(-x for x in chi)): -1})
        out = mul(out, factor)
    return out


@dataclass
class MembershipVerdict:
    passed: bool
    certificates: List[dict] = field(default_factory=list)
    failing_edge: Optional[int] = None
    failing_weight: Optional[Weight] = None

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "certificates": self.certificates,
            "failing_edge": self.failing_edge,
            "failing_weight": None if self.failing_weight is None else list(self.failing_weight),
        }


def check_membership(g: GkmGraph, c: Mapping[str, CharacterSeries]) -> MembershipVerdict:
    """Each edge difference c(src) - c(dst) must be divisible by the edge's euler class."""
    missing = [v for v in g.vertices if v not in c]
    if missing:
        raise DomainError("class does not cover every vertex", {"missing": missing})
    verdict = MembershipVerdict(True)
    for idx, e in enumerate(g.edges):
        diff = add(c[e.src], scale(c[e.dst], -1))
        for chi in sorted(e.weights):
            # f / (1 - e^{-chi}) = -(f / (e^{-chi} - 1))
            q = divide_exact(diff, tuple(-x for x in chi))
            if q is None:
                verdict.passed = False
                verdict.failing_edge = idx
                verdict.failing_weight = tuple(chi)
                verdict.certificates.append({"edge": idx, "src": e.src, "dst": e.dst, "divisible": False})
                return verdict
            diff = scale(q, -1)
        verdict.certificates.append({"edge": idx, "src": e.src, "dst": e.dst, "divisible": True,
                                     "quotient": series_to_json(diff)})
    return verdict


def _proportional(a: Weight, b: Weight) -> bool:
    return all(a[i] * b[j] - a[j] * b[i] == 0 for i, j in combinations(range(len(a)), 2))


def gkm_axiom_check(g: GkmGraph) -> dict:
    """Nonproportional edge weights at each vertex, and edges that respect the stratification."""
    G = g.to_networkx()
    violations = []
    for v in g.vertices:
        incident = []
        for _, _, key, data in G.edges(v, keys=True, data=True):
            for chi in data["weights"]:
                incident.append((key, chi))
        for (k1, w1), (k2, w2) in combinations(incident, 2):
            if k1 != k2 and _proportional(w1, w2):
                violations.append({"axiom": "nonproportional", "vertex": v, "edges": sorted([k1, k2])})
    for idx, e in enumerate(g.edges):
        if any(not any(chi) for chi in e.weights):
            violations.append({"axiom": "nonzero_weight", "edge": idx})
        if g.order.get(e.src, 0) >= g.order.get(e.dst, 0):
            violations.append({"axiom": "order", "edge": idx, "src": e.src, "dst": e.dst})
    return {"passed": not violations, "violations": violations,
            "vertices": len(g.vertices), "edges": len(g.edges)}
