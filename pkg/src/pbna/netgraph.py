"""Directed acyclic networks carrying three unicast sessions.

A :class:`Network` is the user graph; :func:`extend` adds the virtual
sender edges ``sigma_i = (s'_i, s_i)`` and receiver edges
``tau_i = (d_i, d'_i)`` and fixes a deterministic topological edge order.
Unit-capacity max-flow is provided for the disjoint-path-pair test.
"""

from __future__ import annotations

import heapq
import json
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

SESSIONS = (1, 2, 3)
_GRAPH_KEYS = {"nodes", "edges", "sessions"}
_EDGE_KEYS = {"id", "from", "to"}
_SESSION_KEYS = {"source", "sink"}


class GraphError(ValueError):
    """Malformed or invalid network description."""


class ZeroTransferError(ValueError):
    """A required transfer function is identically zero (empty path set)."""


def sigma(j: int) -> str:
    return f"sigma{j}"


def tau(i: int) -> str:
    return f"tau{i}"


def virtual_sender(j: int) -> str:
    return f"s'{j}"


def virtual_receiver(i: int) -> str:
    return f"d'{i}"


_RESERVED_EDGES = {sigma(k) for k in SESSIONS} | {tau(k) for k in SESSIONS}
_SIGMAS = {sigma(k) for k in SESSIONS}
_RESERVED_NODES = {virtual_sender(k) for k in SESSIONS} | {virtual_receiver(k) for k in SESSIONS}


@dataclass(frozen=True)
class Edge:
    id: str
    tail: str
    head: str


@dataclass(frozen=True)
class Session:
    source: str
    sink: str


@dataclass(frozen=True)
class Network:
    nodes: tuple[str, ...]
    edges: tuple[Edge, ...]
    sessions: tuple[Session, Session, Session]

    def __post_init__(self) -> None:
        _validate(self)

    @classmethod
    def from_lists(
        cls,
        nodes: Iterable[str],
        edges: Iterable[tuple[str, str, str]],
        sessions: Iterable[tuple[str, str]],
    ) -> "Network":
        """Build from ``(id, tail, head)`` and ``(source, sink)`` tuples."""
        return cls(
            tuple(nodes),
            tuple(Edge(*e) for e in edges),
            tuple(Session(*s) for s in sessions),  # type: ignore[arg-type]
        )

    def to_dict(self) -> dict:
        return {
            "nodes": list(self.nodes),
            "edges": [{"id": e.id, "from": e.tail, "to": e.head} for e in self.edges],
            "sessions": [{"source": s.source, "sink": s.sink} for s in self.sessions],
        }


def _find_back_edge(nodes: Sequence[str], edges: Sequence[Edge]) -> Edge | None:
    out: dict[str, list[Edge]] = {v: [] for v in nodes}
    for e in edges:
        out[e.tail].append(e)
    color = {v: 0 for v in nodes}
    for root in nodes:
        if color[root]:
            continue
        color[root] = 1
        stack = [(root, iter(out[root]))]
        while stack:
            v, it = stack[-1]
            e = next(it, None)
            if e is None:
                color[v] = 2
                stack.pop()
            elif color[e.head] == 1:
                return e
            elif color[e.head] == 0:
                color[e.head] = 1
                stack.append((e.head, iter(out[e.head])))
    return None


def _validate(net: Network) -> None:
    if len(set(net.nodes)) != len(net.nodes):
        raise GraphError("duplicate node ids")
    bad = _RESERVED_NODES.intersection(net.nodes)
    if bad:
        raise GraphError(f"node ids {sorted(bad)} are reserved for virtual nodes")
    nodes = set(net.nodes)
    seen: set[str] = set()
    for k, e in enumerate(net.edges):
        if e.id in seen:
            raise GraphError(f"edges[{k}]: duplicate edge id {e.id!r}")
        if e.id in _RESERVED_EDGES:
            raise GraphError(f"edges[{k}]: edge id {e.id!r} is reserved for virtual edges")
        seen.add(e.id)
        for end in (e.tail, e.head):
            if end not in nodes:
                raise GraphError(f"edges[{k}] ({e.id!r}): undeclared node {end!r}")
    if len(net.sessions) != 3:
        raise GraphError(f"exactly 3 sessions are required, got {len(net.sessions)}")
    for k, s in enumerate(net.sessions):
        for end in (s.source, s.sink):
            if end not in nodes:
                raise GraphError(f"sessions[{k}]: undeclared node {end!r}")
        if s.source == s.sink:
            raise GraphError(f"sessions[{k}]: source and sink coincide ({s.source!r})")
    back = _find_back_edge(net.nodes, net.edges)
    if back is not None:
        raise GraphError(f"graph has a cycle through edge {back.id!r} ({back.tail} -> {back.head})")


def _check_keys(obj: object, allowed: set[str], where: str) -> dict:
    if not isinstance(obj, dict):
        raise GraphError(f"{where}: expected an object")
    extra = set(obj) - allowed
    if extra:
        raise GraphError(f"{where}: unknown keys {sorted(extra)}")
    missing = allowed - set(obj)
    if missing:
        raise GraphError(f"{where}: missing keys {sorted(missing)}")
    for k in allowed:
        if k in ("nodes", "edges", "sessions"):
            continue
        if not isinstance(obj[k], str):
            raise GraphError(f"{where}.{k}: expected a string")
    return obj


def network_from_dict(doc: object) -> Network:
    doc = _check_keys(doc, _GRAPH_KEYS, "graph")
    for key in ("nodes", "edges", "sessions"):
        if not isinstance(doc[key], list):
            raise GraphError(f"graph.{key}: expected a list")
    if not all(isinstance(v, str) for v in doc["nodes"]):
        raise GraphError("graph.nodes: node ids must be strings")
    edges = [
        _check_keys(e, _EDGE_KEYS, f"edges[{k}]") for k, e in enumerate(doc["edges"])
    ]
    sessions = [
        _check_keys(s, _SESSION_KEYS, f"sessions[{k}]") for k, s in enumerate(doc["sessions"])
    ]
    return Network(
        tuple(doc["nodes"]),
        tuple(Edge(e["id"], e["from"], e["to"]) for e in edges),
        tuple(Session(s["source"], s["sink"]) for s in sessions),  # type: ignore[arg-type]
    )


def parse_network(text: bytes | str) -> Network:
    """Parse and validate the JSON graph format."""
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise GraphError(f"graph file is not UTF-8: byte {exc.start}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphError(f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    return network_from_dict(doc)


@dataclass(frozen=True)
class ExtendedNetwork:
    """The input graph plus virtual sender/receiver edges, in topological edge order."""

    base: Network
    edges: dict[str, Edge]
    edge_order: tuple[str, ...]
    position: dict[str, int] = field(repr=False)

    @cached_property
    def in_edges(self) -> dict[str, tuple[str, ...]]:
        d: dict[str, list[str]] = {}
        for eid in self.edge_order:
            d.setdefault(self.edges[eid].head, []).append(eid)
        return {k: tuple(v) for k, v in d.items()}

    @cached_property
    def out_edges(self) -> dict[str, tuple[str, ...]]:
        d: dict[str, list[str]] = {}
        for eid in self.edge_order:
            d.setdefault(self.edges[eid].tail, []).append(eid)
        return {k: tuple(v) for k, v in d.items()}

    @cached_property
    def pairs(self) -> tuple[tuple[str, str], ...]:
        """Adjacent edge pairs ``(e_up, e_down)`` carrying a coding coefficient."""
        out = []
        for eid in self.edge_order:
            for up in self.in_edges.get(self.edges[eid].tail, ()):
                out.append((up, eid))
        return tuple(out)

    @cached_property
    def pair_index(self) -> dict[tuple[str, str], int]:
        return {p: k for k, p in enumerate(self.pairs)}

    @cached_property
    def upstream_pairs(self) -> dict[str, tuple[tuple[str, int], ...]]:
        """For each edge, ``(upstream edge, pair index)`` of its incoming pairs."""
        d: dict[str, list[tuple[str, int]]] = {e: [] for e in self.edge_order}
        for k, (up, down) in enumerate(self.pairs):
            d[down].append((up, k))
        return {e: tuple(v) for e, v in d.items()}

    def reaches(self, j: int, i: int) -> bool:
        """Whether some path runs from ``sigma_j`` to ``tau_i``."""
        return tau(i) in self._reachable_edges(sigma(j))

    def _reachable_edges(self, start: str) -> set[str]:
        seen = {start}
        queue = deque([start])
        while queue:
            e = queue.popleft()
            for nxt in self.out_edges.get(self.edges[e].head, ()):
                if nxt not in seen:
                    seen.add(nxt)
                    queue.append(nxt)
        return seen

    @cached_property
    def reachability(self) -> dict[tuple[int, int], bool]:
        """``(i, j) -> True`` when the path set from source j to sink i is nonempty."""
        seen = {j: self._reachable_edges(sigma(j)) for j in SESSIONS}
        return {(i, j): tau(i) in seen[j] for i in SESSIONS for j in SESSIONS}

    @cached_property
    def max_distance(self) -> int:
        """Longest sigma -> tau path, counted in edges (0 if no sigma reaches a tau)."""
        longest: dict[str, int] = {}
        for eid in self.edge_order:
            if eid in _SIGMAS:
                longest[eid] = 1
                continue
            best = [longest[u] for u in self.in_edges.get(self.edges[eid].tail, ()) if u in longest]
            if best:
                longest[eid] = max(best) + 1
        return max((longest.get(tau(i), 0) for i in SESSIONS), default=0)

    @cached_property
    def max_in_degree(self) -> int:
        return max((len(v) for v in self.in_edges.values()), default=0)


def _topological_nodes(nodes: Iterable[str], edges: Iterable[Edge]) -> list[str]:
    nodes = list(nodes)
    indeg = {v: 0 for v in nodes}
    out: dict[str, list[str]] = {v: [] for v in nodes}
    for e in edges:
        indeg[e.head] += 1
        out[e.tail].append(e.head)
    heap = [v for v in nodes if indeg[v] == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        v = heapq.heappop(heap)
        order.append(v)
        for w in out[v]:
            indeg[w] -= 1
            if indeg[w] == 0:
                heapq.heappush(heap, w)
    return order


def extend(net: Network) -> ExtendedNetwork:
    """Add the six virtual edges and compute the topological edge order."""
    edges = {e.id: e for e in net.edges}
    nodes = list(net.nodes)
    for k, s in zip(SESSIONS, net.sessions):
        edges[sigma(k)] = Edge(sigma(k), virtual_sender(k), s.source)
        edges[tau(k)] = Edge(tau(k), s.sink, virtual_receiver(k))
        nodes += [virtual_sender(k), virtual_receiver(k)]
    rank = {v: r for r, v in enumerate(_topological_nodes(nodes, edges.values()))}
    order = tuple(sorted(edges, key=lambda eid: (rank[edges[eid].tail], eid)))
    return ExtendedNetwork(net, edges, order, {e: k for k, e in enumerate(order)})


# ---------------------------------------------------------------------------
# unit-capacity max-flow


_SRC = "\x00source"
_SNK = "\x00sink"


def _unit_max_flow(
    arcs: Sequence[tuple[str, str, str]], source: str, sink: str, cap: int | None
) -> tuple[int, set[str]]:
    """Edmonds-Karp on unit-capacity arcs ``(id, tail, head)``; returns value and saturated arcs."""
    out: dict[str, list[tuple[str, str, str]]] = {}
    for aid, t, h in arcs:
        out.setdefault(t, []).append((aid, t, h))
        out.setdefault(h, []).append((aid, h, t))  # residual direction
    tail_of = {aid: t for aid, t, _ in arcs}
    flow: set[str] = set()
    value = 0
    while cap is None or value < cap:
        prev: dict[str, tuple[str, str]] = {source: ("", "")}
        queue = deque([source])
        while queue and sink not in prev:
            v = queue.popleft()
            for aid, a, b in out.get(v, ()):
                forward = tail_of[aid] == a
                usable = (aid not in flow) if forward else (aid in flow)
                if usable and b not in prev:
                    prev[b] = (aid, v)
                    queue.append(b)
        if sink not in prev:
            break
        v = sink
        while v != source:
            aid, u = prev[v]
            flow ^= {aid}
            v = u
        value += 1
    return value, flow


def _decompose(arcs: Sequence[tuple[str, str, str]], flow: set[str], source: str, sink: str) -> list[list[str]]:
    out: dict[str, list[tuple[str, str]]] = {}
    for aid, t, h in arcs:
        if aid in flow:
            out.setdefault(t, []).append((aid, h))
    paths = []
    while out.get(source):
        path, v = [], source
        while v != sink:
            aid, h = out[v].pop()
            path.append(aid)
            v = h
        paths.append(path)
    return paths


def _flow_arcs(xnet: ExtendedNetwork, sources: Iterable[str], sinks: Iterable[str]) -> list[tuple[str, str, str]]:
    sources, sinks = set(sources), set(sinks)
    arcs = []
    for eid in xnet.edge_order:
        e = xnet.edges[eid]
        t = _SRC if eid in sources else e.tail
        h = _SNK if eid in sinks else e.head
        arcs.append((eid, t, h))
    return arcs


def _check_virtual(ids: Iterable[str], prefix: str) -> None:
    for eid in ids:
        if not (eid in _RESERVED_EDGES and eid.startswith(prefix)):
            raise ValueError(f"{eid!r} is not a virtual {prefix} edge")


def max_flow_value(
    xnet: ExtendedNetwork, sources: Iterable[str], sinks: Iterable[str], cap: int | None = 2
) -> int:
    """Unit-capacity max flow from the given sigma edges to the given tau edges."""
    sources, sinks = list(sources), list(sinks)
    if not sources or not sinks:
        raise ValueError("sources and sinks must be nonempty")
    _check_virtual(sources, "sigma")
    _check_virtual(sinks, "tau")
    value, _ = _unit_max_flow(_flow_arcs(xnet, sources, sinks), _SRC, _SNK, cap)
    return value


@dataclass(frozen=True)
class DisjointPair:
    """Two edge-disjoint sigma->tau paths, each listed as edge ids."""

    paths: tuple[tuple[str, ...], tuple[str, ...]]
    # ((sink i, source j), ...) realised by each path
    pairing: tuple[tuple[int, int], tuple[int, int]]

    def to_dict(self) -> dict:
        return {
            "paths": [list(p) for p in self.paths],
            "pairing": [{"sink": i, "source": j} for i, j in self.pairing],
        }


def _require_paths(xnet: ExtendedNetwork, a: int, b: int, p: int, q: int) -> None:
    if a == p or b == q:
        raise ValueError(f"invalid quadruple ({a},{b},{p},{q}): need a != p and b != q")
    for i, j in ((a, b), (p, q), (a, q), (p, b)):
        if not xnet.reachability[(i, j)]:
            raise ZeroTransferError(f"m_{i}{j} is identically zero: no path from s'{j} to d'{i}")


def disjoint_pair(xnet: ExtendedNetwork, a: int, b: int, p: int, q: int) -> DisjointPair | None:
    """Edge-disjoint pair in P_ab x P_pq or P_aq x P_pb, or ``None`` if none exists."""
    _require_paths(xnet, a, b, p, q)
    arcs = _flow_arcs(xnet, [sigma(b), sigma(q)], [tau(a), tau(p)])
    value, flow = _unit_max_flow(arcs, _SRC, _SNK, 2)
    if value < 2:
        return None
    p1, p2 = sorted(tuple(path) for path in _decompose(arcs, flow, _SRC, _SNK))
    pairing = tuple((int(path[-1][3:]), int(path[0][5:])) for path in (p1, p2))
    return DisjointPair((p1, p2), pairing)  # type: ignore[arg-type]


def disjoint_pair_exists(xnet: ExtendedNetwork, a: int, b: int, p: int, q: int) -> bool:
    return disjoint_pair(xnet, a, b, p, q) is not None


def session_min_cut(xnet: ExtendedNetwork, i: int) -> int:
    """Edge min-cut between ``s_i`` and ``d_i`` in the base graph."""
    s = xnet.base.sessions[i - 1]
    arcs = [(e.id, e.tail, e.head) for e in xnet.base.edges]
    value, _ = _unit_max_flow(arcs, s.source, s.sink, None)
    return value


def validate_disjoint_pair(xnet: ExtendedNetwork, cert: DisjointPair) -> bool:
    """Independent check that a certificate describes two edge-disjoint valid paths."""
    p1, p2 = cert.paths
    if set(p1) & set(p2):
        return False
    for path, (i, j) in zip(cert.paths, cert.pairing):
        if path[0] != sigma(j) or path[-1] != tau(i):
            return False
        for up, down in zip(path, path[1:]):
            if xnet.edges[up].head != xnet.edges[down].tail:
                return False
    return True
