"""Demand gossip: relay flooding with duplicate suppression, supplier replies,
and the consumer's force-ordered supplier queue.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Iterable, Mapping

from .errors import ExhaustedError, ProtocolError
from .gravity import ForceEvaluation
from .model import Center, CommodityLike, classify_role, commodity_id


@dataclass(frozen=True)
class NetworkGraph:
    """Undirected graph; ``adjacency`` maps each node to its sorted neighbours."""

    adjacency: Mapping[str, tuple[str, ...]]

    def __post_init__(self):
        for node, nbrs in self.adjacency.items():
            for nb in nbrs:
                if nb == node:
                    raise ValueError(f"self-loop at {node}")
                if nb not in self.adjacency:
                    raise ValueError(f"edge {node}-{nb} references unknown node {nb}")
                if node not in self.adjacency[nb]:
                    raise ValueError(f"asymmetric adjacency: {node}->{nb} without {nb}->{node}")

    @classmethod
    def from_edges(cls, nodes: Iterable[str], edges: Iterable[tuple[str, str]]) -> "NetworkGraph":
        adj: dict[str, set[str]] = {n: set() for n in nodes}
        for a, b in edges:
            if a == b:
                raise ValueError(f"self-loop at {a}")
            for n in (a, b):
                if n not in adj:
                    raise ValueError(f"edge {a}-{b} references unknown node {n}")
            adj[a].add(b)
            adj[b].add(a)
        return cls({n: tuple(sorted(v)) for n, v in sorted(adj.items())})

    @classmethod
    def geometric(cls, positions: Mapping[str, tuple[float, float]], radius: float) -> "NetworkGraph":
        """Connect every pair of nodes at most ``radius`` apart."""
        ids = sorted(positions)
        edges = []
        for i, a in enumerate(ids):
            for b in ids[i + 1:]:
                if math.dist(positions[a], positions[b]) <= radius:
                    edges.append((a, b))
        return cls.from_edges(ids, edges)

    @property
    def nodes(self) -> tuple[str, ...]:
        return tuple(self.adjacency)

    def neighbors(self, node: str) -> tuple[str, ...]:
        return self.adjacency[node]

    def edges(self) -> list[tuple[str, str]]:
        return [(a, b) for a, nbrs in self.adjacency.items() for b in nbrs if a < b]

    @property
    def edge_count(self) -> int:
        return sum(len(v) for v in self.adjacency.values()) // 2

    def __contains__(self, node) -> bool:
        return node in self.adjacency


@dataclass(frozen=True)
class DemandAnnouncement:
    msg_id: int
    consumer_id: str
    commodity: str
    quantity_needed: int
    urgency: float


@dataclass(frozen=True)
class SupplyResponse:
    supplier_id: str
    in_reply_to: int
    commodity: str
    quantity_available: int


@dataclass(frozen=True)
class Transmission:
    """One edge traversal of a flood; ``hop`` counts rounds from the origin."""

    hop: int
    sender: str
    receiver: str
    duplicate: bool


@dataclass(frozen=True)
class FloodResult:
    delivered: frozenset
    transmissions: int
    log: tuple[Transmission, ...]


def announce_demand(
    consumer: Center, commodity: CommodityLike, fresh_id: int, urgency: float
) -> DemandAnnouncement:
    role = classify_role(consumer, commodity)
    if not role.is_consumer:
        raise ProtocolError(f"{consumer.id} has no deficit of {commodity_id(commodity)}")
    return DemandAnnouncement(fresh_id, consumer.id, commodity_id(commodity), role.quantity, urgency)


def flood(graph: NetworkGraph, origin: str, msg: DemandAnnouncement | None = None) -> FloodResult:
    """Relay ``msg`` from ``origin`` through immediate neighbours.

    Each node forwards once, on first receipt, to every neighbour except the
    one it first heard from; later copies are dropped. Rounds are processed
    in ascending node id so the transmission log is deterministic.
    """
    if origin not in graph:
        raise ProtocolError(f"origin {origin!r} is not in the graph")
    seen = {origin}
    frontier: list[tuple[str, str | None]] = [(origin, None)]
    log: list[Transmission] = []
    hop = 0
    while frontier:
        hop += 1
        reached: list[tuple[str, str]] = []
        for node, sender in frontier:
            for nb in graph.neighbors(node):
                if nb == sender:
                    continue
                dup = nb in seen
                log.append(Transmission(hop, node, nb, dup))
                if not dup:
                    seen.add(nb)
                    reached.append((nb, node))
        frontier = sorted(reached)
    seen.discard(origin)
    return FloodResult(frozenset(seen), len(log), tuple(log))


def respond_supply(supplier: Center, ann: DemandAnnouncement) -> SupplyResponse | None:
    if supplier.id == ann.consumer_id:
        return None
    role = classify_role(supplier, ann.commodity)
    if not role.is_supplier:
        return None
    return SupplyResponse(supplier.id, ann.msg_id, ann.commodity, role.quantity)


def _queue_key(ev: ForceEvaluation):
    return (-ev.force, ev.supplier_id)


@dataclass(frozen=True)
class ConsumerView:
    consumer_id: str
    commodity: str
    queue: tuple[ForceEvaluation, ...] = ()

    @property
    def global_best(self) -> ForceEvaluation | None:
        return self.queue[0] if self.queue else None

    def supplier_ids(self) -> tuple[str, ...]:
        return tuple(e.supplier_id for e in self.queue)

    def __len__(self):
        return len(self.queue)


def update_global_best(view: ConsumerView, ev: ForceEvaluation) -> ConsumerView:
    """Insert or refresh a supplier's evaluation, keeping the queue force-ordered."""
    if ev.consumer_id != view.consumer_id or ev.commodity != view.commodity:
        raise ProtocolError("evaluation belongs to a different consumer view")
    if not ev.force > 0:
        return view
    rest = [e for e in view.queue if e.supplier_id != ev.supplier_id]
    rest.append(ev)
    rest.sort(key=_queue_key)
    return replace(view, queue=tuple(rest))


def drop_supplier(view: ConsumerView, supplier_id: str) -> ConsumerView:
    return replace(view, queue=tuple(e for e in view.queue if e.supplier_id != supplier_id))


def next_supplier(view: ConsumerView) -> ConsumerView:
    """Give up on the current best and fall back to the next queued supplier."""
    if not view.queue:
        raise ExhaustedError(f"{view.consumer_id} has no suppliers left for {view.commodity}")
    return replace(view, queue=view.queue[1:])
