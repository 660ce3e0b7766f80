"""Clustering by strongest attraction, supplier-side priority queues, greedy
allocation and transfer execution.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from typing import TYPE_CHECKING, Iterable

from .gravity import CostParams, ForceEvaluation, unit_cost
from .model import (
    Center,
    CommodityLike,
    Relation,
    apply_inventory_delta,
    classify_role,
    commodity_id,
    deficit,
    hierarchy_relation,
    surplus,
)

if TYPE_CHECKING:
    from .sim import World

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Cluster:
    supplier_id: str
    commodity: str
    members: tuple[str, ...]


@dataclass(frozen=True)
class TransferOrder:
    supplier_id: str
    consumer_id: str
    commodity: str
    quantity: int
    unit_cost: float = 0.0
    tick: int = 0
    tier: int | None = None

    @property
    def cost(self) -> float:
        return self.quantity * self.unit_cost


@dataclass(frozen=True)
class PriorityKey:
    tier: Relation
    urgency: float
    consumer_id: str

    def sort_key(self):
        return (int(self.tier), -self.urgency, self.consumer_id)


@dataclass(frozen=True)
class QueueEntry:
    key: PriorityKey
    deficit: int
    unit_cost: float = 0.0

    @property
    def consumer_id(self) -> str:
        return self.key.consumer_id


def build_clusters(evals: Iterable[ForceEvaluation]) -> list[Cluster]:
    """Attach every consumer to the supplier pulling on it hardest.

    Ties go to the lower supplier id. Members are listed by consumer id; the
    supplier's serving order comes from :func:`build_priority_queue`.
    """
    best: dict[tuple[str, str], ForceEvaluation] = {}
    for ev in evals:
        if not ev.force > 0:
            continue
        k = (ev.consumer_id, ev.commodity)
        cur = best.get(k)
        if cur is None or (-ev.force, ev.supplier_id) < (-cur.force, cur.supplier_id):
            best[k] = ev
    groups: dict[tuple[str, str], list[str]] = {}
    for (consumer, com), ev in best.items():
        groups.setdefault((ev.supplier_id, com), []).append(consumer)
    return [
        Cluster(sid, com, tuple(sorted(members)))
        for (sid, com), members in sorted(groups.items())
    ]


def build_priority_queue(
    supplier: Center,
    members: Iterable[tuple[Center, float]],
    commodity: CommodityLike,
    costs: CostParams | None = None,
) -> list[QueueEntry]:
    """Order ``(consumer, urgency)`` pairs: own state first, then own zone,
    then the rest; more urgent first inside a tier; consumer id last."""
    cid = commodity_id(commodity)
    entries = []
    for consumer, urgency in members:
        key = PriorityKey(hierarchy_relation(supplier, consumer), urgency, consumer.id)
        r = unit_cost(supplier, consumer, cid, costs) if costs is not None else 0.0
        entries.append(QueueEntry(key, deficit(consumer, cid), r))
    entries.sort(key=lambda e: e.key.sort_key())
    return entries


def allocate(
    supplier_surplus: int,
    queue: Iterable[QueueEntry],
    *,
    supplier_id: str = "",
    commodity: str = "",
    tick: int = 0,
) -> list[TransferOrder]:
    remaining = supplier_surplus
    orders = []
    for entry in queue:
        if remaining <= 0:
            break
        q = min(remaining, entry.deficit)
        if q <= 0:
            continue
        orders.append(
            TransferOrder(supplier_id, entry.consumer_id, commodity, q, entry.unit_cost, tick, int(entry.key.tier))
        )
        remaining -= q
    return orders


@dataclass(frozen=True)
class TransferOutcome:
    order: TransferOrder | None  # what actually moved; None if dropped
    requested: int
    clipped: int = 0  # returned to the supplier by the consumer's capacity

    @property
    def stale(self) -> bool:
        return self.order is None or self.order.quantity + self.clipped != self.requested


def execute_transfer(order: TransferOrder, world: "World") -> TransferOutcome:
    """Move stock from supplier to consumer inside ``world.centers``.

    The order is re-checked against the supplier's live surplus and shrunk
    or dropped if it no longer fits. Whatever the consumer cannot hold is
    handed back to the supplier, so total stock never changes.
    """
    centers = world.centers
    sup = centers[order.supplier_id]
    con = centers[order.consumer_id]
    c = order.commodity
    q = min(order.quantity, surplus(sup, c))
    if q <= 0:
        log.info("StaleOrder dropped: %s", order)
        return TransferOutcome(None, order.quantity)
    if q < order.quantity:
        log.info("StaleOrder shrunk %d -> %d: %s", order.quantity, q, order)
    new_con, absorbed = apply_inventory_delta(con, c, q)
    clipped = q - absorbed
    if clipped:
        log.info("capacity clip at %s: %d t returned to %s", con.id, clipped, sup.id)
    if absorbed <= 0:
        return TransferOutcome(None, order.quantity, clipped)
    centers[sup.id] = sup.with_stock(c, sup.stock_of(c) - absorbed)
    centers[con.id] = new_con
    return TransferOutcome(replace(order, quantity=absorbed), order.quantity, clipped)


def retire_agents(world: "World") -> list[tuple[str, str, str]]:
    """Drop consumers whose deficit and suppliers whose surplus is gone.

    Returns ``(center_id, commodity, role)`` for each retirement. Centers
    whose role flipped are removed here too and re-enter on the next sync.
    """
    retired = []
    for com in sorted(world.active_consumers):
        for cid in sorted(world.active_consumers[com]):
            if not classify_role(world.centers[cid], com).is_consumer:
                world.active_consumers[com].discard(cid)
                world.forget_consumer(cid, com)
                retired.append((cid, com, "consumer"))
    for com in sorted(world.active_suppliers):
        for sid in sorted(world.active_suppliers[com]):
            if not classify_role(world.centers[sid], com).is_supplier:
                world.active_suppliers[com].discard(sid)
                retired.append((sid, com, "supplier"))
    return retired
