"""Discrete-time engine.

Each tick runs, in order: arrivals, message delivery and supplier replies,
urgency growth, force re-evaluation of every consumer's supplier queue,
clustering with virtual-space moves, per-supplier allocation, transfer
execution, retirement, and metric collection.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from .errors import ConfigError, ExhaustedError
from .gravity import (
    UrgencyState,
    evaluate_pair,
    urgency_update,
    virtual_radius,
    virtual_step,
)
from .matching import (
    TransferOrder,
    allocate,
    build_clusters,
    build_priority_queue,
    execute_transfer,
    retire_agents,
)
from .model import Center, apply_inventory_delta, classify_role, deficit, surplus
from .protocol import (
    ConsumerView,
    DemandAnnouncement,
    NetworkGraph,
    SupplyResponse,
    announce_demand,
    drop_supplier,
    flood,
    next_supplier,
    respond_supply,
    update_global_best,
)
from .records import MetricsRow, TraceEvent
from .scenario import Scenario, build_graph, validate_scenario

Key = tuple[str, str]  # (center id, commodity)


class RngStream:
    """Seeded random stream (numpy PCG64).

    Poisson counts are drawn by CDF inversion from single uniforms, so the
    sequence depends only on the uniform stream.
    """

    algorithm = "pcg64"

    def __init__(self, seed: int):
        self.seed = int(seed)
        self._gen = np.random.Generator(np.random.PCG64(self.seed))

    def random(self) -> float:
        return float(self._gen.random())

    def uniform(self, lo: float, hi: float) -> float:
        return lo + (hi - lo) * self.random()

    def integer(self, lo: int, hi: int) -> int:
        """Uniform integer in ``[lo, hi]`` inclusive."""
        return int(self._gen.integers(lo, hi + 1))

    def poisson(self, lam: float) -> int:
        if lam < 0:
            raise ValueError("Poisson rate must be non-negative")
        if lam == 0:
            return 0
        u = self.random()
        p = math.exp(-lam)
        cdf = p
        k = 0
        # the tail guard stops an endless loop when cdf rounds short of u
        while u > cdf and p > 0:
            k += 1
            p *= lam / k
            cdf += p
        return k


def sample_arrivals(lambda_c: float, lambda_s: float, rng: RngStream) -> tuple[int, int]:
    return rng.poisson(lambda_c), rng.poisson(lambda_s)


@dataclass
class Pending:
    due: int
    seq: int
    msg: DemandAnnouncement
    sender: str
    receiver: str
    duplicate: bool


@dataclass
class World:
    clock: int
    centers: dict[str, Center]
    graph: NetworkGraph
    commodities: tuple[str, ...]
    active_consumers: dict[str, set[str]] = field(default_factory=dict)
    active_suppliers: dict[str, set[str]] = field(default_factory=dict)
    urgencies: dict[Key, UrgencyState] = field(default_factory=dict)
    views: dict[Key, ConsumerView] = field(default_factory=dict)
    known: dict[Key, dict[str, SupplyResponse]] = field(default_factory=dict)
    awaiting: dict[Key, int] = field(default_factory=dict)  # outstanding msg id
    in_flight: list[Pending] = field(default_factory=list)
    inflight_count: dict[int, int] = field(default_factory=dict)
    trace: list[TraceEvent] = field(default_factory=list)
    history: list[MetricsRow] = field(default_factory=list)
    total_transferred: int = 0
    total_cost: float = 0.0
    total_messages: int = 0
    floods: int = 0
    overflow: int = 0
    stale_orders: int = 0
    next_msg_id: int = 1
    _seq: int = 0
    last_clusters: list = field(default_factory=list)
    _checked: object = field(default=None, repr=False, compare=False)

    def forget_consumer(self, cid: str, com: str) -> None:
        key = (cid, com)
        self.urgencies.pop(key, None)
        self.views.pop(key, None)
        self.known.pop(key, None)
        self.awaiting.pop(key, None)

    def consumers(self):
        for com in self.commodities:
            for cid in sorted(self.active_consumers[com]):
                yield cid, com

    def unmet_deficit(self) -> int:
        return sum(deficit(c, com) for c in self.centers.values() for com in self.commodities)

    def total_stock(self, com: str) -> int:
        return sum(c.stock_of(com) for c in self.centers.values())

    def snapshot(self) -> MetricsRow:
        return MetricsRow(
            tick=self.clock,
            unmet_deficit=self.unmet_deficit(),
            active_consumers=sum(len(v) for v in self.active_consumers.values()),
            active_suppliers=sum(len(v) for v in self.active_suppliers.values()),
        )


@dataclass
class RunResult:
    history: list[MetricsRow]
    trace: list[TraceEvent]
    initial: MetricsRow
    world: World


def init_world(scenario: Scenario, rng: RngStream) -> World:
    world = World(
        clock=0,
        centers={c.id: c for c in scenario.centers},
        graph=build_graph(scenario),
        commodities=scenario.commodity_ids,
        active_consumers={c: set() for c in scenario.commodity_ids},
        active_suppliers={c: set() for c in scenario.commodity_ids},
    )
    _sync_roles(world, scenario, rng, tick=0)
    return world


def _sync_roles(world: World, config: Scenario, rng: RngStream, tick: int) -> None:
    """Bring active sets in line with live roles; new consumers draw ``g0``."""
    for cid, com, _role in retire_agents(world):
        world.trace.append(TraceEvent(tick, "retire", cid, None, com, 0, None))
    u = config.urgency
    for com in world.commodities:
        for cid in sorted(world.centers):
            role = classify_role(world.centers[cid], com)
            if role.is_consumer and cid not in world.active_consumers[com]:
                world.active_consumers[com].add(cid)
                world.urgencies[(cid, com)] = UrgencyState.fresh(rng.uniform(u.g0_min, u.g0_max))
            elif role.is_supplier:
                world.active_suppliers[com].add(cid)


def _check_config(world: World, config: Scenario) -> None:
    if world._checked is config:
        return
    problems = [msg for _, msg in validate_scenario(config)]
    if problems:
        raise ConfigError("; ".join(problems))
    world._checked = config


def _arrivals(world: World, config: Scenario, rng: RngStream, tick: int) -> None:
    a = config.arrivals
    ids = sorted(world.centers)
    for com in world.commodities:
        n_c, n_s = sample_arrivals(a.lambda_c.get(com, 0.0), a.lambda_s.get(com, 0.0), rng)
        for n, sign in ((n_c, -1), (n_s, 1)):
            for _ in range(n):
                cid = ids[rng.integer(0, len(ids) - 1)]
                mag = rng.integer(a.delta_min, a.delta_max)
                c = world.centers[cid]
                target = c.reserve_of(com) + sign * mag
                new, absorbed = apply_inventory_delta(c, com, target - c.stock_of(com))
                world.centers[cid] = new
                world.trace.append(TraceEvent(tick, "arrival", cid, None, com, absorbed, None))


def _announce(world: World, config: Scenario, tick: int) -> None:
    delay = 0 if config.instant_messaging else 1
    for key in list(world.consumers()):
        if key in world.awaiting or world.known.get(key):
            continue
        cid, com = key
        msg = announce_demand(world.centers[cid], com, world.next_msg_id, world.urgencies[key].current)
        world.next_msg_id += 1
        world.floods += 1
        result = flood(world.graph, cid, msg)
        world.known[key] = {}
        if not result.log:
            continue
        world.awaiting[key] = msg.msg_id
        world.inflight_count[msg.msg_id] = len(result.log)
        for tx in result.log:
            world._seq += 1
            world.in_flight.append(
                Pending(tick + delay * tx.hop, world._seq, msg, tx.sender, tx.receiver, tx.duplicate)
            )


def _deliver(world: World, tick: int) -> int:
    due = [p for p in world.in_flight if p.due <= tick]
    if not due:
        return 0
    world.in_flight = [p for p in world.in_flight if p.due > tick]
    due.sort(key=lambda p: (p.due, p.seq))
    for p in due:
        msg = p.msg
        world.trace.append(
            TraceEvent(tick, "flood_tx", p.sender, p.receiver, msg.commodity, msg.quantity_needed, msg.msg_id)
        )
        key = (msg.consumer_id, msg.commodity)
        world.inflight_count[msg.msg_id] -= 1
        if world.inflight_count[msg.msg_id] == 0:
            del world.inflight_count[msg.msg_id]
            if world.awaiting.get(key) == msg.msg_id:
                del world.awaiting[key]
        if p.duplicate:
            continue
        resp = respond_supply(world.centers[p.receiver], msg)
        if resp is None or key not in world.known:
            continue
        world.known[key][resp.supplier_id] = resp
        world.trace.append(
            TraceEvent(tick, "response", resp.supplier_id, msg.consumer_id, msg.commodity,
                       resp.quantity_available, msg.msg_id)
        )
    world.total_messages += len(due)
    return len(due)


def _refresh_views(world: World, config: Scenario) -> None:
    for key in world.consumers():
        cid, com = key
        known = world.known.get(key)
        if not known:
            continue
        view = world.views.get(key) or ConsumerView(cid, com)
        consumer = world.centers[cid]
        g = world.urgencies[key].current
        for sid in sorted(known):
            if sid in world.active_suppliers[com]:
                ev = evaluate_pair(consumer, world.centers[sid], com, g, config.costs)
                view = update_global_best(view, ev)
                continue
            # supplier has shed its surplus since it replied
            del known[sid]
            if view.global_best is not None and view.global_best.supplier_id == sid:
                try:
                    view = next_supplier(view)
                except ExhaustedError:  # pragma: no cover - head exists here
                    view = ConsumerView(cid, com)
            else:
                view = drop_supplier(view, sid)
        if known:
            world.views[key] = view
        else:
            # every supplier that answered is spent; announce again next tick
            world.known.pop(key, None)
            world.views.pop(key, None)


def step(world: World, rng: RngStream, config: Scenario) -> World:
    _check_config(world, config)
    tick = world.clock + 1

    # (1) arrivals
    _arrivals(world, config, rng, tick)
    _sync_roles(world, config, rng, tick)

    # (2) gossip
    _announce(world, config, tick)
    messages = _deliver(world, tick)

    # (3) urgency
    u = config.urgency
    for key in world.consumers():
        world.urgencies[key] = urgency_update(world.urgencies[key], 1, alpha=u.alpha, g_max=u.g_max)

    # (4) forces and consumer queues
    _refresh_views(world, config)

    # (5) clustering and virtual-space moves
    evals = [ev for key in world.consumers() for ev in world.views.get(key, ConsumerView(*key)).queue]
    clusters = build_clusters(evals)
    _move_clusters(world, clusters, config)
    settled = not world.in_flight and clusters == world.last_clusters
    world.last_clusters = clusters

    # (6)-(7) allocation and execution
    allocate_now = not config.epoch_mode or settled
    transferred, cost = 0, 0.0
    if allocate_now:
        orders = _plan(world, clusters, config, tick)
        for order in orders:
            out = execute_transfer(order, world)
            world.overflow += out.clipped
            world.stale_orders += int(out.stale)
            if out.order is None:
                continue
            transferred += out.order.quantity
            cost += out.order.cost
            world.trace.append(TraceEvent(tick, "transfer", order.supplier_id, order.consumer_id,
                                          order.commodity, out.order.quantity, None))

    # (8) retirement
    _sync_roles(world, config, rng, tick)

    # (9) metrics
    world.total_transferred += transferred
    world.total_cost += cost
    world.clock = tick
    world.history.append(replace(world.snapshot(), transferred=transferred, cost=cost,
                                 messages=messages, clusters=len(clusters)))
    return world


def _move_clusters(world: World, clusters, config: Scenario) -> None:
    k = config.kinematics
    for cl in clusters:
        sup = world.centers[cl.supplier_id]
        rs = virtual_radius(surplus(sup, cl.commodity), k.r0, k.m_ref)
        for cid in cl.members:
            con = world.centers[cid]
            rc = virtual_radius(deficit(con, cl.commodity), k.r0, k.m_ref)
            new = virtual_step(con.virtual_position, sup.virtual_position, rc + rs, k.beta)
            if new != con.virtual_position:
                world.centers[cid] = replace(con, virtual_position=new)


def _plan(world: World, clusters, config: Scenario, tick: int) -> list[TransferOrder]:
    orders = []
    for cl in sorted(clusters, key=lambda c: (c.supplier_id, c.commodity)):
        sup = world.centers[cl.supplier_id]
        members = [(world.centers[cid], world.urgencies[(cid, cl.commodity)].current) for cid in cl.members]
        queue = build_priority_queue(sup, members, cl.commodity, config.costs)
        orders += allocate(surplus(sup, cl.commodity), queue, supplier_id=sup.id, commodity=cl.commodity, tick=tick)
    return orders


def check_termination(world: World, config: Scenario, max_ticks: int | None = None) -> bool:
    limit = config.max_ticks if max_ticks is None else max_ticks
    if world.clock >= limit:
        return True
    idle = not any(world.active_consumers.values()) and not world.in_flight
    return idle and config.arrivals.closed


def run(
    scenario: Scenario,
    seed: int,
    max_ticks: int | None = None,
    progress: Callable[[World], None] | None = None,
) -> RunResult:
    errs = validate_scenario(scenario)
    if errs:
        raise ConfigError("; ".join(m for _, m in errs))
    rng = RngStream(seed)
    world = init_world(scenario, rng)
    initial = world.snapshot()
    while not check_termination(world, scenario, max_ticks):
        step(world, rng, scenario)
        if progress is not None:
            progress(world)
    return RunResult(world.history, world.trace, initial, world)
