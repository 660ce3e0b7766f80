"""Scenario documents, the synthetic FCI North Zone generator, and the
metrics/trace writers.

The scenario text format is described in ``docs/scenario_format.md``.
"""
from __future__ import annotations

import csv
import io
import json
import math
import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components, minimum_spanning_tree
from scipy.spatial.distance import pdist, squareform

from .errors import ValidationError
from .gravity import CostParams
from .model import Center, Commodity, HierarchyLabel
from .protocol import NetworkGraph
from .records import MetricsRow, TraceEvent

SECTIONS = ("commodities", "centers", "graph", "costs", "urgency", "arrivals", "sim")
_TOKEN = re.compile(r"^[A-Za-z0-9_.\-]+$")


@dataclass(frozen=True)
class GraphSpec:
    """Either a connection radius (km) or an explicit undirected edge list."""

    radius: float | None = None
    edges: tuple[tuple[str, str], ...] | None = None


@dataclass(frozen=True)
class UrgencyParams:
    alpha: float = 0.05
    g_max: float = 1.0
    g0_min: float = 0.0
    g0_max: float = 1.0


@dataclass(frozen=True)
class ArrivalParams:
    lambda_c: Mapping[str, float] = field(default_factory=dict)
    lambda_s: Mapping[str, float] = field(default_factory=dict)
    delta_min: int = 10
    delta_max: int = 100

    @property
    def closed(self) -> bool:
        return all(v == 0 for v in self.lambda_c.values()) and all(
            v == 0 for v in self.lambda_s.values()
        )


@dataclass(frozen=True)
class KinematicsParams:
    beta: float = 0.5
    r0: float = 1.0
    m_ref: float = 1000.0


@dataclass(frozen=True)
class Scenario:
    commodities: tuple[Commodity, ...]
    centers: tuple[Center, ...]
    graph: GraphSpec
    costs: CostParams
    urgency: UrgencyParams = UrgencyParams()
    arrivals: ArrivalParams = ArrivalParams()
    kinematics: KinematicsParams = KinematicsParams()
    max_ticks: int = 500
    epoch_mode: bool = False
    instant_messaging: bool = False

    @property
    def commodity_ids(self) -> tuple[str, ...]:
        return tuple(c.id for c in self.commodities)

    def center(self, cid: str) -> Center:
        for c in self.centers:
            if c.id == cid:
                return c
        raise KeyError(cid)


def build_graph(scenario: Scenario) -> NetworkGraph:
    ids = [c.id for c in scenario.centers]
    if scenario.graph.edges is not None:
        return NetworkGraph.from_edges(ids, scenario.graph.edges)
    return NetworkGraph.geometric({c.id: c.geo_position for c in scenario.centers}, scenario.graph.radius)


# --------------------------------------------------------------------------
# validation


def validate_scenario(s: Scenario, lines: Mapping | None = None) -> list[tuple[int | None, str]]:
    """Semantic checks; returns ``(line, message)`` pairs, empty when valid.

    ``lines`` optionally maps keys such as ``("center", id)`` to source lines.
    """
    lines = lines or {}
    errs: list[tuple[int | None, str]] = []

    def err(key, msg):
        errs.append((lines.get(key), msg))

    com_ids = [c.id for c in s.commodities]
    if not com_ids:
        err(("section", "commodities"), "no commodities declared")
    for cid in {c for c in com_ids if com_ids.count(c) > 1}:
        err(("commodity", cid), f"duplicate commodity id {cid}")
    known = set(com_ids)

    seen_ids: set[str] = set()
    districts: dict[str, str] = {}
    state_zone: dict[str, str] = {}
    for c in s.centers:
        key = ("center", c.id)
        if c.id in seen_ids:
            err(key, f"duplicate center id {c.id}")
        seen_ids.add(c.id)
        h = c.hierarchy
        if h.district in districts and districts[h.district] != c.id:
            err(key, f"district {h.district} used by both {districts[h.district]} and {c.id}")
        districts.setdefault(h.district, c.id)
        if state_zone.setdefault(h.state, h.zone) != h.zone:
            err(key, f"state {h.state} appears in zones {state_zone[h.state]} and {h.zone}")
        for com in c.capacity:
            if com not in known:
                err(key, f"center {c.id} references unknown commodity {com}")
            if c.reserve.get(com, 0) > c.capacity[com]:
                err(key, f"center {c.id}: reserve exceeds capacity for {com}")
            if c.stock.get(com, 0) > c.capacity[com]:
                err(key, f"center {c.id}: stock exceeds capacity for {com}")

    g = s.graph
    if (g.radius is None) == (g.edges is None):
        err(("section", "graph"), "graph needs exactly one of radius or explicit edges")
    elif g.radius is not None and not g.radius > 0:
        err(("graph", "radius"), "graph radius must be positive")
    elif g.edges is not None:
        for a, b in g.edges:
            for n in (a, b):
                if n not in seen_ids:
                    err(("edge", a, b), f"edge {a}-{b} references unknown center {n}")
            if a == b:
                err(("edge", a, b), f"self-loop at {a}")

    costs = s.costs
    if costs.transport_rate < 0 or costs.handling_fee < 0:
        err(("section", "costs"), "cost parameters must be non-negative")
    for com in com_ids:
        if com not in costs.base_price:
            err(("section", "costs"), f"no base price for commodity {com}")
            continue
        if costs.base_price[com] < 0:
            err(("price", com), f"negative base price for {com}")
        if costs.base_price[com] + costs.handling_fee > 0:
            continue
        if not costs.transport_rate > 0:
            err(("price", com), f"unit cost is zero for every pair trading {com}")
            continue
        for a, b in _colocated(s.centers):
            err(("price", com), f"zero unit cost between co-located {a} and {b} for {com}")

    u = s.urgency
    if not 0 <= u.g0_min <= u.g0_max <= 1:
        err(("section", "urgency"), "need 0 <= g0_min <= g0_max <= 1")
    if u.g_max < u.g0_max:
        err(("section", "urgency"), "g_max must be at least g0_max")
    if u.alpha < 0:
        err(("section", "urgency"), "alpha must be non-negative")

    a = s.arrivals
    for label, rates in (("lambda_c", a.lambda_c), ("lambda_s", a.lambda_s)):
        for com, lam in rates.items():
            if com not in known:
                err(("section", "arrivals"), f"{label} for unknown commodity {com}")
            if not lam >= 0:
                err(("section", "arrivals"), f"{label}.{com} must be non-negative")
    if not 0 < a.delta_min <= a.delta_max:
        err(("section", "arrivals"), "need 0 < delta_min <= delta_max")

    k = s.kinematics
    if not 0 < k.beta <= 1:
        err(("section", "sim"), "beta must lie in (0, 1]")
    if not (k.r0 > 0 and k.m_ref > 0):
        err(("section", "sim"), "r0 and m_ref must be positive")
    if s.max_ticks < 0:
        err(("section", "sim"), "max_ticks must be non-negative")
    return errs


def _colocated(centers: Iterable[Center]) -> list[tuple[str, str]]:
    by_pos: dict[tuple[float, float], str] = {}
    out = []
    for c in centers:
        pos = tuple(c.geo_position)
        if pos in by_pos:
            out.append((by_pos[pos], c.id))
        else:
            by_pos[pos] = c.id
    return out


def check_scenario(s: Scenario) -> Scenario:
    errs = validate_scenario(s)
    if errs:
        raise ValidationError(errs)
    return s


# --------------------------------------------------------------------------
# text format


def _fmt(x: float) -> str:
    return repr(float(x))


def serialize_scenario(s: Scenario) -> str:
    out = ["# gravchain scenario", "", "[commodities]"]
    for c in s.commodities:
        out.append(f"{c.id} = {c.name}".rstrip())
    out += ["", "[centers]", "# id zone state district geo_x geo_y virt_x virt_y commodity=stock/reserve/capacity ..."]
    for c in s.centers:
        h = c.hierarchy
        inv = " ".join(
            f"{com}={c.stock.get(com, 0)}/{c.reserve.get(com, 0)}/{c.capacity[com]}"
            for com in sorted(c.capacity)
        )
        row = [c.id, h.zone, h.state, h.district, *map(_fmt, c.geo_position), *map(_fmt, c.virtual_position)]
        out.append(" ".join(row) + (" " + inv if inv else ""))
    out += ["", "[graph]"]
    if s.graph.edges is not None:
        out.append("mode = edges")
        adj: dict[str, list[str]] = {c.id: [] for c in s.centers}
        for a, b in s.graph.edges:
            adj[a].append(b)
            adj[b].append(a)
        for cid in adj:
            out.append(f"adj.{cid} = {' '.join(sorted(adj[cid]))}".rstrip())
    else:
        out += ["mode = radius", f"radius = {_fmt(s.graph.radius)}"]
    co = s.costs
    out += ["", "[costs]", f"transport_rate = {_fmt(co.transport_rate)}", f"handling_fee = {_fmt(co.handling_fee)}"]
    out += [f"price.{k} = {_fmt(v)}" for k, v in co.base_price.items()]
    u = s.urgency
    out += ["", "[urgency]", f"alpha = {_fmt(u.alpha)}", f"g_max = {_fmt(u.g_max)}",
            f"g0_min = {_fmt(u.g0_min)}", f"g0_max = {_fmt(u.g0_max)}"]
    a = s.arrivals
    out += ["", "[arrivals]"]
    out += [f"lambda_c.{k} = {_fmt(v)}" for k, v in a.lambda_c.items()]
    out += [f"lambda_s.{k} = {_fmt(v)}" for k, v in a.lambda_s.items()]
    out += [f"delta_min = {a.delta_min}", f"delta_max = {a.delta_max}"]
    k = s.kinematics
    out += ["", "[sim]", f"max_ticks = {s.max_ticks}", f"epoch_mode = {str(s.epoch_mode).lower()}",
            f"instant_messaging = {str(s.instant_messaging).lower()}",
            f"beta = {_fmt(k.beta)}", f"r0 = {_fmt(k.r0)}", f"m_ref = {_fmt(k.m_ref)}"]
    return "\n".join(out) + "\n"


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.errors: list[tuple[int | None, str]] = []
        self.lines: dict = {}

    def fail(self, line, msg):
        self.errors.append((line, msg))

    def num(self, value, line, kind=float):
        try:
            return kind(value)
        except ValueError:
            self.fail(line, f"expected {'integer' if kind is int else 'number'}, got {value!r}")
            return None

    def boolean(self, value, line):
        if value.lower() in ("true", "yes", "1"):
            return True
        if value.lower() in ("false", "no", "0"):
            return False
        self.fail(line, f"expected true/false, got {value!r}")
        return None

    def parse(self) -> Scenario:
        section = None
        commodities: list[Commodity] = []
        centers: list[Center] = []
        kv: dict[str, dict[str, tuple[str, int]]] = {s: {} for s in SECTIONS}
        adjacency: dict[str, tuple[list[str], int]] = {}
        seen_sections = set()

        for no, raw in enumerate(self.text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            m = re.fullmatch(r"\[(\w+)\]", line)
            if m:
                section = m.group(1)
                if section not in SECTIONS:
                    self.fail(no, f"unknown section [{section}]")
                elif section in seen_sections:
                    self.fail(no, f"section [{section}] repeated")
                seen_sections.add(section)
                self.lines[("section", section)] = no
                continue
            if section is None:
                self.fail(no, "content before first section header")
                continue
            if section not in SECTIONS:
                continue
            if section == "centers":
                c = self.center_row(line, no)
                if c is not None:
                    centers.append(c)
                continue
            if "=" not in line:
                self.fail(no, "expected 'key = value'")
                continue
            key, value = (p.strip() for p in line.split("=", 1))
            if section == "commodities":
                if not _TOKEN.match(key):
                    self.fail(no, f"bad commodity id {key!r}")
                    continue
                self.lines.setdefault(("commodity", key), no)
                commodities.append(Commodity(key, value))
            elif section == "graph" and key.startswith("adj."):
                node = key[4:]
                if node in adjacency:
                    self.fail(no, f"adjacency for {node} given twice")
                adjacency[node] = (value.split(), no)
            else:
                if key in kv[section]:
                    self.fail(no, f"key {key} repeated in [{section}]")
                kv[section][key] = (value, no)

        for sec in SECTIONS:
            if sec not in seen_sections:
                self.fail(None, f"missing section [{sec}]")
        if self.errors:
            raise ValidationError(self.errors)

        graph = self.graph(kv["graph"], adjacency, {c.id for c in centers})
        costs = self.costs(kv["costs"])
        urgency = self.urgency(kv["urgency"])
        arrivals = self.arrivals(kv["arrivals"], [c.id for c in commodities])
        sim = self.sim(kv["sim"])
        scenario = Scenario(
            commodities=tuple(commodities),
            centers=tuple(centers),
            graph=graph,
            costs=costs,
            urgency=urgency,
            arrivals=arrivals,
            kinematics=sim["kinematics"],
            max_ticks=sim["max_ticks"],
            epoch_mode=sim["epoch_mode"],
            instant_messaging=sim["instant_messaging"],
        )
        errs = self.errors + [e for e in validate_scenario(scenario, self.lines) if e not in self.errors]
        if errs:
            raise ValidationError(errs)
        return scenario

    def center_row(self, line, no) -> Center | None:
        parts = line.split()
        if len(parts) < 8:
            self.fail(no, "center row needs id zone state district geo_x geo_y virt_x virt_y")
            return None
        cid, zone, state, district = parts[:4]
        for tok in (cid, zone, state, district):
            if not _TOKEN.match(tok):
                self.fail(no, f"bad identifier {tok!r}")
                return None
        coords = [self.num(v, no) for v in parts[4:8]]
        if any(v is None for v in coords):
            return None
        self.lines[("center", cid)] = no
        stock, reserve, capacity = {}, {}, {}
        for item in parts[8:]:
            m = re.fullmatch(r"([A-Za-z0-9_.\-]+)=(-?\d+)/(-?\d+)/(-?\d+)", item)
            if not m:
                self.fail(no, f"bad inventory entry {item!r}; expected commodity=stock/reserve/capacity")
                return None
            com = m.group(1)
            s, r, cap = (int(m.group(i)) for i in (2, 3, 4))
            if com in capacity:
                self.fail(no, f"center {cid}: commodity {com} listed twice")
                return None
            if min(s, r, cap) < 0:
                self.fail(no, f"center {cid}: negative quantity for {com}")
                return None
            if r > cap:
                self.fail(no, f"center {cid}: reserve exceeds capacity for {com}")
                return None
            if s > cap:
                self.fail(no, f"center {cid}: stock exceeds capacity for {com}")
                return None
            stock[com], reserve[com], capacity[com] = s, r, cap
        return Center(cid, HierarchyLabel(zone, state, district), (coords[0], coords[1]),
                      (coords[2], coords[3]), stock, reserve, capacity)

    def graph(self, kv, adjacency, ids) -> GraphSpec:
        mode = kv.get("mode", ("", self.lines.get(("section", "graph"))))
        if mode[0] == "radius":
            if adjacency:
                self.fail(min(n for _, n in adjacency.values()), "adjacency lines are not allowed with mode = radius")
            if "radius" not in kv:
                self.fail(mode[1], "mode = radius needs a radius")
                return GraphSpec()
            return GraphSpec(radius=self.num(*kv["radius"]))
        if mode[0] != "edges":
            self.fail(mode[1], "graph mode must be 'radius' or 'edges'")
            return GraphSpec()
        edges = set()
        for node, (nbrs, no) in sorted(adjacency.items()):
            if node not in ids:
                self.fail(no, f"adjacency for unknown center {node}")
            for nb in nbrs:
                if nb not in ids:
                    self.fail(no, f"edge {node}-{nb} references unknown center {nb}")
                    continue
                if nb == node:
                    self.fail(no, f"self-loop at {node}")
                    continue
                back = adjacency.get(nb, ([], None))[0]
                if node not in back:
                    self.fail(no, f"asymmetric edge: {node} lists {nb} but {nb} does not list {node}")
                    continue
                edges.add(tuple(sorted((node, nb))))
        return GraphSpec(edges=tuple(sorted(edges)))

    def costs(self, kv) -> CostParams:
        prices = {}
        rate = fee = 0.0
        for key, (value, no) in kv.items():
            v = self.num(value, no)
            if v is None:
                continue
            if v < 0:
                self.fail(no, f"{key} must be non-negative")
                continue
            if key == "transport_rate":
                rate = v
            elif key == "handling_fee":
                fee = v
            elif key.startswith("price."):
                prices[key[6:]] = v
                self.lines[("price", key[6:])] = no
            else:
                self.fail(no, f"unknown key {key} in [costs]")
        return CostParams(rate, prices, fee)

    def urgency(self, kv) -> UrgencyParams:
        vals = {}
        for key, (value, no) in kv.items():
            if key not in ("alpha", "g_max", "g0_min", "g0_max"):
                self.fail(no, f"unknown key {key} in [urgency]")
                continue
            vals[key] = self.num(value, no)
        vals = {k: v for k, v in vals.items() if v is not None}
        return UrgencyParams(**vals)

    def arrivals(self, kv, commodities) -> ArrivalParams:
        lc = {c: 0.0 for c in commodities}
        ls = {c: 0.0 for c in commodities}
        dmin, dmax = 10, 100
        for key, (value, no) in kv.items():
            if key.startswith("lambda_c.") or key.startswith("lambda_s."):
                v = self.num(value, no)
                if v is not None:
                    (lc if key.startswith("lambda_c.") else ls)[key[9:]] = v
            elif key == "delta_min":
                dmin = self.num(value, no, int)
            elif key == "delta_max":
                dmax = self.num(value, no, int)
            else:
                self.fail(no, f"unknown key {key} in [arrivals]")
        return ArrivalParams(lc, ls, dmin if dmin is not None else 10, dmax if dmax is not None else 100)

    def sim(self, kv) -> dict:
        out = {"max_ticks": 500, "epoch_mode": False, "instant_messaging": False}
        kin = {}
        for key, (value, no) in kv.items():
            if key == "max_ticks":
                v = self.num(value, no, int)
                if v is not None:
                    out[key] = v
            elif key in ("epoch_mode", "instant_messaging"):
                v = self.boolean(value, no)
                if v is not None:
                    out[key] = v
            elif key in ("beta", "r0", "m_ref"):
                v = self.num(value, no)
                if v is not None:
                    kin[key] = v
            else:
                self.fail(no, f"unknown key {key} in [sim]")
        out["kinematics"] = KinematicsParams(**kin)
        return out


def parse_scenario(text: str) -> Scenario:
    """Parse and validate a scenario document.

    Raises :class:`ValidationError` listing every problem found, each with
    the offending line number where one applies.
    """
    return _Parser(text).parse()


# --------------------------------------------------------------------------
# FCI North Zone (synthetic geography)

# state code, name, district count, anchor (km)
NORTH_ZONE_STATES = (
    ("DL", "delhi", 3, (330.0, 320.0)),
    ("HR", "haryana", 8, (250.0, 390.0)),
    ("HP", "himachal", 4, (330.0, 560.0)),
    ("JK", "jammu_kashmir", 5, (180.0, 720.0)),
    ("PB", "punjab", 10, (140.0, 520.0)),
    ("RJ", "rajasthan", 9, (90.0, 200.0)),
    ("UP", "uttar_pradesh", 12, (600.0, 260.0)),
    ("UK", "uttarakhand", 3, (500.0, 470.0)),
)
SURPLUS_STATES = ("punjab", "haryana")
NORTH_ZONE_COMMODITIES = (Commodity("wheat", "Wheat"), Commodity("rice", "Rice"))


def generate_north_zone(seed: int = 0, *, radius: float = 70.0, max_ticks: int = 500) -> Scenario:
    """54 district centers in 8 regions of one zone.

    Punjab and Haryana districts hold large surpluses; elsewhere most
    districts sit below reserve. Other states' surplus is trimmed so the two
    surplus states hold at least 90% of it, and deficits are trimmed so total
    surplus covers total deficit. Districts are grid-placed around a per-state
    anchor; the radius graph is bridged with minimum-spanning-tree edges so
    it is connected.
    """
    rng = np.random.default_rng(seed)
    spacing = 45.0
    rows = []
    for code, state, n, (ax, ay) in NORTH_ZONE_STATES:
        cols = math.ceil(math.sqrt(n))
        nrows = math.ceil(n / cols)
        for k in range(n):
            x = ax + (k % cols - (cols - 1) / 2) * spacing + rng.uniform(-8, 8)
            y = ay + (k // cols - (nrows - 1) / 2) * spacing + rng.uniform(-8, 8)
            vx, vy = rng.random(2)
            rows.append((f"{code}{k + 1:02d}", state, (round(float(x), 1), round(float(y), 1)),
                         (float(vx), float(vy))))

    inv: dict[str, dict[str, list[int]]] = {r[0]: {} for r in rows}
    for com in NORTH_ZONE_COMMODITIES:
        for cid, state, _, _ in rows:
            reserve = int(rng.integers(200, 401))
            if state in SURPLUS_STATES:
                stock = reserve + int(rng.integers(300, 801))
            else:
                u = rng.random()
                if u < 0.7:
                    stock = reserve - int(rng.integers(20, 151))
                elif u < 0.85:
                    stock = reserve + int(rng.integers(5, 31))
                else:
                    stock = reserve
            headroom = int(rng.integers(100, 301))
            inv[cid][com.id] = [stock, reserve, max(stock, reserve) + headroom]

        main = sum(inv[cid][com.id][0] - inv[cid][com.id][1] for cid, st, _, _ in rows if st in SURPLUS_STATES)
        budget = main // 9
        for cid, state, _, _ in rows:
            s, r, _ = inv[cid][com.id]
            if state not in SURPLUS_STATES and s > r:
                keep = min(s - r, budget)
                budget -= keep
                inv[cid][com.id][0] = r + keep
        supply = sum(max(0, s - r) for s, r, _ in (inv[cid][com.id] for cid in inv))
        for cid, state, _, _ in rows:
            s, r, _ = inv[cid][com.id]
            if s < r:
                keep = min(r - s, supply)
                supply -= keep
                inv[cid][com.id][0] = r - keep

    centers = []
    for cid, state, geo, virt in rows:
        data = inv[cid]
        centers.append(Center(
            id=cid,
            hierarchy=HierarchyLabel("north", state, f"{state}-{cid.lower()}"),
            geo_position=geo,
            virtual_position=virt,
            stock={c: v[0] for c, v in data.items()},
            reserve={c: v[1] for c, v in data.items()},
            capacity={c: v[2] for c, v in data.items()},
        ))

    edges = _bridged_geometric_edges([c.id for c in centers], np.array([c.geo_position for c in centers]), radius)
    zeros = {c.id: 0.0 for c in NORTH_ZONE_COMMODITIES}
    return Scenario(
        commodities=NORTH_ZONE_COMMODITIES,
        centers=tuple(centers),
        graph=GraphSpec(edges=edges),
        costs=CostParams(transport_rate=0.02, base_price={"wheat": 20.0, "rice": 25.0}, handling_fee=1.0),
        urgency=UrgencyParams(alpha=0.05, g_max=1.0, g0_min=0.0, g0_max=1.0),
        arrivals=ArrivalParams(dict(zeros), dict(zeros), 20, 150),
        kinematics=KinematicsParams(beta=0.5, r0=0.05, m_ref=1000.0),
        max_ticks=max_ticks,
    )


def _bridged_geometric_edges(ids, xy, radius) -> tuple[tuple[str, str], ...]:
    dist = squareform(pdist(xy))
    near = (dist <= radius) & ~np.eye(len(ids), dtype=bool)
    edges = {(ids[i], ids[j]) for i, j in zip(*np.nonzero(np.triu(near)))}
    ncomp, labels = connected_components(csr_matrix(near), directed=False)
    if ncomp > 1:
        mst = minimum_spanning_tree(csr_matrix(dist)).tocoo()
        parent = list(range(ncomp))

        def find(i):
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        for w, i, j in sorted(zip(mst.data, mst.row, mst.col)):
            a, b = find(labels[i]), find(labels[j])
            if a != b:
                parent[a] = b
                edges.add(tuple(sorted((ids[i], ids[j]))))
    return tuple(sorted(tuple(sorted(e)) for e in edges))


# --------------------------------------------------------------------------
# metrics and trace

METRICS_HEADER = ("tick", "transferred", "cost", "unmet_deficit", "messages",
                  "active_consumers", "active_suppliers", "clusters")
COST_DECIMALS = 6


def write_metrics(history: Iterable[MetricsRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(METRICS_HEADER)
    for r in history:
        w.writerow([r.tick, r.transferred, f"{r.cost:.{COST_DECIMALS}f}", r.unmet_deficit, r.messages,
                    r.active_consumers, r.active_suppliers, r.clusters])
    return buf.getvalue()


def read_metrics(text: str) -> list[MetricsRow]:
    reader = csv.DictReader(io.StringIO(text))
    if tuple(reader.fieldnames or ()) != METRICS_HEADER:
        raise ValueError(f"unexpected metrics header: {reader.fieldnames}")
    return [
        MetricsRow(
            tick=int(d["tick"]),
            transferred=int(d["transferred"]),
            cost=float(d["cost"]),
            unmet_deficit=int(d["unmet_deficit"]),
            messages=int(d["messages"]),
            active_consumers=int(d["active_consumers"]),
            active_suppliers=int(d["active_suppliers"]),
            clusters=int(d["clusters"]),
        )
        for d in reader
    ]


def write_trace(events: Iterable[TraceEvent]) -> str:
    lines = []
    for e in events:
        rec = {"tick": e.tick, "kind": e.kind, "from": e.src, "to": e.dst,
               "commodity": e.commodity, "qty": e.qty, "msg_id": e.msg_id}
        lines.append(json.dumps(rec, separators=(",", ":")))
    return "".join(line + "\n" for line in lines)


def read_trace(text: str) -> list[TraceEvent]:
    out = []
    for line in text.splitlines():
        if line.strip():
            d = json.loads(line)
            out.append(TraceEvent(d["tick"], d["kind"], d["from"], d["to"], d["commodity"], d["qty"], d["msg_id"]))
    return out
