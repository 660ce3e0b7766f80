import networkx as nx
import pytest
from hypothesis import given, settings, strategies as st

from gravchain.errors import ValidationError
from gravchain.records import MetricsRow, TraceEvent
from gravchain.scenario import (
    METRICS_HEADER,
    SURPLUS_STATES,
    generate_north_zone,
    parse_scenario,
    read_metrics,
    read_trace,
    serialize_scenario,
    write_metrics,
    write_trace,
)
from gravchain.sim import run

from conftest import random_feasible_scenario

MINIMAL = """\
[commodities]
wheat = Wheat

[centers]
A north punjab amritsar 0.0 0.0 0.1 0.1 wheat=150/100/200
B north haryana karnal 100.0 0.0 0.9 0.9 wheat=60/100/200

[graph]
mode = edges
adj.A = B
adj.B = A

[costs]
transport_rate = 0.02
handling_fee = 1.0
price.wheat = 20.0

[urgency]
alpha = 0.05

[arrivals]

[sim]
max_ticks = 10
instant_messaging = true
"""


def test_parse_minimal():
    s = parse_scenario(MINIMAL)
    assert len(s.centers) == 2 and s.commodity_ids == ("wheat",)
    assert s.graph.edges == (("A", "B"),)
    assert s.center("B").reserve_of("wheat") == 100
    assert s.arrivals.lambda_c == {"wheat": 0.0}
    assert s.max_ticks == 10 and s.instant_messaging
    assert parse_scenario(serialize_scenario(s)) == s


def errors_of(text):
    with pytest.raises(ValidationError) as exc:
        parse_scenario(text)
    return exc.value.errors


def test_reserve_exceeds_capacity():
    errs = errors_of(MINIMAL.replace("wheat=60/100/200", "wheat=60/100/80"))
    assert errs == [(6, "center B: reserve exceeds capacity for wheat")]


def test_unknown_edge_target():
    errs = errors_of(MINIMAL.replace("adj.A = B", "adj.A = B Q"))
    assert any("Q" in msg and line == 10 for line, msg in errs)


def test_asymmetric_edges():
    errs = errors_of(MINIMAL.replace("adj.B = A", "adj.B ="))
    assert any("asymmetric" in msg for _, msg in errs)


def test_duplicate_center_id():
    text = MINIMAL.replace("B north haryana karnal", "A north haryana karnal")
    assert any("duplicate center id A" in m for _, m in errors_of(text))


def test_zero_cost_configuration():
    text = MINIMAL.replace("transport_rate = 0.02", "transport_rate = 0.0")
    text = text.replace("handling_fee = 1.0", "handling_fee = 0.0").replace("price.wheat = 20.0", "price.wheat = 0.0")
    assert any("zero" in m for _, m in errors_of(text))


def test_syntax_errors_have_lines():
    errs = errors_of(MINIMAL.replace("[urgency]\nalpha = 0.05", "[urgency]\nalpha 0.05"))
    assert errs[0][0] == 19
    assert any("missing section" in m for _, m in errors_of(MINIMAL.replace("[arrivals]\n", "")))


def test_radius_mode():
    text = MINIMAL.replace("mode = edges\nadj.A = B\nadj.B = A", "mode = radius\nradius = 150.0")
    s = parse_scenario(text)
    assert s.graph.radius == 150.0 and s.graph.edges is None
    assert parse_scenario(serialize_scenario(s)) == s


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10_000), st.integers(2, 30))
def test_round_trip_random(seed, n):
    s = random_feasible_scenario(seed, n=n)
    assert parse_scenario(serialize_scenario(s)) == s


@pytest.mark.parametrize("seed", [0, 1, 7, 123])
def test_north_zone_shape(seed):
    s = generate_north_zone(seed)
    assert len(s.centers) == 54
    assert len({c.hierarchy.state for c in s.centers}) == 8
    assert len({c.hierarchy.zone for c in s.centers}) == 1
    surplus = {st_: 0 for st_ in {c.hierarchy.state for c in s.centers}}
    supply = demand = 0
    for c in s.centers:
        for com in s.commodity_ids:
            m = c.stock_of(com) - c.reserve_of(com)
            surplus[c.hierarchy.state] += max(m, 0)
            supply += max(m, 0)
            demand += max(-m, 0)
    assert sum(surplus[x] for x in SURPLUS_STATES) / supply >= 0.90
    assert supply >= demand
    G = nx.Graph(s.graph.edges)
    G.add_nodes_from(c.id for c in s.centers)
    assert nx.is_connected(G)
    assert parse_scenario(serialize_scenario(s)) == s


def test_north_zone_deterministic():
    assert serialize_scenario(generate_north_zone(1)) == serialize_scenario(generate_north_zone(1))
    assert serialize_scenario(generate_north_zone(1)) != serialize_scenario(generate_north_zone(2))


def test_write_metrics():
    assert write_metrics([]) == ",".join(METRICS_HEADER) + "\n"
    rows = [MetricsRow(t, 10 * t, 1234567.125 * t, 50 - t, 3, 2, 1, 1) for t in (1, 2, 3)]
    text = write_metrics(rows)
    assert len(text.splitlines()) == 4
    assert "1,234" not in text  # no thousands separators
    assert read_metrics(text) == rows


@given(st.lists(st.floats(0, 1e9, allow_nan=False), max_size=5))
def test_metrics_round_trip_at_declared_precision(costs):
    rows = [MetricsRow(i + 1, cost=c) for i, c in enumerate(costs)]
    back = read_metrics(write_metrics(rows))
    for a, b in zip(rows, back):
        assert abs(a.cost - b.cost) <= 5e-7 + 1e-15 * a.cost
        assert a.tick == b.tick


def test_trace_writer():
    assert write_trace([]) == ""
    ev = TraceEvent(3, "transfer", "S", "C", "wheat", 30, None)
    text = write_trace([ev])
    assert text == '{"tick":3,"kind":"transfer","from":"S","to":"C","commodity":"wheat","qty":30,"msg_id":null}\n'
    assert read_trace(text) == [ev]


def test_single_transfer_trace():
    s = parse_scenario(MINIMAL)
    r = run(s, seed=0)
    transfers = [e for e in r.trace if e.kind == "transfer"]
    assert len(transfers) == 1 and transfers[0].qty == 40
    assert write_trace(r.trace) == write_trace(run(s, seed=0).trace)
