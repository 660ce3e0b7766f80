import pytest

from gravchain.model import Center, HierarchyLabel

ACCEPTANCE_RESULTS = []


def make_center(cid="A", stock=0, reserve=0, capacity=None, *, commodity="wheat",
                state="punjab", zone="north", geo=(0.0, 0.0), virt=(0.0, 0.0), district=None):
    cap = capacity if capacity is not None else max(stock, reserve) + 100
    return Center(
        id=cid,
        hierarchy=HierarchyLabel(zone, state, district or f"d-{cid}"),
        geo_position=geo,
        virtual_position=virt,
        stock={commodity: stock},
        reserve={commodity: reserve},
        capacity={commodity: cap},
    )


@pytest.fixture
def center():
    return make_center


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance.py" in report.nodeid:
        ACCEPTANCE_RESULTS.append((report.nodeid.split("::")[-1], report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in ACCEPTANCE_RESULTS:
        terminalreporter.write_line(f"{'PASS' if outcome == 'passed' else 'FAIL'}  {name}")


def small_scenario(centers, edges, *, instant=True, alpha=0.05, commodities=("wheat",), **kw):
    from gravchain.gravity import CostParams
    from gravchain.model import Commodity
    from gravchain.scenario import ArrivalParams, GraphSpec, KinematicsParams, Scenario, UrgencyParams

    zeros = {c: 0.0 for c in commodities}
    return Scenario(
        commodities=tuple(Commodity(c, c.title()) for c in commodities),
        centers=tuple(centers),
        graph=GraphSpec(edges=tuple(edges)),
        costs=kw.pop("costs", CostParams(0.02, {c: 10.0 for c in commodities}, 1.0)),
        urgency=kw.pop("urgency", UrgencyParams(alpha=alpha)),
        arrivals=kw.pop("arrivals", ArrivalParams(dict(zeros), dict(zeros))),
        kinematics=kw.pop("kinematics", KinematicsParams(beta=0.5, r0=0.05, m_ref=1000.0)),
        instant_messaging=instant,
        **kw,
    )


def random_feasible_scenario(seed, n=30, commodities=("wheat", "rice"), instant=False):
    """Connected random scenario whose total surplus covers total deficit."""
    import numpy as np

    from gravchain.model import Center, HierarchyLabel

    rng = np.random.default_rng(seed)
    states = ["s0", "s1", "s2", "s3"]
    xy = rng.uniform(0, 500, (n, 2))
    ids = [f"C{i:02d}" for i in range(n)]
    inv = {cid: {} for cid in ids}
    for com in commodities:
        reserve = rng.integers(50, 300, n)
        stock = np.clip(reserve + rng.integers(-150, 250, n), 0, None)
        # shrink deficits until supply covers demand
        short = int(np.clip(reserve - stock, 0, None).sum() - np.clip(stock - reserve, 0, None).sum())
        i = 0
        while short > 0:
            if stock[i] < reserve[i]:
                fix = min(short, reserve[i] - stock[i])
                stock[i] += fix
                short -= fix
            i += 1
        cap = np.maximum(stock, reserve) + rng.integers(0, 100, n)
        for k, cid in enumerate(ids):
            inv[cid][com] = (int(stock[k]), int(reserve[k]), int(cap[k]))
    centers = [
        Center(cid, HierarchyLabel("z0" if k % 4 < 2 else "z1", states[k % 4], f"d{k}"),
               (float(xy[k, 0]), float(xy[k, 1])), (float(rng.random()), float(rng.random())),
               {c: v[0] for c, v in inv[cid].items()},
               {c: v[1] for c, v in inv[cid].items()},
               {c: v[2] for c, v in inv[cid].items()})
        for k, cid in enumerate(ids)
    ]
    order = rng.permutation(n)
    edges = {tuple(sorted((ids[order[k]], ids[order[k + 1]]))) for k in range(n - 1)}
    for _ in range(n):
        a, b = rng.choice(n, 2, replace=False)
        edges.add(tuple(sorted((ids[a], ids[b]))))
    return small_scenario(centers, sorted(edges), instant=instant, commodities=commodities, max_ticks=200)
