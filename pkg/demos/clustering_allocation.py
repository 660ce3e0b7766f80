# %% [markdown]
# # Clusters and the supplier's queue
#
# Each consumer joins the supplier that pulls on it hardest. The supplier then
# serves its cluster in order: same state first, then same zone, then the
# rest, with higher urgency ahead inside a tier.

# %%
from gravchain import (
    Center,
    CostParams,
    HierarchyLabel,
    allocate,
    build_clusters,
    build_priority_queue,
    evaluate_pair,
)


def center(cid, state, xy, stock, reserve):
    return Center(cid, HierarchyLabel("north", state, cid), xy, xy,
                  {"wheat": stock}, {"wheat": reserve}, {"wheat": 2000})


suppliers = [center("amritsar", "PB", (0, 0), 900, 300), center("karnal", "HR", (200, -150), 900, 300)]
consumers = [
    center("shimla", "HP", (120, 10), 50, 200),
    center("patiala", "PB", (90, -60), 100, 250),
    center("delhi", "DL", (240, -260), 200, 600),
    center("jammu", "JK", (-20, 150), 40, 180),
]
urgency = {"shimla": 0.9, "patiala": 0.3, "delhi": 0.8, "jammu": 0.5}
params = CostParams(0.02, {"wheat": 20.0}, 1.0)

# %%
evals = [evaluate_pair(c, s, "wheat", urgency[c.id], params) for c in consumers for s in suppliers]
clusters = build_clusters(evals)
for cl in clusters:
    print(cl.supplier_id, "->", cl.members)

# %% [markdown]
# Allocation is greedy down the queue. A supplier short of stock fills the
# head of the queue completely before anyone behind it gets a tonne.

# %%
by_id = {c.id: c for c in consumers}
for cl in clusters:
    sup = next(s for s in suppliers if s.id == cl.supplier_id)
    queue = build_priority_queue(sup, [(by_id[m], urgency[m]) for m in cl.members], "wheat", params)
    for o in allocate(400, queue, supplier_id=sup.id, commodity="wheat"):
        print(f"  {o.supplier_id} -> {o.consumer_id}: {o.quantity} t at {o.unit_cost:.2f}/t")
