# %% [markdown]
# # The force between a consumer and a supplier
#
# A supplier carries positive mass (its surplus over reserve) and a consumer
# carries negative mass (its deficit). The force is `-g * mc * ms / r`. It is
# positive only when the two signs differ, so two suppliers never attract.

# %%
import numpy as np

from gravchain import CostParams, Center, HierarchyLabel, evaluate_pair, force_matrix, pair_force

print(pair_force(-40, 120, 0.5, 25.0))   # consumer vs supplier: attraction
print(pair_force(40, 120, 0.5, 25.0))    # supplier vs supplier: negative

# %% [markdown]
# `r` is the delivered unit cost, not a raw distance. A distant supplier is
# weaker, but a large enough surplus can still win.

# %%
params = CostParams(transport_rate=0.02, base_price={"wheat": 20.0}, handling_fee=1.0)


def center(cid, xy, stock, reserve):
    return Center(cid, HierarchyLabel("north", "PB", cid), xy, xy,
                  {"wheat": stock}, {"wheat": reserve}, {"wheat": 2000})


consumer = center("ludhiana", (0.0, 0.0), 100, 400)
near = center("jalandhar", (60.0, 0.0), 600, 300)
far = center("karnal", (250.0, 80.0), 1500, 300)
for s in (near, far):
    ev = evaluate_pair(consumer, s, "wheat", 0.7, params)
    print(f"{s.id:10s} cost={ev.unit_cost:6.2f} force={ev.force:9.1f}")

# %% [markdown]
# The vectorised form is what a large sweep would use.

# %%
mc = np.array([-300.0, -50.0])
ms = np.array([300.0, 1200.0])
g = np.array([0.7, 0.2])
cost = np.array([[22.2, 26.2], [24.0, 21.5]])
force_matrix(mc, ms, g, cost)
