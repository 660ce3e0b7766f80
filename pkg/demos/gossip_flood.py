# %% [markdown]
# # Flooding a demand announcement
#
# A consumer floods its demand to every reachable center. Each node forwards
# a message once, so the transmission count stays below twice the edge count.

# %%
import numpy as np

from gravchain import NetworkGraph, flood

rng = np.random.default_rng(3)
pts = {f"n{i:02d}": tuple(map(float, p)) for i, p in enumerate(rng.random((40, 2)))}
g = NetworkGraph.geometric(pts, 0.25)
print("nodes", len(g.nodes), "edges", g.edge_count)

# %%
res = flood(g, "n00")
print("reached", len(res.delivered), "transmissions", res.transmissions, "bound", 2 * g.edge_count)

# %% [markdown]
# Hop counts give the delivery latency when one hop takes one tick.

# %%
hops = {}
for tx in res.log:
    if not tx.duplicate:
        hops[tx.receiver] = tx.hop
print("farthest node is", max(hops.values()), "hops out")
print("duplicates suppressed:", sum(tx.duplicate for tx in res.log))
