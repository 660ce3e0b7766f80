# %% [markdown]
# # A full run on the North Zone network
#
# 54 district centers across eight states. Punjab and Haryana hold nearly all
# the surplus. The run ends once every deficit is covered.

# %%
from gravchain import generate_north_zone, run

scenario = generate_north_zone(seed=0)
result = run(scenario, seed=0)
print("ticks:", result.world.clock)
print("initial unmet deficit:", result.initial.unmet_deficit)
print("tonnes moved:", result.world.total_transferred)
print("messages:", result.world.total_messages)

# %%
for row in result.history[::5]:
    print(f"t={row.tick:3d} unmet={row.unmet_deficit:6d} moved={row.transferred:5d} clusters={row.clusters}")

# %% [markdown]
# Epoch mode holds every transfer until the clusters settle and no message
# is in flight. Compare both policies on the same seed.

# %%
from dataclasses import replace

epoch = replace(scenario, epoch_mode=True)
r2 = run(epoch, seed=0)
print("epoch mode ticks:", r2.world.clock, "cost:", round(r2.world.total_cost, 2))
print("immediate ticks:", result.world.clock, "cost:", round(result.world.total_cost, 2))
