# %% [markdown]
# # Bond prices and yield curves
#
# The price sums path prices weighted by path probabilities. We compare the
# curve in each starting regime and check exact enumeration against a
# Monte Carlo over regime paths.

# %%
from pathlib import Path

import numpy as np

from rsqtsm import bond_price, bond_price_chain_mc, yield_curve
from rsqtsm.config import load_config

cfg = load_config(Path(__file__).resolve().parent.parent / "corpus" / "03_two_regime_quadratic.toml")
mats = list(range(1, 11))
for regime in range(cfg.num_regimes):
    curve = yield_curve(cfg.schedule, cfg.params, 0, cfg.s0, regime, mats, cfg.engine.max_paths)
    print(f"regime {regime + 1}:", np.round(curve.yields * 100, 3))

# %% [markdown]
# Starting in the stressed regime lifts the short end. The gap narrows with
# maturity as the chain forgets its start.

# %%
exact = bond_price(cfg.schedule, cfg.params, 0, 14, cfg.s0, 0)
mc = bond_price_chain_mc(cfg.schedule, cfg.params, 0, 14, cfg.s0, 0, 200_000, rng_seed=1)
print(exact.price, exact.num_paths_used)
print(mc.price, "+/-", mc.standard_error)
print("gap in standard errors:", abs(exact.price - mc.price) / mc.standard_error)

# %% [markdown]
# Prices fall as the asset level rises, because the rate is increasing in S
# over this range.

# %%
for s in (-0.5, 0.0, 0.5, 1.0):
    print(s, bond_price(cfg.schedule, cfg.params, 0, 6, s, 0).price)
