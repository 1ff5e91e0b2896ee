# %% [markdown]
# # Regime chain
#
# A two-state chain (calm, stressed) with a transition matrix that drifts
# toward stress. We enumerate every path, check that the probabilities sum
# to one, and compare with simulated frequencies.

# %%
import numpy as np

from rsqtsm import TransitionSchedule, enumerate_paths, simulate_chain, step_distribution
from rsqtsm.chain import simulate_regimes
from rsqtsm.random import make_stream

# %% [markdown]
# Row `i` of `Q_k` holds the probabilities of moving from regime `i` at time
# `k` to each regime at `k + 1`.

# %%
calm_to_stress = np.linspace(0.05, 0.3, 6)
schedule = TransitionSchedule.from_list([[[1 - p, p], [0.3, 0.7]] for p in calm_to_stress])
print(schedule.matrix(0))
print(schedule.matrix(5))

# %%
paths = list(enumerate_paths(schedule, k0=0, i0=0, horizon=5))
print(len(paths), "paths, total probability", sum(p.probability for p in paths))
for p in sorted(paths, key=lambda p: -p.probability)[:4]:
    print(p.states, round(p.probability, 5))

# %% [markdown]
# The marginal law at each time is a row vector pushed through the matrices.

# %%
dist = np.array([1.0, 0.0])
for k in range(5):
    print(k, dist.round(4))
    dist = step_distribution(schedule, k, dist)

# %%
regimes = simulate_regimes(schedule, 0, np.zeros(100_000, dtype=int), 5, make_stream(3))
print("simulated P(stress) by time:", regimes.mean(axis=0).round(4))

# %%
print(simulate_chain(schedule, 0, 0, 5, rng_seed=11))
