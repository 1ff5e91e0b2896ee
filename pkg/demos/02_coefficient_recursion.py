# %% [markdown]
# # Exponential-quadratic coefficients
#
# Along a fixed regime path the bond price is `exp(c1 + c2 S + c3 S^2)`.
# The coefficients are built backward from zero at maturity.

# %%
import numpy as np

from rsqtsm import ChainPath, RegimeParams, affine_schedule, coefficient_schedule, conditional_price
from rsqtsm import quadrature_conditional_price

params = RegimeParams.from_rows(
    [
        # kappa, mu, sigma, a0, a1, a2
        (0.05, 0.9, 0.15, 0.015, 0.01, 0.004),
        (0.20, 0.8, 0.35, 0.030, 0.02, 0.008),
    ]
)
path = ChainPath(0, (0, 1, 1, 0, 0), 1.0)
sched = coefficient_schedule(params, path)
print(np.round(sched.as_array(), 6))

# %% [markdown]
# The last row is zero. The one before it is `-(a0, a1, a2)` of the regime
# held at `T - 1`.

# %%
s_grid = np.linspace(-1, 1, 5)
print(conditional_price(sched, s_grid))

# %% [markdown]
# A nested Gauss-Hermite integral over the shocks gives the same number.

# %%
rep = quadrature_conditional_price(params, ChainPath(0, (0, 1, 1), 1.0), 0.4)
print(rep.closed_form, rep.oracle_value, rep.passed)

# %% [markdown]
# With `a2 = 0` the quadratic coefficient never switches on and the affine
# recursion agrees.

# %%
affine = params.replace(a2=[0.0, 0.0])
gap = np.abs(coefficient_schedule(affine, path).as_array() - affine_schedule(affine, path).as_array()).max()
print("max gap", gap)
