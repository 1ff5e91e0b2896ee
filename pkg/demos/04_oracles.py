# %% [markdown]
# # Independent checks
#
# Every closed form is compared with a brute-force estimate.
# `OracleReport.passed` uses the larger of a fixed tolerance and four
# standard errors.

# %%
from rsqtsm import RegimeParams, TransitionSchedule, hermite_rule, make_path
from rsqtsm import mc_conditional_price, mc_unconditional_price, quadrature_conditional_price
from rsqtsm.oracle import gaussian_moment_report

for f, g in [(0.0, 0.25), (0.7, 0.3), (-1.5, -0.8)]:
    rep = gaussian_moment_report(f, g)
    print(f, g, rep.closed_form, rep.oracle_value, rep.passed)

# %%
x, w = hermite_rule(8)
print("E[eps^4] from 8 nodes:", w @ x**4)

# %%
params = RegimeParams.from_rows([(0.05, 0.9, 0.15, 0.015, 0.01, 0.004), (0.2, 0.8, 0.35, 0.03, 0.02, 0.008)])
schedule = TransitionSchedule.constant([[0.9, 0.1], [0.25, 0.75]])
path = make_path(schedule, 0, (0, 1, 0))
for rep in (
    quadrature_conditional_price(params, path, 0.4),
    mc_conditional_price(params, path, 0.4, 100_000, rng_seed=5),
    mc_unconditional_price(params, schedule, 0, 4, 0.4, 0, 100_000, rng_seed=6),
):
    print(f"{rep.target:20s} closed={rep.closed_form:.10f} oracle={rep.oracle_value:.10f} "
          f"se={rep.standard_error:.2e} pass={rep.passed}")

# %% [markdown]
# A strongly negative `a2` makes the exponent grow like `+S^2`, and the
# expectation becomes infinite. This raises an error instead of returning a
# number.

# %%
from rsqtsm import DivergentExpectation, bond_price

bad = params.replace(a2=[0.004, -5.0])
try:
    bond_price(schedule, bad, 0, 4, 0.4, 0)
except DivergentExpectation as exc:
    print("diverged:", exc, "time", exc.time, "suffix", exc.path)
