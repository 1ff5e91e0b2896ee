"""Numerical tolerances and engine defaults, kept in one place."""

# Row sums of transition matrices and probability vectors.
STOCHASTIC_TOL = 1e-12

# Probabilities of all enumerated paths must sum to one within this.
PATH_MASS_TOL = 1e-10

# Closed-form identities that hold up to floating-point round-off.
EXACT_TOL = 1e-12

# Relative agreement between the recursion and nested Gauss-Hermite quadrature.
QUADRATURE_TOL = 1e-8

# Monte Carlo agreement is judged in standard errors.
MC_NUM_SE = 4.0

# A Monte Carlo estimate with SE/mean above this is flagged as heavy-tailed.
MC_HEAVY_TAIL_RATIO = 0.05

DEFAULT_MAX_PATHS = 10**7
DEFAULT_MC_SIMS = 10**5
DEFAULT_SEED = 42
DEFAULT_QUAD_NODES = 64

# Paths priced per vectorized block during exact enumeration.
ENUMERATION_BLOCK_SIZE = 2**16
