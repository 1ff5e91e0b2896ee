"""Zero-coupon bond pricing when the short rate is a quadratic function of a
regime-switching autoregressive asset.

The bond price conditional on a regime path is exp(c1 + c2*S + c3*S**2), with
coefficients from a backward recursion; the unconditional price sums those
over all regime paths weighted by their probabilities.
"""

__version__ = "0.1.0"

from .chain import (
    ChainPath,
    TransitionSchedule,
    enumerate_paths,
    make_path,
    simulate_chain,
    step_distribution,
    validate_schedule,
)
from .dynamics import MarketState, RegimeParams, asset_step, short_rate, simulate_asset_path
from .errors import (
    DivergentExpectation,
    NegativeEntry,
    NotAffine,
    ParseError,
    PathBudgetExceeded,
    QuadratureDiverged,
    RowSumViolation,
    RSQTSMError,
    TimeOutOfRange,
    ValidationError,
)
from .oracle import (
    OracleReport,
    hermite_rule,
    mc_conditional_price,
    mc_unconditional_price,
    quadrature_conditional_price,
)
from .pricing import PriceResult, YieldCurve, bond_price, bond_price_chain_mc, conditional_price, yield_curve
from .recursion import (
    CoeffSchedule,
    CoeffTriple,
    affine_schedule,
    backward_step,
    coefficient_schedule,
    gaussian_quad_expectation,
)
