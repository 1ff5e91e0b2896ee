"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations


class RSQTSMError(Exception):
    """Base class for all package errors."""


class ValidationError(RSQTSMError, ValueError):
    """Model inputs violate a structural invariant."""


class NegativeEntry(ValidationError):
    def __init__(self, i: int, j: int, k: int, value: float) -> None:
        self.i, self.j, self.k, self.value = i, j, k, value
        super().__init__(
            f"transition matrix {k}: entry ({i}, {j}) = {value!r} is negative"
        )


class RowSumViolation(ValidationError):
    def __init__(self, i: int, k: int, total: float) -> None:
        self.i, self.k, self.total = i, k, total
        super().__init__(
            f"transition matrix {k}: row {i} sums to {total!r}, expected 1"
        )


class TimeOutOfRange(RSQTSMError, IndexError):
    """A time index falls outside the span covered by the schedule."""


class PathBudgetExceeded(RSQTSMError):
    """Exact path enumeration would exceed the configured path budget.

    Switch to ``mode="chain_mc"`` (or raise ``max_paths``) when this fires.
    """

    def __init__(self, num_paths: int, max_paths: int) -> None:
        self.num_paths, self.max_paths = num_paths, max_paths
        super().__init__(
            f"{num_paths} regime paths exceed the budget of {max_paths}; "
            "use the chain Monte Carlo estimator instead"
        )


class DivergentExpectation(RSQTSMError, ArithmeticError):
    """E[exp(f*eps + g*eps**2)] is infinite because g >= 1/2.

    ``time``, ``regime`` and ``path`` locate the failing backward step when
    the error comes out of a recursion; they are ``None`` for a bare moment
    evaluation.
    """

    def __init__(
        self,
        message: str,
        *,
        time: int | None = None,
        regime: int | None = None,
        path: tuple[int, ...] | None = None,
    ) -> None:
        self.time, self.regime, self.path = time, regime, path
        super().__init__(message)


class QuadratureDiverged(DivergentExpectation):
    """Nested quadrature met a level whose integrand grows like exp(g*eps**2), g >= 1/2."""


class NotAffine(ValidationError):
    """The affine recursion was requested on a path with a nonzero a2."""


class ParseError(RSQTSMError, ValueError):
    """A configuration file could not be parsed."""

    def __init__(self, message: str, *, field: str | None = None, line: int | None = None) -> None:
        self.field, self.line = field, line
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field '{field}'")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)
