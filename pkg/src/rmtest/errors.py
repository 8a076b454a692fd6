"""Exception types shared across the package."""


class ParamsMismatchError(ValueError):
    """Operands live over different (q, n) parameters."""


class ZeroPolynomialError(ValueError):
    """Operation undefined for the zero polynomial."""


class DegenerateFormError(ValueError):
    """A linear form required to be nonzero was zero."""


class StructureError(ValueError):
    """Input violates a structural precondition (e.g. not block-multilinear)."""


class InfeasibleInstanceError(RuntimeError):
    """Exact enumeration would exceed the configured budget.

    Carries the enumeration size that would have been required so callers
    can report it or fall back to sampling.
    """

    def __init__(self, required: int, budget: int, what: str = "enumeration"):
        self.required = required
        self.budget = budget
        self.what = what
        super().__init__(
            f"{what} needs {required} items, above the budget of {budget}"
        )
