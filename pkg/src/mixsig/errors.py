"""Exception hierarchy shared by all modules."""


class MixsigError(Exception):
    """Base class for every error raised by this package."""


class SignatureMismatch(MixsigError, ValueError):
    pass


class RankDeficientError(MixsigError, ValueError):
    pass


class PrecisionExhausted(MixsigError, ArithmeticError):
    """Floating point lost too much accuracy; retry with more mantissa bits."""


class EnumerationBudgetExceeded(MixsigError, RuntimeError):
    def __init__(self, nodes: int, budget: int):
        super().__init__(nodes, budget)
        self.nodes = nodes
        self.budget = budget

    def __str__(self) -> str:
        return f"enumeration visited {self.nodes} nodes, budget is {self.budget}"


class FieldSpecError(MixsigError, ValueError):
    pass


class CatalogError(MixsigError, ValueError):
    pass
