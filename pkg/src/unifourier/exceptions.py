"""Error types. Exit codes for the CLI hang off ``exit_code``."""


class UnifourierError(Exception):
    exit_code = 1


class InvalidInput(UnifourierError, ValueError):
    exit_code = 3


class QuadratureError(UnifourierError, ArithmeticError):
    pass


class SearchExhausted(UnifourierError):
    """No admissible index within the cap meets the requirement; raise n_cap or relax the target."""

    exit_code = 2


class StageConflict(UnifourierError):
    exit_code = 2

    def __init__(self, message, stage=None):
        super().__init__(message)
        self.stage = stage


class DegenerateGadget(UnifourierError, ZeroDivisionError):
    pass


class BudgetTooSmall(UnifourierError):
    pass


class GapTooSmall(UnifourierError):
    exit_code = 3
