"""Exception types shared across the package."""


class CertificateError(ValueError):
    """A lift failed its diffeomorphism certificate (min_slope <= 0)."""


class BracketError(ValueError):
    """A parameter bracket does not straddle the requested rotation number."""


class AliasingError(ValueError):
    """A sampling grid is too coarse for the dominant frequency."""


class ModeLockedError(ValueError):
    """The rotation number is (numerically) a low-denominator rational."""


class BudgetError(RuntimeError):
    """A search exhausted its candidate or orbit budget.

    The best attempt, when one exists, is kept on ``best``.
    """

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best
