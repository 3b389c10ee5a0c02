class FracLabError(Exception):
    pass


class NoBracket(FracLabError):
    """The fiber derivative never turned negative below the search ceiling."""


class NonConvergence(FracLabError):
    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best
