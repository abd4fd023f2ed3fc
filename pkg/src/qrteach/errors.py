"""Exception types shared across the package.

Every error is a ``ValueError`` subclass so callers that only care about
"bad input" can catch one thing.
"""


class TournamentError(ValueError):
    pass


class SelfLoop(TournamentError):
    pass


class ConflictingPair(TournamentError):
    pass


class MissingPair(TournamentError):
    pass


class VertexOutOfRange(TournamentError):
    pass


class SameVertex(TournamentError):
    pass


class InvalidModulus(TournamentError):
    pass


class DuplicateOffset(TournamentError):
    pass


class DuplicateTarget(TournamentError):
    pass


class PatternTooLarge(TournamentError):
    pass


class MissingAssignment(TournamentError):
    pass


class InstanceOutOfRange(TournamentError):
    pass


class DomainError(TournamentError):
    pass


class BudgetExceeded(TournamentError):
    pass


class CapExceeded(TournamentError):
    """The minimum teaching-set size is larger than the search cap.

    ``lower_bound`` is the smallest value the true answer can take (cap + 1).
    """

    def __init__(self, message, lower_bound):
        super().__init__(message)
        self.lower_bound = lower_bound
