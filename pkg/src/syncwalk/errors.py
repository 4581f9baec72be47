"""Exception hierarchy shared by every syncwalk module."""


class SyncError(Exception):
    """Base class for all syncwalk errors."""


class DomainError(SyncError, ValueError):
    """An argument lies outside the domain of an operation."""


class InvalidAutomaton(DomainError):
    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


class NotSynchronizing(SyncError):
    """The automaton admits no reset word."""


class PairNotSynchronizable(SyncError):
    """No word merges the requested pair of states."""


class ResourceExceeded(SyncError):
    """A search visited more subsets than its cap allows."""


class NotAbsorbing(SyncError):
    """Some transient chain state cannot reach an absorbing state."""


class SingularSystem(SyncError):
    """Floating point elimination hit a pivot below tolerance."""


class EstimateTruncated(SyncError):
    """At least one Monte Carlo trial hit the step cap."""


class TruncationRefused(DomainError):
    """The expected run length is too large for the step cap."""
