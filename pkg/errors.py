"""
MCSP Errors
===========
Exception hierarchy shared by the solver modules and the command line.

Library code raises these; only mcsp.py turns them into exit codes.
"""


class MCSPError(Exception):
    """Base class for every error raised by this project"""


# ============== PRECONDITIONS ==============

class DomainError(MCSPError, ValueError):
    """An operation was called outside its domain"""


class MarkerRangeError(DomainError, IndexError):
    """Offset arithmetic left the string (sentinels not permitted)"""


class PeriodicityPreconditionError(DomainError):
    """The claimed overlap is not a suffix/prefix match"""


class ConstraintError(DomainError):
    """A constraint violates its structural invariants"""


# ============== RESOURCES ==============

class ResourceError(MCSPError, RuntimeError):
    """A configured resource limit was hit before an answer was found"""


class BranchBudgetExceeded(ResourceError):
    """The branching search created more states than the budget allows"""

    def __init__(self, budget, stats=None):
        super().__init__(f"branch budget of {budget} states exhausted")
        self.budget = budget
        self.stats = stats


class OracleLimitError(ResourceError):
    """The exhaustive oracle refuses instances above its length limit"""

    def __init__(self, n, limit):
        super().__init__(f"oracle limited to n <= {limit}, got n = {n}")
        self.n = n
        self.limit = limit


# ============== INTERNAL ==============

class InvariantViolation(MCSPError, AssertionError):
    """An internal guarantee of the branching algorithm did not hold"""


# ============== INPUT FILES ==============

class InstanceFormatError(MCSPError, ValueError):
    """An instance or partition file could not be parsed"""
