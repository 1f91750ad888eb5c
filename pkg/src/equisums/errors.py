"""Exception hierarchy shared by every module."""


class EquisumsError(Exception):
    pass


class DomainError(EquisumsError, ValueError):
    """An argument lies outside the mathematical domain of the operation."""


class ConstraintError(DomainError):
    """A structural constraint on a block (sign pairing, distinctness) is violated."""


class ResourceError(EquisumsError, RuntimeError):
    """An enumeration would exceed its budget."""
