class Error(Exception):
    """Base exception class for all ratiocopula errors."""

    pass


class InvalidGeneratorSpec(Error):
    """Raised when a generator spec names an unknown family, carries unknown
    keys, or has parameters outside the family's domain.
    """

    pass


class InvalidModelSpec(Error):
    """Raised when a model spec document is malformed."""

    pass


class DomainError(Error):
    """Raised when a quantity is requested outside its domain of definition:
    points outside the unit square, a missing second derivative, or a
    non-positive denominator 1 - theta*f*g.
    """

    pass


class PreconditionError(Error):
    """Raised when an operation's precondition does not hold.

    The names of the failed conditions are stored in the ``failed``
    attribute; ``witness`` holds the offending point when one is known.
    """

    def __init__(self, message, failed=(), witness=None):
        super().__init__(message)
        self.failed = tuple(failed)
        self.witness = witness


class DegenerateFieldError(Error):
    """Raised when the dependence field has extrema that make the parameter
    interval meaningless (e.g. a non-positive maximum).
    """

    pass


class SearchError(Error):
    """Raised when a bisection or feasibility search cannot be carried out:
    no sign change over the bracket, floor reached, re-entrant feasibility.
    """

    pass
