"""Exception types shared across the package."""


class PrimewebError(Exception):
    """Base class for package errors."""


class CapacityError(PrimewebError):
    """A requested value lies beyond the configured hard limit."""


class NotAMemberError(PrimewebError):
    """An inverse lookup was attempted on a value outside the set."""


class SingularInputError(PrimewebError):
    """An integrand is evaluated exactly at a non-removable singularity."""


class RangeError(PrimewebError):
    """A coordinate or angle falls outside the covered range."""


class NoRootError(PrimewebError):
    """A bracketed root search found no sign change in its window."""
