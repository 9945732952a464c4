"""Exception hierarchy shared by all tjdiv modules."""


class TjdivError(Exception):
    """Base class for every error raised by this package."""


class DomainError(TjdivError):
    """A point lies outside a generator's domain, or on a boundary
    where the requested quantity (gradient, second derivative) diverges."""


class ValidationError(TjdivError):
    """Malformed arguments: bad shapes, bad parameter ranges, bad files."""


class CapabilityError(TjdivError):
    """The generator lacks an ingredient the operation needs
    (e.g. no inverse gradient, so fixed-point iteration is unavailable)."""


class SearchError(TjdivError):
    """A numerical search failed: no bracket, no sign change, no root."""
