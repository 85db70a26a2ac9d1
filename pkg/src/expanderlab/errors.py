"""Exception types shared across the package."""


class ExpanderlabError(Exception):
    """Base class for every error raised by this package."""


class InvalidArgumentError(ExpanderlabError, ValueError):
    """An argument failed validation."""


class NegativeProbabilityError(InvalidArgumentError):
    """A construction would produce negative transition probabilities."""


class ResourceLimitError(ExpanderlabError):
    """A computation exceeds its configured size guard."""


class DivergenceError(ExpanderlabError):
    """A series has no convergent evaluation for the given inputs."""


class OutOfRangeError(ExpanderlabError, ValueError):
    """A parameter lies outside its admissible window."""


class BoundViolationError(ExpanderlabError):
    """A certified inequality failed; the message names the offending instance."""
