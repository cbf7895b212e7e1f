"""Exception types shared across the package."""


class DomainError(ValueError):
    """A value or coordinate lies outside the space it is used with."""


class ContractError(ValueError):
    """An operation was invoked outside its stated contract."""


class FormatError(ValueError):
    """A serialized kernel, constraint, or report file is malformed."""


class ExtractionFailed(RuntimeError):
    """No monochromatic core was found.

    ``proven_absent`` is True only when the search was exhaustive, in which
    case no such core exists at all; a randomized search that gives up sets
    it to False.
    """

    def __init__(self, message: str, proven_absent: bool = False):
        super().__init__(message)
        self.proven_absent = proven_absent
