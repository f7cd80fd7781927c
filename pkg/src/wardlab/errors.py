"""Exception hierarchy shared across the package."""


class WardlabError(Exception):
    """Base class for all library errors."""


class ExprError(WardlabError):
    """Expression parsing failed.

    `offset` is the byte offset into the source text where the problem
    was detected.
    """

    def __init__(self, message, offset):
        super().__init__(f"{message} (at offset {offset})")
        self.offset = offset


class EvalError(WardlabError):
    """Sequence or function evaluation failed.

    Raised both for domain violations (index below domain_start, finite
    data exhausted, value outside a function's declared domain) and for
    non-finite results: NaN/inf is a hard error, never a value.
    `index` is the offending sequence index when known.
    """

    def __init__(self, message, index=None):
        if index is not None:
            message = f"{message} (at index {index})"
        super().__init__(message)
        self.index = index


class SchemeError(WardlabError):
    """Invalid lacunary scheme: non-monotone boundaries, bad descriptor, overflow."""


class SelectionError(WardlabError):
    """A counterexample block selection could not be completed.

    Either the scheme's ratio regime does not match the construction's
    precondition, or the selection exhausted the horizon cap.
    """
