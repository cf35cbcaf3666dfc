"""Exception hierarchy.

Construction and search operations raise; verification operations return a
:class:`~densityclone.report.VerificationRecord` with ``passed=False``.
"""


class DensityCloneError(Exception):
    """Base class for all library errors."""


class SpecParseError(DensityCloneError, ValueError):
    """A set, function or tree specification could not be parsed."""

    def __init__(self, message, text="", position=0):
        self.text = text
        self.position = position
        where = f" at position {position}" if text else ""
        super().__init__(f"{message}{where}" + (f": {text!r}" if text else ""))


class EnumerationBoundError(DensityCloneError):
    """A predicate set was queried past its declared enumeration bound."""


class ArityMismatch(DensityCloneError, ValueError):
    pass


class InvalidShadowSpec(DensityCloneError, ValueError):
    pass


class PreconditionViolated(DensityCloneError):
    """A checked precondition failed; ``witness`` is the offending point."""

    def __init__(self, message, witness=None):
        self.witness = witness
        super().__init__(message)


# -- badness search --------------------------------------------------------

class SearchFailure(DensityCloneError):
    """Base class for failures of the bounded witness searches."""

    code = "search-failure"

    def __init__(self, message, horizon=None):
        self.horizon = horizon
        super().__init__(message)


class NoMFound(SearchFailure):
    code = "no-m-found"


class NoTFound(SearchFailure):
    code = "no-t-found"


class NoStabilizingN(SearchFailure):
    code = "no-stabilizing-n"


class StageFailure(SearchFailure):
    """Wraps the failure of one stage of a multi-stage construction."""

    code = "stage-failure"

    def __init__(self, stage, cause):
        self.stage = stage
        self.cause = cause
        super().__init__(f"stage {stage} failed: {cause}", getattr(cause, "horizon", None))


# -- precompleteness constructions -------------------------------------------

class SetTooSmall(DensityCloneError):
    code = "set-too-small"


class PremiseUnmet(DensityCloneError):
    code = "premise-unmet"


class NotEnoughIntervals(DensityCloneError):
    code = "not-enough-intervals"


class NoPreimage(DensityCloneError):
    code = "no-preimage"

    def __init__(self, value, horizon):
        self.value = value
        self.horizon = horizon
        super().__init__(f"no preimage for {value} within search horizon {horizon}")


class RTableGap(DensityCloneError):
    code = "r-table-gap"


class PipelineStageError(DensityCloneError):
    """A pipeline stage failed; ``stage`` names it, ``cause`` is the original error."""

    code = "pipeline-stage-failure"

    def __init__(self, stage, cause):
        self.stage = stage
        self.cause = cause
        super().__init__(f"pipeline stage {stage!r} failed: {cause}")


# -- closed monoid -----------------------------------------------------------

class PartitionError(DensityCloneError):
    pass


class BranchNotInTree(DensityCloneError, KeyError):
    pass
