"""Exception hierarchy.

Two families: input problems (bad files, violated preconditions) and
numerical failures (singular systems, ambiguous root tracking, blowup).
The CLI maps them to exit codes 1 and 2.
"""


class InputError(ValueError):
    """Malformed input or a violated precondition."""


class ModelError(InputError):
    """Model definition or model file does not satisfy the schema."""


class PreconditionError(InputError):
    """A scenario precondition does not hold (names the invariant)."""


class NumericalError(RuntimeError):
    """A well-posed request failed numerically."""


class DegenerateRootsError(NumericalError):
    pass


class SingularSystemError(NumericalError):
    def __init__(self, message, cond=None):
        super().__init__(message)
        self.cond = cond


class RootTrackingError(NumericalError):
    pass


class BranchAmbiguityError(NumericalError):
    pass


class OBCArcError(NumericalError):
    """Incident energy lies on the open-boundary arc (|beta_s| == |beta_s+1|)."""


class BlowupError(NumericalError):
    def __init__(self, message, time=None):
        super().__init__(message)
        self.time = time


class PeakError(NumericalError):
    pass
