"""Exception types shared across the package.

``InputError`` covers bad arguments and unreadable data; ``NumericalError``
covers failures of the numerical pipeline itself (non-convergence, degenerate
fits, missing dimension jumps).  The CLI maps them to exit codes 2 and 3.
"""


class DepregError(Exception):
    pass


class InputError(DepregError, ValueError):
    pass


class NumericalError(DepregError, ArithmeticError):
    pass


class PipelineError(NumericalError):
    """A numerical failure annotated with the pipeline stage that raised it."""

    def __init__(self, stage: str, cause: Exception):
        self.stage = stage
        self.cause = cause
        super().__init__(f"{stage}: {cause}")
