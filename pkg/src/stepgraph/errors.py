"""Error types shared across the package.

The CLI maps these onto exit codes: FormatError -> 3 (bad input content),
DimensionError -> 4 (shape mismatch between otherwise valid inputs), any
other StepgraphError -> 5.
"""


class StepgraphError(Exception):
    """Base class for all library errors."""


class FormatError(StepgraphError):
    """A file or value failed validation: parse errors, duplicate names,
    non-finite scores, ids out of range."""


class DimensionError(StepgraphError):
    """Inputs that are individually valid do not agree in shape."""
