"""Exception types shared across the package.

Argument/domain misuse raises plain ValueError. The classes here cover the
other two failure families the CLI distinguishes by exit code: bad input
data (exit 2) and blown resource budgets (exit 3).
"""


class DataError(Exception):
    """Input files or records are malformed, missing, or inconsistent."""


class ResourceLimitError(Exception):
    """A configured memory/size budget would be exceeded."""


class TrainingError(Exception):
    """Optimization produced a non-finite loss; the message names the epoch."""
