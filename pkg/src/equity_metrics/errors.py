class DataError(ValueError):
    """Input scores are malformed or unusable for the requested metric."""


class DegenerateSplitError(DataError):
    """A tail/center split leaves one part without bins or without mass."""


class DegenerateDistributionError(DataError):
    """A distribution has zero spread where a spread is required."""
