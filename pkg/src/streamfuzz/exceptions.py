"""Exception hierarchy.

Every error raised deliberately by the package derives from
:class:`StreamFuzzError`, which is a :class:`ValueError` so callers using
sklearn-style ``except ValueError`` keep working.
"""


class StreamFuzzError(ValueError):
    """Base class for all package errors."""


class InvalidClusterCountError(StreamFuzzError):
    pass


class InsufficientPointsError(StreamFuzzError):
    pass


class DegenerateClusterError(StreamFuzzError):
    """A cluster lost all weighted membership mass.

    ``clusters`` lists the offending cluster indices.
    """

    def __init__(self, clusters, msg=None):
        self.clusters = tuple(int(c) for c in clusters)
        super().__init__(msg or f"degenerate cluster(s): {list(self.clusters)}")


class SchemaDriftError(StreamFuzzError):
    pass


class NoStatisticsError(StreamFuzzError):
    pass


class TooFewPointsError(StreamFuzzError):
    pass


class ShapeError(StreamFuzzError):
    pass


class EmptyInputError(StreamFuzzError):
    pass


class MappingGapError(StreamFuzzError):
    pass


class MalformedRecordError(StreamFuzzError):
    pass


class ConfigError(StreamFuzzError):
    pass
