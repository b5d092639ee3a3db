"""Exception and warning types shared across the package."""


class BirankError(Exception):
    """Base class for all errors raised by this package."""


class IndexOutOfRange(BirankError):
    """A vertex index falls outside the declared side or graph size."""


class NonPositiveWeight(BirankError):
    """An edge weight is zero or negative."""


class EmptySide(BirankError):
    """A bipartite graph was declared with an empty vertex side."""


class IsolatedVertex(BirankError):
    """A vertex with degree zero was passed to a graph constructor."""


class DimensionMismatch(BirankError):
    """Vector or vertex-set sizes do not agree."""


class MalformedLine(BirankError):
    """An input line could not be parsed."""

    def __init__(self, line_no, message):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class EmptyFile(BirankError):
    """An input stream contained no data records."""


class UnsupportedHeader(BirankError):
    """A MatrixMarket header describes an unsupported variant."""


class NnzMismatch(BirankError):
    """A MatrixMarket file's entry count differs from its header."""


class AllVerticesIsolated(BirankError):
    """Cleaning removed every vertex (the edge list was empty)."""


class EmptyBlock(BirankError):
    """A partition block has no members."""


class NotStochastic(BirankError):
    """A matrix expected to be row-stochastic is not."""


class NotStronglyConnected(BirankError):
    """An operation requires a strongly connected transition structure."""


class TooLarge(BirankError):
    """An input exceeds the size limit of a dense or quadratic routine."""


class NotConverged(BirankError):
    """An iterative solve did not reach the requested tolerance."""


class DisconnectedInputWarning(UserWarning):
    """Ranking was requested on a disconnected graph; the stationary
    distribution is not unique outside the largest component."""


class DisconnectedAfterCleaningWarning(UserWarning):
    """Synthetic generation produced a disconnected raw graph; only its
    largest component was kept, so the output is smaller than requested."""
