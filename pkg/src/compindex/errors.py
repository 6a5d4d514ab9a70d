"""Exception types raised across the pipeline."""


class CompIndexError(Exception):
    """Base class for all errors raised by compindex."""


class MissingColumn(CompIndexError):
    pass


class UnitUndeclared(CompIndexError):
    pass


class MalformedRow(CompIndexError):
    def __init__(self, path, line: int, message: str):
        self.path = str(path)
        self.line = line
        super().__init__(f"{self.path}:{line}: {message}")


class NromIncomplete(CompIndexError):
    pass


class EmptyInterval(CompIndexError):
    pass


class CountMismatch(CompIndexError):
    pass


class SubjectCountMismatch(CountMismatch):
    pass


class LengthMismatch(CountMismatch):
    pass


class TooFewPoints(CompIndexError):
    pass


class DegenerateWithinScatter(CompIndexError):
    """Within-class scatter is zero, so the separability ratio is undefined."""


class FlaggedComponent(CompIndexError):
    pass


class AllCellsFlagged(CompIndexError):
    pass


class UnknownMetric(CompIndexError):
    pass


class UnreachableTarget(CompIndexError):
    pass


class ConfigError(CompIndexError):
    pass
