"""Exception hierarchy shared by every stage."""


class ImpactError(RuntimeError):
    """Expected operator or data error."""


class ConfigError(ImpactError):
    """Configuration is missing, malformed or inconsistent."""


class InvalidDoiError(ImpactError, ValueError):
    """A string cannot be normalized into a DOI."""


class NodeRangeError(ImpactError, IndexError):
    """A node ID lies outside ``0 <= id < n``."""


class IngestError(ImpactError):
    """A source cannot be read or yields no usable records."""


class MeasureError(ImpactError):
    """A measure kernel failed; carries the measure label."""

    def __init__(self, measure: str, cause: BaseException):
        super().__init__(f"{measure}: {cause}")
        self.measure = measure
        self.cause = cause


class DumpFormatError(ImpactError):
    """A dump file line violates the two-column format."""

    def __init__(self, path: str, line_number: int, message: str):
        super().__init__(f"{path}:{line_number}: {message}")
        self.path = path
        self.line_number = line_number


class DumpDataError(ImpactError):
    """Scores cannot be represented in the dump format."""


class StoreConsistencyError(ImpactError):
    """Dumps loaded into the score store do not describe the same graph."""


class RequestError(ImpactError):
    """A client request violates the API contract."""


class ParameterError(ImpactError, ValueError):
    """Arguments to an operation are inconsistent."""
