"""Exception hierarchy.

Every error raised by the package derives from :class:`InterdivError`. The
three intermediate classes map onto CLI exit statuses (config 2, data 3,
network 4); anything else surfacing in the CLI is reported as internal (5).
"""


class InterdivError(Exception):
    exit_code = 5


class ConfigError(InterdivError):
    exit_code = 2


class DataError(InterdivError):
    exit_code = 3


class NetworkError(InterdivError):
    exit_code = 4


# metrics
class EmptyProfileError(DataError):
    pass


class UndefinedDistanceError(DataError):
    pass


class InvalidDiversityError(DataError):
    pass


class InvalidInputError(DataError):
    pass


# corpus
class SchemaError(DataError):
    pass


class ParseError(DataError):
    def __init__(self, message, row=None):
        super().__init__(message)
        self.row = row


class RangeError(DataError):
    pass


# analysis
class EmptyRangeError(DataError):
    pass


class InvalidThresholdError(ConfigError):
    pass


class DegenerateFitError(DataError):
    pass


class InconsistentRowError(DataError):
    pass


# openalex
class FetchError(NetworkError):
    def __init__(self, message, status=None):
        super().__init__(message)
        self.status = status


class PayloadError(DataError):
    pass
