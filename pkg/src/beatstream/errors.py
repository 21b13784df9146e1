"""Exception hierarchy.

The CLI maps the four branch roots to exit codes: ConfigError -> 2,
SourceError -> 3, StorageError -> 4, WireError -> 5.
"""


class BeatstreamError(Exception):
    """Base class for all package errors."""


class ConfigError(BeatstreamError):
    """Invalid parameter, mode or run configuration."""


class SessionNameError(ConfigError):
    """A session file name violates the 8.3 naming rules."""


class StemLengthError(SessionNameError):
    """Name stem is empty or longer than 8 characters."""


class StemCharacterError(SessionNameError):
    """Name stem contains a character outside [A-Z0-9_-]."""


class ExtensionError(SessionNameError):
    """Missing or unsupported file extension (only csv/txt)."""


class TrainingError(ConfigError):
    """Calibration stream cannot train the detector."""


class SampleOrderError(BeatstreamError):
    """Sample index is not the previous index + 1 (dropped/duplicated)."""


class InsufficientDataError(BeatstreamError):
    """Too few events for the requested statistic."""


class UndefinedMetricError(BeatstreamError):
    """Metric denominator is zero."""


class UnsortedInputError(BeatstreamError):
    """Matching requires time-sorted inputs."""


class SourceError(BeatstreamError):
    """Sample source unreachable or unparseable."""


class IngestParseError(SourceError):
    """A line of an input file failed to parse."""

    def __init__(self, message, line_no=None):
        super().__init__(message)
        self.line_no = line_no


class StorageError(BeatstreamError):
    """Session storage failed; carries the durably written record count."""

    def __init__(self, message, records_durable=0):
        super().__init__(message)
        self.records_durable = records_durable


class QueueOverflowError(StorageError):
    """Bounded logging queue is full; records would be lost."""


class WireError(BeatstreamError):
    """Trigger wire transport failure."""


class FrameDecodeError(BeatstreamError):
    """A wire line failed to decode (recoverable; resync at next newline)."""


class UnknownTagError(FrameDecodeError):
    pass


class FieldCountError(FrameDecodeError):
    pass


class FieldValueError(FrameDecodeError):
    pass


class MissingNewlineError(FrameDecodeError):
    pass
