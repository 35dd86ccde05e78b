"""Exception hierarchy shared by every module."""


class InvalidInputError(ValueError):
    """Raised when an argument violates an operation's preconditions."""


class FrequencyRangeError(InvalidInputError):
    def __init__(self, class_id, frequency, low, high):
        self.class_id = class_id
        self.frequency = frequency
        super().__init__(
            f"class {class_id}: frequency {frequency} Hz outside [{low}, {high}] Hz"
        )


class FrequencySpacingError(InvalidInputError):
    def __init__(self, pair, gap, min_gap):
        self.pair = pair
        self.gap = gap
        (ca, fa), (cb, fb) = pair
        super().__init__(
            f"classes {ca} ({fa} Hz) and {cb} ({fb} Hz) are {gap:.4g} Hz apart, "
            f"minimum spacing is {min_gap} Hz"
        )


class ParseError(ValueError):
    """A protocol or file line could not be parsed; ``offset`` is the byte offset."""

    def __init__(self, message, offset=0, line=None):
        self.offset = offset
        self.line = line
        self.message = message
        super().__init__(message)

    def __str__(self):
        return f"{self.message} (at byte {self.offset})"


class UnknownRecordError(ParseError):
    """The first token of a protocol line is not a known record type."""


class RssiRangeError(ValueError):
    pass


class UnknownDeviceError(KeyError):
    pass
