class ConstructionFailed(RuntimeError):
    """Every attempted hash seed produced a hypergraph that does not peel."""


class FormatError(ValueError):
    """A serialized filter could not be decoded."""

    def __init__(self, message: str, field: str, offset: int):
        super().__init__(f"{message} (field {field!r} at byte offset {offset})")
        self.field = field
        self.offset = offset


class BadMagic(FormatError):
    pass


class UnsupportedVersion(FormatError):
    pass


class UnknownKind(FormatError):
    pass


class TruncatedPayload(FormatError):
    pass


class TrailingData(FormatError):
    pass
