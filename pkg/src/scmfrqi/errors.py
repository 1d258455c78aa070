"""Exception types raised across the package."""


class ParseError(ValueError):
    def __init__(self, message, offset):
        super().__init__(f"{message} (at byte offset {offset})")
        self.offset = offset


class UnsupportedDepthError(ValueError):
    pass


class CapacityError(ValueError):
    """A value or register does not fit the available qubits."""


class CoherenceError(RuntimeError):
    """Idealized reset would discard amplitude on the aux=0 partner."""


class ExtractionError(ValueError):
    pass


class NonBasisEncodingError(ExtractionError):
    pass


class ResidualEntanglementError(ExtractionError):
    pass
