"""Exception types shared across the toolkit."""


class DataError(ValueError):
    """Malformed or inconsistent input data."""


class ParseError(DataError):
    """A file could not be parsed; the message names the offending row."""


class FormatError(DataError):
    """Structurally parseable file whose contents violate the format contract."""


class DegenerateSpectrumError(DataError):
    """Operation undefined for a constant (zero-range) spectrum."""


class GridMismatchError(DataError):
    """Spectra on different wavenumber grids were combined."""


class ShapeError(DataError):
    """Vector width does not match the grid or model width."""


class OutOfRangeError(DataError):
    """Resampling target lies outside the source support."""


class StratificationError(DataError):
    """A class is missing or too small for the requested stratified split."""


class LabelError(DataError):
    """Labels violate an operation's precondition."""


class ReportShapeError(DataError):
    """A report lacks the fields required by the requested projection."""


class StateError(RuntimeError):
    """Model used before it was fitted or loaded."""


class ConfigError(ValueError):
    """Invalid experiment or CLI configuration."""


class DivergenceError(ArithmeticError):
    """Training produced a non-finite loss."""

    def __init__(self, epoch, message=None):
        self.epoch = epoch
        super().__init__(message or f"non-finite loss at epoch {epoch}")
