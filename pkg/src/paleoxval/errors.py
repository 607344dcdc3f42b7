"""Exception hierarchy shared by all modules."""


class PaleoXvalError(Exception):
    """Base class for all library errors."""


class DegenerateColumn(PaleoXvalError):
    """A proxy column has (near-)zero variance over the calibration rows."""

    def __init__(self, column_ids):
        self.column_ids = tuple(column_ids)
        super().__init__(
            f"zero-variance column(s) over calibration rows: {', '.join(self.column_ids)}"
        )


class LengthMismatch(PaleoXvalError):
    """Two vectors that must be equally long are not."""


class SingularSystem(PaleoXvalError):
    """The shifted calibration system could not be factorized."""


class DegenerateTrace(PaleoXvalError):
    """tr(I - H(lambda)) is numerically zero; the GCV score is undefined."""


class InvalidBlockLength(PaleoXvalError):
    """Holdout block length outside 2 <= n_v < n."""


class BlockMismatch(PaleoXvalError):
    """Two reports do not share the same block structure."""


class BlockFailure(PaleoXvalError):
    """A holdout block failed during a strict-mode experiment run."""

    def __init__(self, block_start, cause):
        self.block_start = block_start
        self.cause = cause
        super().__init__(f"block at start {block_start} failed: {cause}")


class ParseError(PaleoXvalError):
    """A CSV file is malformed."""

    def __init__(self, path, line_no, message):
        self.path = str(path)
        self.line_no = line_no
        super().__init__(f"{path}:{line_no}: {message}")


class NonAnnualYears(PaleoXvalError):
    """Year column is not strictly increasing with unit step."""


class NonFiniteValue(PaleoXvalError):
    """A data value is NaN or infinite."""


class YearMismatch(PaleoXvalError):
    """Proxy-file years do not match the target years exactly."""


class ConfigError(PaleoXvalError):
    """An experiment config file is invalid."""
