class EamkitError(Exception):
    """Base class for computation failures."""


class CapExceededError(EamkitError):
    pass


class ConvergenceError(EamkitError):
    pass


class DegeneracyError(EamkitError):
    pass


class TableFormatError(EamkitError):
    """Malformed or incomplete table/EAM file."""


class DegeneracyWarning(UserWarning):
    pass
