"""Custom exceptions for interfere"""


class InterfereError(Exception):
    """Base class for every error raised by interfere"""
    pass


class ConfigValidationError(InterfereError):
    """Raised when configuration validation fails"""
    pass


class ConfigNotFoundError(InterfereError):
    """Raised when configuration file is not found"""
    pass


class ParameterError(InterfereError, ValueError):
    """Raised when a numeric parameter is outside its valid range"""
    pass


class GraphError(InterfereError, ValueError):
    """Raised for invalid graphs or generator parameters"""
    pass


class GraphFormatError(GraphError):
    """Raised when an edge list cannot be parsed"""

    def __init__(self, message: str, line_no: int = 0):
        self.line_no = line_no
        if line_no:
            message = f"line {line_no}: {message}"
        super().__init__(message)


class DegenerateAssignmentError(InterfereError, ValueError):
    """Raised when an assignment leaves a treatment arm too small"""
    pass


class EnumerationLimitError(InterfereError, ValueError):
    """Raised when exhaustive enumeration is requested above the size cap"""
    pass


class RedrawBudgetExceeded(InterfereError):
    """Raised when degenerate-assignment redraws exhaust the per-cell budget"""
    pass


class SampleError(InterfereError, ValueError):
    """Raised when a sample is too small or degenerate for a statistic"""
    pass
