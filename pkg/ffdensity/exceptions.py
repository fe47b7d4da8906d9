"""Custom Exception Classes for ffdensity"""


class FFDensityError(Exception):
    """Base exception for all library errors"""
    pass


class DomainError(FFDensityError):
    """Raised when an operation is applied outside its mathematical domain"""
    pass


class UsageError(FFDensityError):
    """Raised when input is malformed or objects from different contexts are mixed"""
    pass


class CapExceededError(DomainError):
    """Raised when an enumeration or exact computation would exceed a configured cap"""
    pass


class InvariantError(FFDensityError):
    """Raised when an internal consistency check fails"""
    pass
