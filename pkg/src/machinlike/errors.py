"""Exception types shared across the package."""

from __future__ import annotations


class MachinError(Exception):
    """Base class for all package errors."""


class MeasureUndefined(MachinError):
    pass


class PoleError(MachinError, ZeroDivisionError):
    """Tangent addition hit an odd multiple of pi/2."""


class NotTwoOver(MachinError, ValueError):
    pass


class WindingUnresolved(MachinError):
    pass


class NotSmooth(MachinError, ValueError):
    pass


class LimitTooLarge(MachinError, ValueError):
    pass


class InvalidInput(MachinError, ValueError):
    pass


class Exhausted(MachinError):
    """No further mask with the same popcount fits the index width."""


class DigitCapExceeded(MachinError):
    """Alferov completion produced a denominator above the configured cap.

    ``partial`` holds the terms emitted before the cap was hit.
    """

    def __init__(self, message: str, partial=None, remainder=None):
        super().__init__(message)
        self.partial = list(partial or [])
        self.remainder = remainder


class NotCertified(MachinError, ValueError):
    pass
