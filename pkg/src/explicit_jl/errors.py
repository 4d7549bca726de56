"""Exception types raised across the package."""


class JLError(ValueError):
    pass


class InvalidParams(JLError):
    pass


class BitsTooShort(JLError):
    pass


class LengthMismatch(JLError):
    pass


class IndexOutOfRange(JLError, IndexError):
    pass


class NonPowerOfTwoLength(JLError):
    pass


class SignDomainTooSmall(JLError):
    pass


class DegenerateRequest(JLError):
    """The sampler would need at least as many points as the domain holds."""


class RangeViolation(JLError):
    pass


class FamilyTooLargeToEnumerate(JLError):
    pass


class SeedSpaceTooLarge(JLError):
    pass
