"""Exceptions and warnings raised by the halfwave package."""


class HalfWaveError(Exception):
    """Base class for every error raised by halfwave."""


class DomainError(HalfWaveError):
    pass


class PoleOnGrid(HalfWaveError):
    pass


class VelocityOutOfRange(HalfWaveError):
    pass


class BandTooSmall(HalfWaveError):
    pass


class ZeroOffdiagonal(HalfWaveError):
    pass


class SimplicityViolation(HalfWaveError):
    pass


class QLConvergenceError(HalfWaveError):
    pass


class StructureMismatch(HalfWaveError):
    pass


class NotInRange(HalfWaveError):
    pass


class ConstraintRankDeficient(HalfWaveError):
    pass


class VelocityZero(HalfWaveError):
    pass


class PoleProximity(HalfWaveError):
    pass


class StabilityViolation(HalfWaveError):
    pass


class ConfigError(HalfWaveError):
    pass


class UsageError(HalfWaveError):
    """Invalid command line usage. The CLI exits with code 2."""


class SpectralTailWarning(UserWarning):
    """The top of the resolved band carries a noticeable share of the norm."""
