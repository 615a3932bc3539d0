# -*- coding: utf-8 -*-

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_NO_CONVERGENCE = 2
EXIT_BAD_CONFIG = 3


class FockBoundsError(Exception):
    exit_code = EXIT_VALIDATION


class ValidationError(FockBoundsError):
    pass


class ExtentTooSmall(ValidationError):
    pass


class EnvelopeMissing(ValidationError):
    pass


class TailNotCertified(ValidationError):
    pass


class RadiusTooSmall(ValidationError):
    pass


class RegimeError(ValidationError):
    pass


class OutOfRegime(ValidationError):
    pass


class AreaMismatch(ValidationError):
    pass


class RimNotNegligible(ValidationError):
    pass


class DivergenceError(ValidationError):
    pass


class AsymmetricZeroSet(ValidationError):
    pass


class NoIntegerInRange(ValidationError):
    pass


class ZeroWindowCenter(ValidationError):
    pass


class NoConvergence(FockBoundsError):
    exit_code = EXIT_NO_CONVERGENCE

    def __init__(self, message, last_residual=None, iterations=None):
        FockBoundsError.__init__(self, message)
        self.last_residual = last_residual
        self.iterations = iterations


class ConfigError(FockBoundsError):
    exit_code = EXIT_BAD_CONFIG
