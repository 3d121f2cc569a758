"""Exception types raised across the package.

Every exception carries a short machine-readable ``code`` that the command
line front end writes to stderr.
"""

from __future__ import annotations


class WalkError(ValueError):
    code = "WalkError"


class NonUnitary(WalkError):
    code = "NonUnitary"


class DegenerateCoin(WalkError):
    code = "DegenerateCoin"


class DeltaOutOfRange(WalkError):
    code = "DeltaOutOfRange"


class ParityViolation(WalkError):
    code = "ParityViolation"


class InvalidInitialState(WalkError):
    code = "InvalidInitialState"


class UndefinedTransitionReached(WalkError):
    code = "UndefinedTransitionReached"


class DomainError(WalkError):
    code = "DomainError"


class DegenerateVector(WalkError):
    code = "DegenerateVector"


class QuadratureFailure(WalkError):
    code = "QuadratureFailure"


class EmptyWindow(WalkError):
    code = "EmptyWindow"
