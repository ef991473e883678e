from .handlers import (
    handle_prismforge_error,
    log_performance,
    PrismForgeError,
    InputError,
    PolynomialSyntaxError,
    UnknownVariableError,
    NegativeExponentError,
    ContextMismatchError,
    MissingImageError,
    InvalidLiftError,
    SpecFileError,
    UnsupportedOperationError,
    AlgebraError,
    NotDivisibleError,
    DenominatorError,
    LevelError,
    NotPhiMonomialError,
    ResourceLimitError,
    NotStabilizedError,
    InconclusiveMembershipError,
    HypothesisError,
)

__all__ = [
    "handle_prismforge_error",
    "log_performance",
    "PrismForgeError",
    "InputError",
    "PolynomialSyntaxError",
    "UnknownVariableError",
    "NegativeExponentError",
    "ContextMismatchError",
    "MissingImageError",
    "InvalidLiftError",
    "SpecFileError",
    "UnsupportedOperationError",
    "AlgebraError",
    "NotDivisibleError",
    "DenominatorError",
    "LevelError",
    "NotPhiMonomialError",
    "ResourceLimitError",
    "NotStabilizedError",
    "InconclusiveMembershipError",
    "HypothesisError",
]
