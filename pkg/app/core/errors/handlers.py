# app/core/errors/handlers.py
from typing import Optional, Dict, Any
from fastapi import HTTPException
import logging
from datetime import datetime, timezone

logger = logging.getLogger("prismforge")


class PrismForgeError(Exception):
    """Base exception for prismforge errors"""

    exit_code = 2

    def __init__(self, message: str, error_code: str, details: Optional[Dict] = None):
        super().__init__(message)
        self.error_code = error_code
        self.details = details or {}
        self.timestamp = datetime.now(timezone.utc)

        logger.debug(f"raised {error_code}: {message}")

    def log(self, level: int = logging.ERROR):
        logger.log(
            level,
            f"Error {self.error_code}: {self}",
            extra={
                "error_code": self.error_code,
                "details": self.details,
                "timestamp": self.timestamp,
            },
        )

    def to_payload(self) -> Dict[str, Any]:
        return {
            "error_code": self.error_code,
            "message": str(self),
            "details": {k: str(v) for k, v in self.details.items()},
            "exit_code": self.exit_code,
        }


class InputError(PrismForgeError):
    """Malformed input: polynomial text, spec files, contexts"""

    def __init__(self, message: str, stage: str, **kwargs):
        super().__init__(
            message=message,
            error_code=f"INPUT_{stage.upper()}",
            details=kwargs,
        )


class PolynomialSyntaxError(InputError):
    def __init__(self, message: str, text: str, position: int):
        self.position = position
        super().__init__(
            f"{message} at position {position}",
            stage="syntax",
            text=text,
            position=position,
        )


class UnknownVariableError(InputError):
    def __init__(self, name: str, position: Optional[int] = None):
        self.name = name
        self.position = position
        where = f" at position {position}" if position is not None else ""
        super().__init__(
            f"unknown variable '{name}'{where}",
            stage="unknown_variable",
            name=name,
            position=position,
        )


class NegativeExponentError(InputError):
    def __init__(self, exponent: int, position: Optional[int] = None):
        self.position = position
        where = f" at position {position}" if position is not None else ""
        super().__init__(
            f"negative exponent {exponent}{where}",
            stage="negative_exponent",
            exponent=exponent,
            position=position,
        )


class ContextMismatchError(InputError):
    def __init__(self, left: Any, right: Any):
        super().__init__(
            f"context mismatch: {left} vs {right}",
            stage="context_mismatch",
            left=left,
            right=right,
        )


class MissingImageError(InputError):
    def __init__(self, variable: str):
        self.variable = variable
        super().__init__(
            f"no image given for variable '{variable}'",
            stage="missing_image",
            variable=variable,
        )


class InvalidLiftError(InputError):
    """φ(X) - X^p has a coefficient prime to p"""

    def __init__(self, variable: str, witness: Any, monomial: Any = None):
        self.variable = variable
        self.witness = witness
        super().__init__(
            f"invalid Frobenius lift at '{variable}': coefficient {witness} of "
            f"phi({variable}) - {variable}^p is not divisible by p",
            stage="invalid_lift",
            variable=variable,
            witness=witness,
            monomial=monomial,
        )


class SpecFileError(InputError):
    def __init__(self, message: str, **kwargs):
        super().__init__(message, stage="spec_file", **kwargs)


class UnsupportedOperationError(InputError):
    def __init__(self, message: str, **kwargs):
        super().__init__(message, stage="unsupported", **kwargs)


class AlgebraError(PrismForgeError):
    """Arithmetic preconditions that fail on well-formed input"""

    def __init__(self, message: str, operation: str, **kwargs):
        super().__init__(
            message=message,
            error_code=f"ALG_{operation.upper()}",
            details=kwargs,
        )


class NotDivisibleError(AlgebraError):
    def __init__(self, coefficient: Any, monomial: Any, divisor: int):
        self.coefficient = coefficient
        self.monomial = monomial
        super().__init__(
            f"coefficient {coefficient} of {monomial} is not divisible by {divisor}",
            operation="not_divisible",
            coefficient=coefficient,
            monomial=monomial,
            divisor=divisor,
        )


class DenominatorError(AlgebraError):
    def __init__(self, coefficient: Any, modulus: int):
        super().__init__(
            f"denominator of {coefficient} is not invertible modulo {modulus}",
            operation="denominator",
            coefficient=coefficient,
            modulus=modulus,
        )


class LevelError(AlgebraError):
    def __init__(self, message: str, level: int):
        super().__init__(message, operation="level", level=level)


class NotPhiMonomialError(AlgebraError):
    def __init__(self, monomial: Any):
        self.monomial = monomial
        super().__init__(
            f"{monomial} is not a phi-monomial under the active lift",
            operation="not_phi_monomial",
            monomial=monomial,
        )


class ResourceLimitError(PrismForgeError):
    """A configured cap was exceeded; the computation stopped without an answer"""

    exit_code = 3

    def __init__(self, limit: str, value: int, cap: int):
        self.limit = limit
        super().__init__(
            f"resource bound exceeded: {limit} reached {value} (cap {cap})",
            error_code=f"RES_{limit.upper()}",
            details={"limit": limit, "value": value, "cap": cap},
        )


class NotStabilizedError(PrismForgeError):
    exit_code = 3

    def __init__(self, max_iter: int, partial: Any = None):
        self.max_iter = max_iter
        self.partial = partial
        super().__init__(
            f"delta-stabilization did not terminate within {max_iter} iterations",
            error_code="DELTA_NOT_STABILIZED",
            details={"max_iter": max_iter},
        )


class InconclusiveMembershipError(PrismForgeError):
    exit_code = 3

    def __init__(self, element: Any, reason: str):
        self.element = element
        super().__init__(
            f"membership of {element} is inconclusive: {reason}",
            error_code="GB_INCONCLUSIVE",
            details={"element": element, "reason": reason},
        )


class HypothesisError(PrismForgeError):
    """A theorem hypothesis failed on a valid input"""

    exit_code = 1

    def __init__(self, message: str, component: str, **kwargs):
        self.component = component
        super().__init__(
            message=message,
            error_code=f"HYP_{component.upper()}",
            details=kwargs,
        )


def handle_prismforge_error(error: Exception) -> HTTPException:
    """Convert exceptions to appropriate HTTP responses"""
    if isinstance(error, PrismForgeError):
        error.log()
        if isinstance(error, (InputError, AlgebraError)):
            status_code = 400
        elif isinstance(error, HypothesisError):
            status_code = 422
        else:
            status_code = 507
        return HTTPException(
            status_code=status_code,
            detail={
                **error.to_payload(),
                "timestamp": error.timestamp.isoformat(),
            },
        )

    # Unexpected errors
    logger.error("Unexpected error", exc_info=error)
    return HTTPException(
        status_code=500,
        detail={
            "error_code": "UNEXPECTED_ERROR",
            "message": "An unexpected error occurred",
            "timestamp": datetime.now(timezone.utc).isoformat(),
        },
    )


def log_performance(operation: str, start_time: datetime, **kwargs):
    """Log performance metrics"""
    duration = (datetime.now(timezone.utc) - start_time).total_seconds()
    logger.info(
        f"Performance: {operation}",
        extra={
            "operation": operation,
            "duration_seconds": duration,
            "parameters": kwargs,
            "timestamp": start_time.isoformat(),
        },
    )
