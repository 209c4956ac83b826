"""Exceptions raised by charcycle.

Every exception carries a short machine-readable ``code`` that ends up in
the JSON report, and an optional ``details`` dict with the data needed to
diagnose the failure (positions, residuals, tail samples, ...).
"""

__all__ = [
    "CharCycleError",
    "PolynomialParseError", "UnknownVariableError", "DimensionMismatchError",
    "CapExceededError", "NotZeroDimensionalError", "UndecidedError",
    "SmoothPointError", "PreconditionError",
    "DegenerateCombinationError", "IllConditionedError",
    "DegenerateMorseError", "SingularFiberError",
    "NotStabilizedError",
    "MissingEulerRowError", "PosetError", "PosetMismatchError",
    "MissingMorseDataError",
]


class CharCycleError(Exception):
    code = "error"

    def __init__(self, message, **details):
        super().__init__(message)
        self.message = message
        self.details = details

    def as_dict(self):
        out = {"code": self.code, "message": self.message}
        if self.details:
            out["details"] = {k: _plain(v) for k, v in self.details.items()}
        return out


def _plain(value):
    # Details must survive json.dumps
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (int, float, str, bool)) or value is None:
        return value
    return str(value)


class PolynomialParseError(CharCycleError, ValueError):
    code = "parse-error"

    def __init__(self, message, position):
        super().__init__(f"{message} (at position {position})", position = position)
        self.position = position


class UnknownVariableError(CharCycleError, ValueError):
    code = "unknown-variable"


class DimensionMismatchError(CharCycleError, ValueError):
    code = "dimension-mismatch"


class CapExceededError(CharCycleError, RuntimeError):
    code = "cap-exceeded"


class NotZeroDimensionalError(CharCycleError, ValueError):
    code = "infinite-quotient"


class UndecidedError(CharCycleError, RuntimeError):
    code = "undecided"


class SmoothPointError(CharCycleError, ValueError):
    code = "smooth-point"


class PreconditionError(CharCycleError, ValueError):
    code = "precondition"


class DegenerateCombinationError(CharCycleError, ArithmeticError):
    code = "degenerate-combination"


class IllConditionedError(CharCycleError, ArithmeticError):
    code = "ill-conditioned"

    def __init__(self, message, worst_residual, **details):
        super().__init__(message, worst_residual = worst_residual, **details)
        self.worst_residual = worst_residual


class DegenerateMorseError(CharCycleError, ArithmeticError):
    code = "degenerate-Morse"


class SingularFiberError(CharCycleError, ValueError):
    code = "singular-fiber"


class NotStabilizedError(CharCycleError, RuntimeError):
    code = "not-stabilized"

    def __init__(self, message, tail):
        super().__init__(message, tail = tail)
        self.tail = tail


class MissingEulerRowError(CharCycleError, KeyError):
    code = "missing-eu-row"

    def __str__(self):
        # KeyError would otherwise repr() the message
        return self.message


class PosetError(CharCycleError, ValueError):
    code = "poset-cycle"


class PosetMismatchError(CharCycleError, ValueError):
    code = "poset-mismatch"


class MissingMorseDataError(CharCycleError, KeyError):
    code = "missing-morse-data"

    def __str__(self):
        return self.message
