"""Exception hierarchy.

Every error belongs to one family; the CLI maps families to exit codes.
"""


class SuspError(Exception):
    family = "engine"
    code = "error"
    stage = None        # engine stage that raised, filled in on the way out


# -- parse family -----------------------------------------------------------

class ParseError(SuspError):
    family = "parse"
    code = "syntax"

    def __init__(self, message, position=None, token=None):
        if position is not None:
            message = f"{message} at position {position}"
            if token is not None:
                message += f" (token {token!r})"
        super().__init__(message)
        self.position = position
        self.token = token


class UnknownVariableError(ParseError):
    code = "unknown-variable"


class FormatError(ParseError):
    code = "format"


# -- precondition family ----------------------------------------------------

class PreconditionError(SuspError):
    family = "precondition"
    code = "precondition"


class MissingVariableError(PreconditionError):
    code = "missing-variable"


class NotDivisibleError(PreconditionError):
    code = "not-divisible"


class VariableMismatchError(PreconditionError):
    code = "variable-mismatch"


class ConstantFunctionError(PreconditionError):
    code = "constant-f"


class VariableClashError(PreconditionError):
    code = "variable-clash"


class OffVarietyError(PreconditionError):
    code = "off-variety"

    def __init__(self, message, level=None):
        super().__init__(message)
        self.level = level


class DegenerateInputError(PreconditionError):
    code = "degenerate-input"


class ComponentMismatchError(PreconditionError):
    code = "component-mismatch"


class OutOfRangeError(PreconditionError):
    code = "out-of-range"


class UnsupportedFunctionError(PreconditionError):
    code = "unsupported-function"


# -- engine family ----------------------------------------------------------

class EngineError(SuspError):
    family = "engine"
    code = "engine"


class CapExceededError(EngineError):
    code = "cap-exceeded"


class ExhaustionError(EngineError):
    code = "exhaustion"


class NoRationalPreimageError(EngineError):
    code = "no-rational-preimage"


class NoFlexibleDirectionError(EngineError):
    code = "no-flexible-direction"


class MockUndefinedError(EngineError):
    code = "mock-undefined"


# -- verification family ----------------------------------------------------

class VerificationError(SuspError):
    family = "verification"
    code = "verification"
