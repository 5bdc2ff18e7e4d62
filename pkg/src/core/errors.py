class SeptensorError(Exception):
    kind = "error"

    def __init__(self, message: str, **details):
        super().__init__(message)
        self.details = details

    def to_payload(self) -> dict:
        return {"kind": self.kind, "message": str(self), "details": self.details}


class InvalidArgument(SeptensorError, ValueError):
    kind = "invalid-argument"


class InvalidState(SeptensorError, ValueError):
    kind = "invalid-state"


class InvalidChannel(SeptensorError, ValueError):
    kind = "invalid-channel"


class NotAState(SeptensorError, ValueError):
    kind = "not-a-state"


class NumericFailure(SeptensorError, ArithmeticError):
    kind = "numeric-failure"


class InfeasibleRebuild(SeptensorError):
    kind = "infeasible-rebuild"


class PreconditionViolation(SeptensorError):
    kind = "precondition-violation"
