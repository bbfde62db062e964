class GtrsException(Exception):
    pass


class ModelException(GtrsException):
    pass


class DimensionMismatch(ModelException):
    def __init__(self, *args, expected: int, received: int, what: str) -> None:
        super().__init__(*args)
        self.expected = expected
        self.received = received
        self.what = what

    @property
    def error_message(self) -> str:
        return (
            f"Dimension mismatch for {self.what}: "
            f"expected {self.expected}, received {self.received}."
        )

    def __str__(self) -> str:
        return self.error_message

    def __repr__(self) -> str:
        return f"{self.__class__.__name__}({self.error_message})"


class InvalidModelData(ModelException):
    pass


class PreconditionViolation(GtrsException):
    def __init__(self, *args, condition: str, detail: str = "") -> None:
        super().__init__(*args)
        self.condition = condition
        self.detail = detail

    @property
    def error_message(self) -> str:
        message = f"Precondition violated: {self.condition}"
        if self.detail:
            message += f" ({self.detail})"
        return message

    def __str__(self) -> str:
        return self.error_message

    def __repr__(self) -> str:
        return f"{self.__class__.__name__}({self.error_message})"


class NumericalFailure(GtrsException):
    pass


class OracleInfeasible(GtrsException):
    pass


class ParseError(GtrsException):
    def __init__(self, *args, field: str, line: int, reason: str) -> None:
        super().__init__(*args)
        self.field = field
        self.line = line
        self.reason = reason

    @property
    def error_message(self) -> str:
        return f"line {self.line}: field \"{self.field}\": {self.reason}"

    def __str__(self) -> str:
        return self.error_message

    def __repr__(self) -> str:
        return f"{self.__class__.__name__}({self.error_message})"


class InstanceParseError(ParseError):
    pass


class CertificateParseError(ParseError):
    pass
