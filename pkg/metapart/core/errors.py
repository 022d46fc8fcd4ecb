"""
Error hierarchy for metapart

Every error carries a short code and maps to a CLI exit code:
2 config, 3 data, 4 numeric, 5 I/O.
"""


class MetapartError(Exception):
    """Base exception. `code` identifies the failure, `exit_code` the CLI status."""
    exit_code = 1

    def __init__(self, code: str, message: str):
        self.code = code
        self.message = message
        super().__init__(f"[{code}] {message}")


# === Config (exit 2) ===
class ConfigError(MetapartError):
    exit_code = 2

    def __init__(self, message: str, code: str = "CONFIG"):
        super().__init__(code, message)


class ParameterError(ConfigError):
    def __init__(self, message: str):
        super().__init__(message, code="PARAM")


class ScaleError(ConfigError):
    def __init__(self, message: str):
        super().__init__(message, code="SCALE")


class BudgetExceededError(ConfigError):
    def __init__(self, message: str):
        super().__init__(message, code="BUDGET")


# === Data (exit 3) ===
class DataError(MetapartError):
    exit_code = 3

    def __init__(self, message: str, code: str = "DATA"):
        super().__init__(code, message)


class ParseError(DataError):
    """CSV 파싱 실패 (line 번호 포함)"""
    def __init__(self, line: int, message: str):
        self.line = line
        super().__init__(f"line {line}: {message}", code="PARSE")


class InputError(DataError):
    def __init__(self, message: str):
        super().__init__(message, code="INPUT")


class InvariantViolationError(DataError):
    def __init__(self, message: str):
        super().__init__(message, code="INVARIANT")


class DimensionError(DataError):
    def __init__(self, message: str):
        super().__init__(message, code="DIMENSION")


class ContractError(DataError):
    def __init__(self, message: str):
        super().__init__(message, code="CONTRACT")


class EmptyClusterError(DataError):
    def __init__(self, message: str):
        super().__init__(message, code="EMPTY_CLUSTER")


class ConsistencyError(DataError):
    def __init__(self, message: str):
        super().__init__(message, code="STALE_CACHE")


class IndexOutOfRangeError(DataError):
    def __init__(self, message: str):
        super().__init__(message, code="INDEX")


class EmptyInputError(DataError):
    def __init__(self, message: str):
        super().__init__(message, code="EMPTY_INPUT")


# === Numeric (exit 4) ===
class NumericError(MetapartError):
    exit_code = 4

    def __init__(self, message: str, code: str = "NUMERIC"):
        super().__init__(code, message)


class NumericUnderflowError(NumericError):
    def __init__(self, message: str, hint: str = "rescale the kernel bandwidth (sigma)"):
        self.hint = hint
        super().__init__(f"{message}; hint: {hint}", code="UNDERFLOW")


class BalanceError(NumericError):
    def __init__(self, message: str):
        super().__init__(message, code="BALANCE")


class UndefinedNormalizationError(NumericError):
    def __init__(self, message: str):
        super().__init__(message, code="NORMALIZATION")


# === I/O (exit 5) ===
class ReportIOError(MetapartError):
    exit_code = 5

    def __init__(self, message: str):
        super().__init__("IO", message)
