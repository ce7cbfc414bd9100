"""Exception hierarchy.

Anything deriving from :class:`StepFailure` aborts the current transaction
and is turned into a ``Reverted`` outcome by the ledger. Other errors signal
caller bugs or bad configuration and propagate.
"""


class SecPlfError(Exception):
    """Base class for every error raised by this package."""


class StepFailure(SecPlfError):
    """A transaction step could not be applied; the transaction reverts."""


class ZeroAmount(StepFailure):
    pass


class UnknownAsset(StepFailure):
    pass


class UnknownPool(StepFailure):
    pass


class DrainedPool(StepFailure):
    pass


class InsufficientBalance(StepFailure):
    pass


class InsufficientProviderReserve(StepFailure):
    pass


class DuplicateLoan(StepFailure):
    pass


class NoOpenLoan(StepFailure):
    pass


class OpenLoanAtCommit(StepFailure):
    pass


class InsufficientRepayment(StepFailure):
    pass


class CollateralMismatch(StepFailure):
    pass


class OverLimit(StepFailure):
    pass


class InsufficientPlfLiquidity(StepFailure):
    pass


class UnknownPosition(StepFailure):
    pass


class BadStepReference(StepFailure):
    pass


class BlockMismatch(SecPlfError):
    """Transaction targets a block other than the current one."""


class GuardError(SecPlfError):
    pass


class NonPositiveOracle(GuardError):
    pass


class StaleBlock(GuardError):
    """Guard queried with a block older than its stored state (ordering bug)."""


class InvalidPlan(SecPlfError):
    pass


class ConfigError(SecPlfError):
    """Scenario file failed validation. ``path`` points at the offending field."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


class AnalyzerError(SecPlfError):
    pass


class ParseError(AnalyzerError):
    def __init__(self, row: int, content: str, message: str = "cannot parse row"):
        super().__init__(f"row {row}: {message}: {content!r}")
        self.row = row
        self.content = content


class NonPositivePrice(ParseError):
    def __init__(self, row: int, content: str):
        super().__init__(row, content, "close price must be positive")


class EmptySeries(AnalyzerError):
    pass


class OutOfRange(AnalyzerError):
    pass


class SeriesTooShort(AnalyzerError):
    pass
