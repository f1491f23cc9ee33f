"""Shared exception types."""


class ContractViolation(ValueError):
    """An operation was called outside its documented contract."""


class TrainingDiverged(RuntimeError):
    """A training loss became non-finite."""

    def __init__(self, iteration: int, message: str = ""):
        self.iteration = iteration
        super().__init__(message or f"non-finite loss at iteration {iteration}")


class StageError(RuntimeError):
    """A pipeline stage failed; carries the stage tag for CLI exit reporting."""

    def __init__(self, stage: str, message: str):
        self.stage = stage
        super().__init__(f"[{stage}] {message}")
