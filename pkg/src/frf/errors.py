"""Exception hierarchy shared across the toolkit."""


class FrfError(Exception):
    """Base class for all toolkit errors."""


class MeshError(FrfError):
    """Invalid mesh topology, geometry, or file content."""


class DivisionError(FrfError):
    """Seed-driven division failed; the caller should re-seed.

    Carries the offending vertex when the failure is a path crossing.
    """

    def __init__(self, message, vertex=None):
        super().__init__(message)
        self.vertex = vertex


class TemplateError(FrfError):
    """Template construction or constraint generation failed."""


class SolveError(FrfError):
    """Linear solve failed (singular system, non-finite solution)."""


class TransferError(FrfError):
    """Map-to-map data transfer failed (template mismatch, missing ids)."""


class StageError(FrfError):
    """Pipeline failure tagged with the stage that raised it."""

    def __init__(self, stage, cause):
        super().__init__(f"[{stage}] {cause}")
        self.stage = stage
        self.cause = cause
