"""Exception hierarchy shared across the package."""


class SketchSceneError(Exception):
    """Base class for all errors raised by this package."""


class InputError(SketchSceneError):
    """A caller-supplied value violates an operation's precondition."""


class ConfigurationError(SketchSceneError):
    """A configuration record is internally inconsistent or mismatched."""


class DataError(SketchSceneError):
    """A dataset, store, or on-disk record is missing or malformed."""


class StateError(SketchSceneError):
    """An operation was invoked on an object in the wrong state (e.g. untrained model)."""


class TrainingDiverged(SketchSceneError):
    """Training hit a non-finite loss; a diagnostic checkpoint was written."""

    def __init__(self, message: str, checkpoint_path=None):
        super().__init__(message)
        self.checkpoint_path = checkpoint_path
