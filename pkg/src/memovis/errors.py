"""Exception types shared across the package."""


class MemovisError(Exception):
    """Base class for all package-specific errors."""


class SceneLoadError(MemovisError):
    """A scene file could not be read or contains unusable geometry."""

    def __init__(self, path, reason: str):
        self.path = str(path)
        self.reason = reason
        super().__init__(f"{self.path}: {reason}")


class AdapterError(MemovisError):
    """A model adapter call failed (transport, timeout, or bad response)."""

    def __init__(self, capability: str, reason: str):
        self.capability = capability
        self.reason = reason
        super().__init__(f"{capability}: {reason}")


class NoObjectError(AdapterError):
    """The segmentation backend returned zero candidate regions."""

    def __init__(self, capability: str = "segment_box"):
        super().__init__(capability, "no object found in box")


class IndexNotReadyError(MemovisError):
    """A suggestion query arrived before the viewpoint index was built."""


class JobConflictError(MemovisError):
    """A job was submitted while another one holds the same exclusive slot."""


class PipelineError(MemovisError):
    """A modifier pipeline failed; carries the stage where it happened."""

    def __init__(self, stage: str, reason: str):
        self.stage = stage
        self.reason = reason
        super().__init__(f"stage '{stage}': {reason}")
