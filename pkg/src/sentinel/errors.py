"""Exception hierarchy for the sentinel toolkit."""


class SentinelError(Exception):
    """Base class for all toolkit errors."""


class MalformedRow(SentinelError):
    """A data row has the wrong field count or a non-numeric field."""

    def __init__(self, line_no: int, reason: str):
        self.line_no = line_no
        self.reason = reason
        super().__init__(f"line {line_no}: {reason}")


class NonContiguousCycles(SentinelError):
    """A unit's cycle numbers have a gap or duplicate."""

    def __init__(self, unit_id: int, detail: str):
        self.unit_id = unit_id
        super().__init__(f"unit {unit_id}: {detail}")


class DegenerateSplit(SentinelError):
    """Healthy segment too short to cut a single window."""


class InsufficientData(SentinelError):
    """Fewer rows than model parameters when fitting a regressor."""


class SegmentTooShort(SentinelError):
    """Segment shorter than the window length."""


class DimensionMismatch(SentinelError):
    """Array shapes disagree with the model or each other."""


class InsufficientWindows(SentinelError):
    """Not enough windows to form a train/validation split."""


class InsufficientScores(SentinelError):
    """Fewer than two scores supplied for threshold calibration."""


class LabelMismatch(SentinelError):
    """Prediction and label window populations differ."""


class EmptyEvaluation(SentinelError):
    """No windows to evaluate."""


class MissingArtifact(SentinelError):
    """A required persisted artifact does not exist."""


class ConfigMismatch(SentinelError):
    """An artifact's config digest differs from the active config."""
