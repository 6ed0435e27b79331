"""Extraction failure classes, one per distinct failure mode."""


class ExtractionError(Exception):
    """Base class for extraction failures."""


class ModelLoadError(ExtractionError):
    """The model or its processor could not be loaded."""


class ImageSpanError(ExtractionError):
    """The image-token span could not be identified in the input sequence."""


class ResourceExhaustedError(ExtractionError):
    """The device ran out of memory during the forward pass."""
