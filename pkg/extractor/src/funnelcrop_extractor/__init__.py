"""Attention-dump extraction adapter for multimodal models."""

from .capture import PROMPT_TEMPLATE, localization_prompt
from .errors import (ExtractionError, ImageSpanError, ModelLoadError,
                     ResourceExhaustedError)
from .extractor import ExtractionJob, extract
from .validate import validate_dump, validate_dump_doc

__version__ = "0.1.0"

__all__ = [
    "ExtractionError", "ExtractionJob", "ImageSpanError", "ModelLoadError",
    "PROMPT_TEMPLATE", "ResourceExhaustedError", "extract",
    "localization_prompt", "validate_dump", "validate_dump_doc",
]
