"""Extraction job orchestration: run the localization prompt through a
backend, capture first-response-token attention, and write a dump file."""

import json
import os
import tempfile
from dataclasses import dataclass, field

from .capture import build_grid_dump, localization_prompt
from .errors import ImageSpanError
from .validate import validate_dump_doc

MODEL_CACHE_ENV = "FUNNELCROP_MODEL_CACHE"


@dataclass(frozen=True)
class ExtractionJob:
    model_id: str
    image_path: str
    question: str
    out_path: str
    device: str = "cpu"
    extra_provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.question or not self.question.strip():
            raise ValueError("question must be non-empty")
        if not os.path.isfile(self.image_path):
            raise ValueError(f"image not readable: {self.image_path}")


def _write_atomic(doc, out_path):
    # Never leave a partial dump behind: write to a temp file in the target
    # directory, then rename into place.
    out_dir = os.path.dirname(os.path.abspath(out_path)) or "."
    fd, tmp = tempfile.mkstemp(dir=out_dir, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=2)
            fh.write("\n")
        os.replace(tmp, out_path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def extract(job, backend=None):
    """Run one localization pass and write the attention dump.

    ``backend`` defaults to the HuggingFace backend; tests inject fakes.
    Returns the written document.
    """
    if backend is None:
        from .hf_backend import HFBackend

        backend = HFBackend(job.model_id, device=job.device)
    prompt = localization_prompt(job.question)
    capture = backend.run_localization(job.image_path, prompt)
    provenance = {
        "model_id": job.model_id,
        "prompt": prompt,
        "question": job.question,
        **job.extra_provenance,
    }
    doc = build_grid_dump(
        head_attn=capture["head_attn"],
        input_ids=capture["input_ids"],
        image_token_id=capture["image_token_id"],
        grid_rows=capture.get("grid_rows"),
        grid_cols=capture.get("grid_cols"),
        image_width=capture["image_width"],
        image_height=capture["image_height"],
        provenance=provenance,
    )
    report = validate_dump_doc(doc)
    if not report.ok:
        raise ImageSpanError("captured dump fails schema validation: "
                             + "; ".join(report.problems))
    _write_atomic(doc, job.out_path)
    return doc
