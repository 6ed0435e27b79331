"""HuggingFace glue: load a direct-projection multimodal model, run the
localization prompt with greedy decoding, and hand back the final LLM
layer's first-generated-token attention plus the input token ids."""

import os

import numpy as np
from PIL import Image

from .errors import ImageSpanError, ModelLoadError, ResourceExhaustedError
from .extractor import MODEL_CACHE_ENV


class HFBackend:
    def __init__(self, model_id, device="cpu"):
        cache = os.environ.get(MODEL_CACHE_ENV)
        if cache:
            os.environ.setdefault("HF_HOME", cache)
        try:
            import torch
            from transformers import AutoModelForImageTextToText, AutoProcessor
        except ImportError as exc:
            raise ModelLoadError(f"torch/transformers unavailable: {exc}") from exc
        self.torch = torch
        try:
            self.processor = AutoProcessor.from_pretrained(model_id)
            self.model = AutoModelForImageTextToText.from_pretrained(
                model_id, attn_implementation="eager").to(device).eval()
        except Exception as exc:
            raise ModelLoadError(f"cannot load {model_id}: {exc}") from exc
        self.device = device

    def _image_token_id(self):
        for attr in ("image_token_index", "image_token_id"):
            value = getattr(self.model.config, attr, None)
            if value is not None:
                return int(value)
        raise ImageSpanError("model config exposes no image token id")

    def _grid_dims(self):
        vision = getattr(self.model.config, "vision_config", None)
        if vision is None:
            return None, None
        size = getattr(vision, "image_size", None)
        patch = getattr(vision, "patch_size", None)
        if size and patch and size % patch == 0:
            side = size // patch
            return side, side
        return None, None

    def run_localization(self, image_path, prompt):
        torch = self.torch
        image = Image.open(image_path).convert("RGB")
        messages = [{"role": "user", "content": [
            {"type": "image"}, {"type": "text", "text": prompt}]}]
        text = self.processor.apply_chat_template(messages, add_generation_prompt=True)
        inputs = self.processor(images=image, text=text,
                                return_tensors="pt").to(self.device)
        try:
            with torch.no_grad():
                out = self.model.generate(
                    **inputs, max_new_tokens=1, do_sample=False,
                    output_attentions=True, return_dict_in_generate=True)
        except torch.cuda.OutOfMemoryError as exc:
            raise ResourceExhaustedError(str(exc)) from exc
        # First generation step, final LLM layer: (batch, heads, q, seq).
        step_attn = out.attentions[0][-1]
        head_attn = step_attn[0, :, -1, :].to(torch.float64).cpu().numpy()
        input_ids = inputs["input_ids"][0].tolist()
        head_attn = head_attn[:, :len(input_ids)]
        rows, cols = self._grid_dims()
        return {
            "head_attn": np.asarray(head_attn),
            "input_ids": input_ids,
            "image_token_id": self._image_token_id(),
            "grid_rows": rows,
            "grid_cols": cols,
            "image_width": image.width,
            "image_height": image.height,
        }
