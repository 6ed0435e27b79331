import numpy as np
import pytest

from funnelcrop_extractor.capture import (PROMPT_TEMPLATE,
                                          average_heads_first_token,
                                          build_connector_dump,
                                          build_grid_dump,
                                          grid_dims_for_token_count,
                                          image_token_span,
                                          localization_prompt)
from funnelcrop_extractor.errors import ImageSpanError
from funnelcrop_extractor.validate import validate_dump_doc

IMG_TOKEN = 32000


def make_sequence(n_image_tokens, prefix=3, suffix=5):
    return [1] * prefix + [IMG_TOKEN] * n_image_tokens + [7] * suffix


class TestPrompt:
    def test_template_substitution(self):
        q = "what color is the sign?"
        assert localization_prompt(q) == \
            f"To answer '{q}', where in the image should I look?"
        assert localization_prompt(q) == PROMPT_TEMPLATE.format(question=q)

    def test_empty_question_rejected(self):
        with pytest.raises(ValueError):
            localization_prompt("  ")


class TestImageTokenSpan:
    def test_contiguous_span_found(self):
        ids = make_sequence(4)
        assert image_token_span(ids, IMG_TOKEN) == [3, 4, 5, 6]

    def test_missing_span_is_hard_error(self):
        with pytest.raises(ImageSpanError):
            image_token_span([1, 2, 3], IMG_TOKEN)

    def test_non_contiguous_span_rejected(self):
        ids = [1, IMG_TOKEN, 2, IMG_TOKEN]
        with pytest.raises(ImageSpanError):
            image_token_span(ids, IMG_TOKEN)


class TestGridDims:
    def test_reported_dims_must_factor(self):
        assert grid_dims_for_token_count(24, 4, 6) == (4, 6)
        with pytest.raises(ImageSpanError):
            grid_dims_for_token_count(25, 4, 6)

    def test_square_fallback(self):
        assert grid_dims_for_token_count(576) == (24, 24)
        with pytest.raises(ImageSpanError):
            grid_dims_for_token_count(15)


class TestHeadAverage:
    def test_mean_over_heads(self):
        attn = np.array([[0.2, 0.8], [0.4, 0.6]])
        np.testing.assert_allclose(average_heads_first_token(attn), [0.3, 0.7])

    def test_shape_checked(self):
        with pytest.raises(ValueError):
            average_heads_first_token(np.zeros(5))


class TestBuildGridDump:
    def _capture(self, rows=4, cols=4, heads=3, seed=0):
        rng = np.random.default_rng(seed)
        ids = make_sequence(rows * cols)
        attn = rng.random((heads, len(ids)))
        return attn, ids

    def test_dump_passes_validation(self):
        attn, ids = self._capture()
        doc = build_grid_dump(attn, ids, IMG_TOKEN, 4, 4, 640, 480,
                              {"model_id": "m"})
        assert validate_dump_doc(doc).ok
        assert doc["image"] == {"width": 640, "height": 480}
        assert len(doc["grid"]["weights"]) == 16

    def test_weights_are_sliced_head_means(self):
        attn, ids = self._capture()
        doc = build_grid_dump(attn, ids, IMG_TOKEN, 4, 4, 640, 480, {})
        expected = attn.mean(axis=0)[3:19]
        np.testing.assert_allclose(doc["grid"]["weights"], expected)

    def test_weights_normalize_to_one(self):
        attn, ids = self._capture(seed=5)
        doc = build_grid_dump(attn, ids, IMG_TOKEN, 4, 4, 640, 480, {})
        w = np.array(doc["grid"]["weights"])
        assert abs((w / w.sum()).sum() - 1.0) <= 1e-6

    def test_deterministic(self):
        attn, ids = self._capture(seed=9)
        a = build_grid_dump(attn, ids, IMG_TOKEN, 4, 4, 640, 480, {"m": "x"})
        b = build_grid_dump(attn.copy(), list(ids), IMG_TOKEN, 4, 4, 640, 480,
                            {"m": "x"})
        assert a == b

    def test_token_count_grid_mismatch(self):
        attn, ids = self._capture()
        with pytest.raises(ImageSpanError):
            build_grid_dump(attn, ids, IMG_TOKEN, 5, 5, 640, 480, {})


class TestBuildConnectorDump:
    def test_valid_factors(self):
        rng = np.random.default_rng(3)
        ids = make_sequence(8)
        attn = rng.random((2, len(ids)))
        mat = rng.random((8, 12))
        doc = build_connector_dump(attn, ids, IMG_TOKEN, mat, 3, 4, 320, 240,
                                   {"model_id": "qformer"})
        assert validate_dump_doc(doc).ok
        assert len(doc["connector"]["tokens"]) == 8
        assert len(doc["connector"]["token_to_patch"]) == 8

    def test_matrix_shape_checked(self):
        rng = np.random.default_rng(4)
        ids = make_sequence(8)
        attn = rng.random((2, len(ids)))
        with pytest.raises(ValueError):
            build_connector_dump(attn, ids, IMG_TOKEN, rng.random((7, 12)),
                                 3, 4, 320, 240, {})
        with pytest.raises(ValueError):
            build_connector_dump(attn, ids, IMG_TOKEN, rng.random((8, 11)),
                                 3, 4, 320, 240, {})
