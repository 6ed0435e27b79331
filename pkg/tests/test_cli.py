import json
from pathlib import Path

import numpy as np
import pytest

from funnelcrop.cli import main
from funnelcrop.dumpfile import (dump_from_dict, dump_to_dict, load_dump,
                                 save_dump, validate_dump_dict)
from funnelcrop.errors import InvalidInputError

FIXTURES = Path(__file__).parent / "fixtures"


def run(argv, capsys=None):
    code = main(argv)
    return code


class TestDumpFormat:
    def test_round_trip(self, tmp_path):
        dump = load_dump(FIXTURES / "scene_dump.json")
        path = tmp_path / "copy.json"
        save_dump(dump, path)
        assert load_dump(path) == dump

    def test_connector_round_trip(self, tmp_path):
        dump = load_dump(FIXTURES / "scene_dump_connector.json")
        path = tmp_path / "copy.json"
        save_dump(dump, path)
        assert load_dump(path) == dump

    def test_negative_weight_rejected(self):
        with pytest.raises(InvalidInputError):
            load_dump(FIXTURES / "scene_dump_bad.json")

    def test_grid_and_connector_exclusive(self):
        doc = json.loads((FIXTURES / "scene_dump.json").read_text())
        doc["connector"] = json.loads(
            (FIXTURES / "scene_dump_connector.json").read_text())["connector"]
        problems = validate_dump_dict(doc)
        assert any("exactly one" in p for p in problems)

    def test_shape_mismatch_reported_with_field(self):
        doc = json.loads((FIXTURES / "scene_dump.json").read_text())
        doc["grid"]["weights"] = doc["grid"]["weights"][:-1]
        problems = validate_dump_dict(doc)
        assert any("grid.weights" in p for p in problems)

    def test_dict_round_trip(self):
        doc = json.loads((FIXTURES / "scene_dump.json").read_text())
        assert dump_to_dict(dump_from_dict(doc)) == doc


class TestGenerate:
    def test_golden_manifest_byte_identical(self, tmp_path):
        out = tmp_path / "out"
        code = main(["generate", "--image", str(FIXTURES / "scene.png"),
                     "--attn", str(FIXTURES / "scene_dump.json"),
                     "--out", str(out), "--resolution", "224"])
        assert code == 0
        got = (out / "manifest.json").read_bytes()
        assert got == (FIXTURES / "golden_manifest.json").read_bytes()
        for k in range(3):
            assert (out / f"crop_{k}.png").exists()

    def test_manifest_deterministic_across_runs(self, tmp_path):
        argv = ["generate", "--image", str(FIXTURES / "scene.png"),
                "--attn", str(FIXTURES / "scene_dump.json"), "--resolution", "224"]
        main(argv + ["--out", str(tmp_path / "a")])
        main(argv + ["--out", str(tmp_path / "b")])
        assert (tmp_path / "a/manifest.json").read_bytes() == \
            (tmp_path / "b/manifest.json").read_bytes()

    def test_corrupt_dump_no_partial_output(self, tmp_path, capsys):
        out = tmp_path / "out"
        code = main(["generate", "--image", str(FIXTURES / "scene.png"),
                     "--attn", str(FIXTURES / "scene_dump_bad.json"),
                     "--out", str(out)])
        assert code == 1
        assert not out.exists()
        err = capsys.readouterr().err.strip()
        assert json.loads(err)["error"] == "invalid-input"

    def test_one_hot_manifest_values(self, tmp_path):
        dump = {
            "version": 1,
            "image": {"width": 2000, "height": 2000},
            "grid": {"rows": 4, "cols": 4,
                     "weights": [1.0] + [0.0] * 15},
        }
        dump_path = tmp_path / "onehot.json"
        dump_path.write_text(json.dumps(dump))
        from PIL import Image

        img_path = tmp_path / "img.png"
        Image.fromarray(np.zeros((2000, 2000, 3), dtype=np.uint8)).save(img_path)
        out = tmp_path / "out"
        assert main(["generate", "--image", str(img_path), "--attn",
                     str(dump_path), "--out", str(out),
                     "--resolution", "336"]) == 0
        doc = json.loads((out / "manifest.json").read_text())
        assert doc["h_norm"] == 0.0
        alphas = [c["alpha"] for c in doc["crops"][1:]]
        assert alphas == pytest.approx([1.2, 1.6])
        sides = [c["side_requested"] for c in doc["crops"]]
        assert sides == [336, 403, 538]

    def test_k0_empty_crop_list(self, tmp_path):
        out = tmp_path / "out"
        assert main(["generate", "--image", str(FIXTURES / "scene.png"),
                     "--attn", str(FIXTURES / "scene_dump.json"),
                     "--out", str(out), "--levels", "0"]) == 0
        doc = json.loads((out / "manifest.json").read_text())
        assert doc["crops"] == []
        assert doc["order"] == ["original"]
        assert not list(out.glob("crop_*.png"))

    def test_connector_dump_composed_in_core(self, tmp_path):
        out = tmp_path / "out"
        assert main(["generate", "--image", str(FIXTURES / "scene.png"),
                     "--attn", str(FIXTURES / "scene_dump_connector.json"),
                     "--out", str(out)]) == 0
        doc = json.loads((out / "manifest.json").read_text())
        assert doc["grid"] == {"rows": 4, "cols": 4}

    def test_topk_mode(self, tmp_path):
        out = tmp_path / "out"
        assert main(["generate", "--image", str(FIXTURES / "scene.png"),
                     "--attn", str(FIXTURES / "scene_dump.json"),
                     "--out", str(out), "--mode", "topk:3",
                     "--resolution", "160"]) == 0
        doc = json.loads((out / "manifest.json").read_text())
        assert doc["mode"] == "topk:3"
        assert len(doc["crops"]) == 3
        scores = [c["score"] for c in doc["crops"]]
        assert scores == sorted(scores, reverse=True)

    def test_overlay_written_on_request(self, tmp_path):
        out = tmp_path / "out"
        assert main(["generate", "--image", str(FIXTURES / "scene.png"),
                     "--attn", str(FIXTURES / "scene_dump.json"),
                     "--out", str(out), "--overlay"]) == 0
        assert (out / "overlay.png").exists()

    def test_image_dump_dim_mismatch(self, tmp_path, capsys):
        doc = json.loads((FIXTURES / "scene_dump.json").read_text())
        doc["image"]["width"] = 99
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps(doc))
        out = tmp_path / "out"
        assert main(["generate", "--image", str(FIXTURES / "scene.png"),
                     "--attn", str(bad), "--out", str(out)]) == 1
        assert not out.exists()

    def test_config_file_with_flag_override(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"resolution": 128, "levels": 2,
                                   "level_params": [[1.3, 0.5]]}))
        out = tmp_path / "out"
        assert main(["generate", "--image", str(FIXTURES / "scene.png"),
                     "--attn", str(FIXTURES / "scene_dump.json"),
                     "--out", str(out), "--config", str(cfg),
                     "--resolution", "96"]) == 0
        doc = json.loads((out / "manifest.json").read_text())
        assert doc["config"]["resolution"] == 96  # flag beats file
        assert doc["config"]["levels"] == 2
        assert doc["config"]["level_params"] == [[1.3, 0.5]]

    def test_beta_gamma_overrides(self, tmp_path):
        out = tmp_path / "out"
        assert main(["generate", "--image", str(FIXTURES / "scene.png"),
                     "--attn", str(FIXTURES / "scene_dump.json"),
                     "--out", str(out), "--beta", "1=1.4", "--gamma", "2=0.0"]) == 0
        doc = json.loads((out / "manifest.json").read_text())
        assert doc["config"]["level_params"] == [[1.4, 0.6], [1.6, 0.0]]


def write_listing(tmp_path, entries):
    listing = tmp_path / "list.json"
    listing.write_text(json.dumps(entries))
    return listing


class TestBatch:
    def test_three_valid_pairs(self, tmp_path):
        pair = {"image": str(FIXTURES / "scene.png"),
                "dump": str(FIXTURES / "scene_dump.json")}
        listing = write_listing(tmp_path, [pair, pair, pair])
        out = tmp_path / "out"
        assert main(["batch", "--list", str(listing), "--out", str(out)]) == 0
        doc = json.loads((out / "summary.json").read_text())
        assert doc["total"] == 3 and doc["succeeded"] == 3 and doc["failed"] == 0
        assert len(list(out.glob("0*/manifest.json"))) == 3
        assert (out / "hnorm_hist.png").exists()

    def test_partial_failure_exit_code(self, tmp_path):
        good = {"image": str(FIXTURES / "scene.png"),
                "dump": str(FIXTURES / "scene_dump.json")}
        bad = {"image": str(FIXTURES / "scene.png"),
               "dump": str(FIXTURES / "scene_dump_bad.json")}
        listing = write_listing(tmp_path, [good, good, bad])
        out = tmp_path / "out"
        assert main(["batch", "--list", str(listing), "--out", str(out)]) == 2
        doc = json.loads((out / "summary.json").read_text())
        assert doc["succeeded"] == 2 and doc["failed"] == 1
        statuses = [p["status"] for p in doc["pairs"]]
        assert statuses == ["ok", "ok", "failed"]

    def test_total_failure_exit_code(self, tmp_path):
        bad = {"image": str(FIXTURES / "scene.png"),
               "dump": str(FIXTURES / "scene_dump_bad.json")}
        listing = write_listing(tmp_path, [bad])
        assert main(["batch", "--list", str(listing),
                     "--out", str(tmp_path / "out")]) == 1

    def test_empty_listing_success(self, tmp_path):
        listing = write_listing(tmp_path, [])
        out = tmp_path / "out"
        assert main(["batch", "--list", str(listing), "--out", str(out)]) == 0
        doc = json.loads((out / "summary.json").read_text())
        assert doc["total"] == 0 and doc["h_norm"]["count"] == 0

    def test_unreadable_listing(self, tmp_path, capsys):
        assert main(["batch", "--list", str(tmp_path / "missing.json"),
                     "--out", str(tmp_path / "out")]) == 1


class TestSweep:
    def _run(self, tmp_path, configs=None):
        out = tmp_path / "sweep"
        argv = ["sweep", "--image", str(FIXTURES / "scene.png"),
                "--attn", str(FIXTURES / "scene_dump.json"),
                "--out", str(out), "--resolution", "224"]
        if configs:
            argv += ["--configs", configs]
        assert main(argv) == 0
        import csv

        with open(out / "sweep.csv", newline="") as fh:
            rows = list(csv.DictReader(fh))
        return out, rows

    def test_k_sweep_crop_counts(self, tmp_path):
        _, rows = self._run(tmp_path, "k0,k1,k2,k3,k4")
        assert [int(r["levels"]) for r in rows] == [0, 1, 2, 3, 4]
        for r in rows:
            filled = [k for k in range(5) if r.get(f"side_{k}")]
            assert len(filled) == int(r["levels"])
        assert [int(r["extrapolated"]) for r in rows] == [0, 0, 0, 0, 1]

    def test_static_vs_default_sides(self, tmp_path):
        _, rows = self._run(tmp_path, "static,default")
        static, default = rows
        h = float(static["h_norm"])
        assert h > 0
        # Static sides equal the zero-entropy sides.
        assert int(static["side_1"]) == round(1.2 * 224)
        assert int(static["side_2"]) == round(1.6 * 224)
        assert int(default["side_1"]) > int(static["side_1"])
        assert int(default["side_2"]) > int(static["side_2"])

    def test_beta_plus_shift(self, tmp_path):
        import math

        _, rows = self._run(tmp_path, "beta+0.2")
        row = rows[0]
        h = float(row["h_norm"])
        assert int(row["side_1"]) == math.floor((1.4 + 0.6 * h) * 224 + 0.5)

    def test_custom_tuple(self, tmp_path):
        _, rows = self._run(tmp_path, "2@1.5:0.0")
        assert int(rows[0]["levels"]) == 2
        assert int(rows[0]["side_1"]) == round(1.5 * 224)

    def test_unknown_label_lists_valid(self, tmp_path, capsys):
        out = tmp_path / "sweep"
        code = main(["sweep", "--image", str(FIXTURES / "scene.png"),
                     "--attn", str(FIXTURES / "scene_dump.json"),
                     "--out", str(out), "--configs", "bogus"])
        assert code == 1
        err = json.loads(capsys.readouterr().err.strip())
        assert "static" in err["message"] and "k4" in err["message"]

    def test_figure_written(self, tmp_path):
        out, _ = self._run(tmp_path)
        assert (out / "sweep.png").exists()
        assert (out / "sweep.csv").exists()
