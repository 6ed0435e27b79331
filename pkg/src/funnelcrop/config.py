"""Run configuration: defaults, config-file loading, flag overrides, and the
named sweep presets."""

import json
import re
from dataclasses import dataclass

from .errors import InvalidInputError
from .manifest import DEFAULT_PRECISION
from .portfolio import (DEFAULT_LEVELS, DEFAULT_RESOLUTION, ScaleConfig,
                        default_level_params)

MODE_RE = re.compile(r"^(funnel|static|topk:[1-9][0-9]*)$")


@dataclass(frozen=True)
class RunConfig:
    resolution: int = DEFAULT_RESOLUTION
    levels: int = DEFAULT_LEVELS
    level_params: tuple = default_level_params(DEFAULT_LEVELS)
    mode: str = "funnel"
    out_dir: str = "."
    overlay: bool = False
    precision: int = DEFAULT_PRECISION
    window_side: int = None  # top-k window; defaults to resolution

    def __post_init__(self):
        if not MODE_RE.match(self.mode):
            raise InvalidInputError(
                f"mode {self.mode!r} must be funnel, static, or topk:N")
        if self.precision < 0:
            raise InvalidInputError("precision must be >= 0")
        object.__setattr__(self, "level_params",
                           tuple((float(b), float(g)) for b, g in self.level_params))

    @property
    def topk(self):
        if not self.mode.startswith("topk:"):
            return None
        return int(self.mode.split(":", 1)[1])

    def scale_config(self):
        cfg = ScaleConfig(self.resolution, self.levels, self.level_params)
        if self.mode == "static":
            cfg = cfg.with_zero_sensitivity()
        return cfg

    def effective_window_side(self):
        return self.window_side if self.window_side is not None else self.resolution


def load_config_file(path):
    """RunConfig fields from a JSON config file (unknown keys rejected)."""
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidInputError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise InvalidInputError("config file must hold a JSON object")
    allowed = {"resolution", "levels", "level_params", "mode", "out_dir",
               "overlay", "precision", "window_side"}
    unknown = set(doc) - allowed
    if unknown:
        raise InvalidInputError(f"unknown config keys: {sorted(unknown)}")
    if "level_params" in doc:
        doc["level_params"] = tuple(tuple(p) for p in doc["level_params"])
    return doc


def build_run_config(file_values=None, **overrides):
    """Merge defaults, config-file values, and flag overrides (flags win)."""
    values = dict(file_values or {})
    values.update({k: v for k, v in overrides.items() if v is not None})
    levels = values.get("levels", DEFAULT_LEVELS)
    if "level_params" not in values:
        values["level_params"] = default_level_params(levels)
    elif len(values["level_params"]) != max(levels - 1, 0):
        raise InvalidInputError(
            f"{levels} levels require {max(levels - 1, 0)} expansion pairs")
    try:
        return RunConfig(**values)
    except TypeError as exc:
        raise InvalidInputError(str(exc)) from exc


def apply_param_overrides(level_params, betas, gammas, levels):
    """Apply per-level base/sensitivity overrides given as {level: value}."""
    params = [list(p) for p in level_params]
    for which, mapping in (("base", betas or {}), ("sensitivity", gammas or {})):
        for k, v in mapping.items():
            if not (1 <= k <= len(params)):
                raise InvalidInputError(
                    f"{which} override for level {k} outside 1..{levels - 1}")
            params[k - 1][0 if which == "base" else 1] = float(v)
    return tuple(tuple(p) for p in params)


def _preset(label, levels=DEFAULT_LEVELS, params=None, extrapolated=False):
    if params is None:
        params = default_level_params(levels)
    return {"label": label, "levels": levels,
            "level_params": tuple(params), "extrapolated": extrapolated}


SWEEP_PRESETS = {
    "static": _preset("static", params=((1.2, 0.0), (1.6, 0.0))),
    "weak": _preset("weak", params=((1.2, 0.3), (1.6, 0.6))),
    "default": _preset("default"),
    "strong": _preset("strong", params=((1.2, 0.9), (1.6, 1.8))),
    "beta-0.2": _preset("beta-0.2", params=((1.0, 0.6), (1.4, 1.2))),
    "beta+0.2": _preset("beta+0.2", params=((1.4, 0.6), (1.8, 1.2))),
    "k0": _preset("k0", levels=0),
    "k1": _preset("k1", levels=1),
    "k2": _preset("k2", levels=2),
    "k3": _preset("k3", levels=3),
    "k4": _preset("k4", levels=4, extrapolated=True),
}

# Custom sweep entries: "K@b1:g1,b2:g2,..." with K-1 pairs.
CUSTOM_RE = re.compile(r"^([0-9]+)@(.*)$")


def parse_sweep_spec(spec):
    """A sweep entry: a preset label or a custom 'K@b1:g1,...' tuple."""
    if spec in SWEEP_PRESETS:
        return SWEEP_PRESETS[spec]
    m = CUSTOM_RE.match(spec)
    if not m:
        raise InvalidInputError(
            f"unknown sweep config {spec!r}; valid labels: "
            f"{', '.join(SWEEP_PRESETS)} or custom 'K@b1:g1,b2:g2,...'")
    levels = int(m.group(1))
    pairs = []
    body = m.group(2)
    if body:
        for part in body.split(","):
            try:
                b, g = part.split(":")
                pairs.append((float(b), float(g)))
            except ValueError as exc:
                raise InvalidInputError(f"bad expansion pair {part!r} in {spec!r}") from exc
    if len(pairs) != max(levels - 1, 0):
        raise InvalidInputError(
            f"custom sweep {spec!r}: {levels} levels require "
            f"{max(levels - 1, 0)} expansion pairs, got {len(pairs)}")
    return _preset(spec, levels=levels, params=tuple(pairs))
