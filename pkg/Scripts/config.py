# config.py
# Run configuration: q-orders, tolerances, sampling seeds and feature toggles, optionally from YAML.

from __future__ import annotations
from dataclasses import dataclass, fields, asdict
from pathlib import Path
from typing import Any, Dict, Optional

import yaml

from errors import ConfigurationError

# ------------------------------
# Feature Toggles
# ------------------------------
ENABLE_RUN_LOG  = True
ENABLE_PROGRESS = True

# ------------------------------
# Config values
# ------------------------------
DEFAULT_QORDER = 40
DEFAULT_TOLERANCE = 1e-8
DEFAULT_IM_TAU_FLOOR = 0.5
MAX_RANK = 4
MAX_COVER_LENGTH = 12
MAX_FLAG_RANK = 3


@dataclass
class ToolkitConfig:
    qorder: int = DEFAULT_QORDER            # truncation order N for theta series
    tolerance: float = DEFAULT_TOLERANCE    # relative tolerance for numeric identities
    im_tau_floor: float = DEFAULT_IM_TAU_FLOOR
    seed: int = 0                           # property-sampling seed
    samples: int = 50                       # random samples per verify command
    cover_margin: int = 8                   # extra q-order for cover divisibility
    max_refinements: int = 4                # working-order doublings before "indeterminate"
    max_rank: int = MAX_RANK
    max_cover_length: int = MAX_COVER_LENGTH
    log_file: Optional[str] = None          # run log (hash-chained JSONL); None disables
    progress: bool = False                  # tqdm bars on stderr

    def __post_init__(self):
        if int(self.qorder) < 0:
            raise ConfigurationError("qorder must be non-negative", {"qorder": self.qorder})
        if not float(self.tolerance) > 0:
            raise ConfigurationError("tolerance must be positive", {"tolerance": self.tolerance})
        if not float(self.im_tau_floor) > 0:
            raise ConfigurationError("im_tau_floor must be positive", {"im_tau_floor": self.im_tau_floor})
        if int(self.samples) < 1:
            raise ConfigurationError("samples must be at least 1", {"samples": self.samples})
        if int(self.max_refinements) < 0 or int(self.cover_margin) < 0:
            raise ConfigurationError("cover_margin and max_refinements must be non-negative")
        if not 1 <= int(self.max_rank) <= MAX_RANK:
            raise ConfigurationError(f"max_rank must lie in 1..{MAX_RANK}", {"max_rank": self.max_rank})
        if not 0 <= int(self.max_cover_length) <= MAX_COVER_LENGTH:
            raise ConfigurationError(f"max_cover_length must lie in 0..{MAX_COVER_LENGTH}")

    # Copy with selected fields replaced (None values are ignored)
    def with_overrides(self, **overrides: Any) -> "ToolkitConfig":
        merged = asdict(self)
        merged.update({k: v for k, v in overrides.items() if v is not None})
        return ToolkitConfig(**merged)


# Load a YAML mapping over the defaults; unknown keys are rejected
def load_config(path: Optional[str]) -> ToolkitConfig:
    if path is None:
        return ToolkitConfig()
    p = Path(path)
    if not p.exists():
        raise ConfigurationError(f"config file not found: {p}")
    with open(p, "r", encoding="utf-8") as f:
        raw = yaml.safe_load(f) or {}
    if not isinstance(raw, dict):
        raise ConfigurationError("config file must hold a mapping")
    known = {f.name for f in fields(ToolkitConfig)}
    unknown = sorted(set(raw) - known)
    if unknown:
        raise ConfigurationError("unknown config keys", {"keys": unknown})
    return ToolkitConfig(**raw)


def config_to_dict(cfg: ToolkitConfig) -> Dict[str, Any]:
    return asdict(cfg)
