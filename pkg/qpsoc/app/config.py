"""
Settings for qpsoc.
Settings are stored in ~/.qpsoc/settings.json (or $QPSOC_SETTINGS_DIR/settings.json)
and merged over DEFAULT_SETTINGS.
"""

import json
import logging
import os
from pathlib import Path
from typing import Optional

from dotenv import load_dotenv
from pydantic import BaseModel

load_dotenv()

logger = logging.getLogger(__name__)

# Default settings
DEFAULT_SETTINGS = {
    "adapter": "cvxpy",              # "cvxpy" | "null" | "cvxpy:<SOLVER>"
    "cvxpy_solver": "CLARABEL",
    # Numerical tolerances
    "perspective_tol": 1e-12,
    "support_tol": 1e-9,
    "feasibility_tol": 1e-6,
    # Tree decomposition budget for width and plus-node spread
    "td_budget": 16,
    # Oracle
    "grid_step": 1e-3,
    "oracle_max_free_nodes": 24,
    "oracle_max_points": 2 ** 26,
    "sample_seed": 0,
    # Reports
    "significant_digits": 12,
    "max_workers": 4,
}


class SettingsModel(BaseModel):
    adapter: str = "cvxpy"
    cvxpy_solver: Optional[str] = "CLARABEL"
    perspective_tol: float = 1e-12
    support_tol: float = 1e-9
    feasibility_tol: float = 1e-6
    td_budget: int = 16
    grid_step: float = 1e-3
    oracle_max_free_nodes: int = 24
    oracle_max_points: int = 2 ** 26
    sample_seed: int = 0
    significant_digits: int = 12
    max_workers: int = 4


def settings_dir() -> Path:
    """Directory holding settings.json; QPSOC_SETTINGS_DIR overrides the home default."""
    override = os.getenv("QPSOC_SETTINGS_DIR")
    if override:
        return Path(override)
    return Path.home() / ".qpsoc"


def settings_file() -> Path:
    return settings_dir() / "settings.json"


def load_settings() -> SettingsModel:
    """Load settings from JSON file, return defaults if not found."""
    result = DEFAULT_SETTINGS.copy()
    path = settings_file()

    if path.exists():
        try:
            with open(path, "r") as f:
                # Merge with defaults to handle new fields
                result.update(json.load(f))
        except (json.JSONDecodeError, IOError) as e:
            logger.warning("Ignoring unreadable settings file %s: %s", path, e)

    adapter = os.getenv("QPSOC_ADAPTER")
    if adapter:
        result["adapter"] = adapter

    return SettingsModel(**result)


def save_settings(settings: SettingsModel) -> Path:
    """Save settings to JSON file."""
    path = settings_file()
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as f:
        json.dump(settings.model_dump(), f, indent=2)
    return path
