#!/usr/bin/env python3
"""
Runtime settings, built-in family configuration and logging setup.
Values come from environment variables (optionally loaded from a .env file in the
project root) with sensible defaults; built-in families come from config/families.yaml.
"""

import logging
import os
import sys
from datetime import datetime
from pathlib import Path
from typing import Dict, Optional

import yaml
from dotenv import load_dotenv

from errors import ConfigError

PROJECT_ROOT = Path(__file__).parent.parent

# Load .env file from project root (parent of src/)
load_dotenv(PROJECT_ROOT / '.env')

DEFAULT_FAMILIES_FILE = PROJECT_ROOT / 'config' / 'families.yaml'
DEFAULT_LOG_LEVEL = "WARNING"
DEFAULT_SERIES_TERMS = 50

REQUIRED_FAMILY_KEYS = ("weights", "rays", "chenruan")
REQUIRED_CHENRUAN_KEYS = ("generators", "relations", "sectors")


def get_cyclo_order_override() -> Optional[int]:
    """Get the diagnostic cyclotomic order override from WPS_CYCLO_ORDER, if any."""
    value = os.getenv('WPS_CYCLO_ORDER', '').strip()
    if not value:
        return None
    try:
        order = int(value)
    except ValueError:
        logging.getLogger(__name__).warning(f"Ignoring non-integer WPS_CYCLO_ORDER={value!r}")
        return None
    if order < 1:
        logging.getLogger(__name__).warning(f"Ignoring non-positive WPS_CYCLO_ORDER={order}")
        return None
    return order


def get_log_dir() -> Optional[Path]:
    """Get the directory for log files from WPS_LOG_DIR (file logging is off when unset)."""
    value = os.getenv('WPS_LOG_DIR', '').strip()
    return Path(value) if value else None


def get_log_level() -> str:
    """Get the console log level from WPS_LOG_LEVEL, default WARNING."""
    return os.getenv('WPS_LOG_LEVEL', DEFAULT_LOG_LEVEL).strip().upper()


def get_families_path() -> Path:
    """Get the path of the built-in families file (WPS_FAMILIES_FILE overrides)."""
    value = os.getenv('WPS_FAMILIES_FILE', '').strip()
    return Path(value) if value else DEFAULT_FAMILIES_FILE


def get_series_terms() -> int:
    """Get the truncation degree used for series cross-checks (WPS_SERIES_TERMS, default 50)."""
    value = os.getenv('WPS_SERIES_TERMS', '').strip()
    if not value:
        return DEFAULT_SERIES_TERMS
    try:
        return max(1, int(value))
    except ValueError:
        return DEFAULT_SERIES_TERMS


def load_families(path: Path = None) -> Dict[str, dict]:
    """
    Load the built-in families from YAML.

    Args:
        path: Optional path to the families file. Defaults to get_families_path().

    Returns:
        Dictionary family key -> family definition, e.g.
        {
            'p1344': {
                'name': 'P(1,3,4,4)',
                'weights': [1, 3, 4, 4],
                'rays': [[0, -1, -1], ...],
                'chenruan': {'generators': [...], 'relations': [...], 'sectors': {...}}
            }
        }
    """
    path = Path(path) if path else get_families_path()
    if not path.exists():
        raise ConfigError(f"Families file not found: {path}")

    with open(path, 'r', encoding='utf-8') as f:
        try:
            config = yaml.safe_load(f) or {}
        except yaml.YAMLError as e:
            raise ConfigError(f"Cannot parse families file {path}: {e}") from e

    families = config.get('families')
    if not isinstance(families, dict):
        raise ConfigError(f"Families file {path} has no 'families' mapping")

    for key, family in families.items():
        missing = [k for k in REQUIRED_FAMILY_KEYS if k not in family]
        if missing:
            raise ConfigError(f"Family '{key}' is missing keys: {', '.join(missing)}")
        missing = [k for k in REQUIRED_CHENRUAN_KEYS if k not in family['chenruan']]
        if missing:
            raise ConfigError(f"Family '{key}' chenruan block is missing keys: {', '.join(missing)}")

    return families


def setup_logging(name: str = 'wps') -> logging.Logger:
    """Set up logging to the console (stderr) and, when WPS_LOG_DIR is set, to a file."""
    logger = logging.getLogger()
    logger.setLevel(logging.DEBUG)

    # Remove existing handlers
    logger.handlers = []

    # Console handler (less verbose); stdout is reserved for reports
    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(getattr(logging, get_log_level(), logging.WARNING))
    console_handler.setFormatter(logging.Formatter('%(message)s'))
    logger.addHandler(console_handler)

    log_dir = get_log_dir()
    if log_dir:
        log_dir.mkdir(parents=True, exist_ok=True)
        log_file = log_dir / f"{name}_{datetime.now().strftime('%Y%m%d_%H%M%S')}.log"
        file_handler = logging.FileHandler(log_file, encoding='utf-8')
        file_handler.setLevel(logging.DEBUG)
        file_handler.setFormatter(logging.Formatter(
            '%(asctime)s | %(levelname)-8s | %(name)s | %(message)s',
            datefmt='%Y-%m-%d %H:%M:%S'
        ))
        logger.addHandler(file_handler)
        logger.info(f"Logging initialized. Log file: {log_file}")

    return logging.getLogger(name)
