"""
Helper utilities for the Unruh pair-production simulator
"""

import os
import json
import logging
import math
from typing import Dict, List, Any, Optional

import pandas as pd

from utils.errors import ConfigError

VERSION = "1.0.0"

CSV_FLOAT_FORMAT = "%.12e"


def ensure_output_dir(path: str) -> str:
    """Create the output directory if needed and return it"""
    if path and not os.path.exists(path):
        os.makedirs(path)
    return path


def save_data(file_path: str, data: Any) -> bool:
    """Save data to JSON file"""
    try:
        directory = os.path.dirname(file_path)
        if directory and not os.path.exists(directory):
            os.makedirs(directory)

        with open(file_path, 'w', encoding='utf-8') as f:
            json.dump(data, f, indent=2, ensure_ascii=False, sort_keys=True)
            f.write("\n")
        return True
    except Exception as e:
        logging.error(f"Failed to save data to {file_path}: {e}")
        return False


def load_run_config(file_path: str) -> Dict:
    """Load a run config, failing loudly instead of falling back to a default"""
    if not os.path.exists(file_path):
        raise ConfigError(f"config file not found: {file_path}")
    try:
        with open(file_path, 'r', encoding='utf-8') as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise ConfigError(f"invalid JSON in {file_path}: {e}") from e
    if not isinstance(data, dict):
        raise ConfigError(f"top level of {file_path} must be an object")
    return data


def load_sidecar(file_path: str) -> Dict:
    """Load the JSON sidecar an earlier run wrote next to its table"""
    sidecar = load_run_config(file_path)
    missing = [key for key in ("scenario", "parameters") if key not in sidecar]
    if missing:
        raise ConfigError(f"{file_path} is not a run sidecar, missing {', '.join(missing)}", field="rerun")
    if not isinstance(sidecar["parameters"], dict):
        raise ConfigError(f"parameters in {file_path} must be an object", field="rerun")
    return sidecar


def load_config() -> Dict:
    """Load configuration from environment"""
    threads = os.getenv('UNRUH_SIM_THREADS', '1')
    try:
        threads = max(1, int(threads))
    except ValueError:
        logging.warning(f"Ignoring non-integer UNRUH_SIM_THREADS={threads!r}")
        threads = 1

    config = {
        'output_dir': os.getenv('UNRUH_SIM_OUTPUT_DIR', 'output'),
        'log_level': os.getenv('UNRUH_SIM_LOG_LEVEL', 'INFO'),
        'threads': threads,
        'logs_dir': os.getenv('UNRUH_SIM_LOG_DIR', 'logs'),
    }

    return config


def write_csv(file_path: str, table: pd.DataFrame, units: Dict[str, str],
              comments: Optional[List[str]] = None) -> str:
    """Write a table as CSV behind a '#'-prefixed header of column names and units"""
    directory = os.path.dirname(file_path)
    if directory:
        ensure_output_dir(directory)

    header = [f"# unruh-sim {VERSION}"]
    for line in comments or []:
        header.append(f"# {line}")
    header.append("# columns: " + ", ".join(f"{col} [{units.get(col, '1')}]" for col in table.columns))

    with open(file_path, 'w', encoding='utf-8', newline='') as f:
        f.write("\n".join(header) + "\n")
        table.to_csv(f, index=False, float_format=CSV_FLOAT_FORMAT, lineterminator="\n")

    return file_path


def read_csv(file_path: str) -> pd.DataFrame:
    """Read a CSV written by write_csv"""
    return pd.read_csv(file_path, comment='#')


def table_difference(first: pd.DataFrame, second: pd.DataFrame) -> float:
    """Largest absolute difference between numeric columns; inf when the tables do not line up"""
    if list(first.columns) != list(second.columns) or len(first) != len(second):
        return math.inf
    numeric = first.select_dtypes("number").columns
    a, b = first[numeric], second[numeric]
    if (a.isna() != b.isna()).to_numpy().any():
        return math.inf
    diff = (a - b).abs().max().max()
    return 0.0 if pd.isna(diff) else float(diff)


def format_duration(seconds: float) -> str:
    """Format duration in seconds to human readable format"""
    if seconds < 60:
        return f"{seconds:.2f}s"
    elif seconds < 3600:
        minutes = int(seconds // 60)
        secs = int(seconds % 60)
        return f"{minutes}m {secs}s" if secs > 0 else f"{minutes}m"
    else:
        hours = int(seconds // 3600)
        minutes = int((seconds % 3600) // 60)
        return f"{hours}h {minutes}m" if minutes > 0 else f"{hours}h"
