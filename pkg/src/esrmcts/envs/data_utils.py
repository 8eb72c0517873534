import os

import numpy as np
import yaml

from esrmcts.config import ConfigurationError


def env_data_path(file_name: str) -> str:
    """Resolve a data file shipped with the package, or pass through an explicit path"""
    if os.path.isabs(file_name) or os.path.exists(file_name):
        return file_name

    data_file_path = os.path.join(os.path.dirname(__file__), "data", file_name)
    if not os.path.exists(data_file_path):
        raise ConfigurationError(f"Environment data file '{file_name}' not found")
    return data_file_path


def load_yaml_data(file_name: str) -> dict:
    with open(env_data_path(file_name), "r") as f:
        return yaml.safe_load(f)


def load_table(file_name: str) -> np.ndarray:
    """Load a CSV table with a header row into a structured array addressed by column name"""
    path = env_data_path(file_name)
    table = np.genfromtxt(path, delimiter=",", names=True, dtype=np.float64, ndmin=1)
    if table.size == 0:
        raise ConfigurationError(f"Environment data file '{file_name}' has no rows")
    return table
