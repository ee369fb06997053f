"""Bundled example data."""
from importlib import resources

import numpy as np

__all__ = ["load_airpassengers", "airpassengers_path"]


def airpassengers_path() -> str:
    """Filesystem path of the bundled monthly airline passengers CSV."""
    return str(resources.files("spectreg").joinpath("data/airpassengers.csv"))


def load_airpassengers():
    """Monthly international airline passenger totals, 1949-1960.

    Returns (months, values): a length-144 array of "YYYY-MM" labels and
    the matching float counts in thousands.
    """
    path = airpassengers_path()
    months = np.loadtxt(path, delimiter=",", skiprows=1, usecols=0, dtype=str)
    values = np.loadtxt(path, delimiter=",", skiprows=1, usecols=1)
    return months, values
