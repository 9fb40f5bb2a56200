"""Periodic change-point detection for time series of random objects.

Objects are passed as NumPy arrays: (n, d) for vectors, (n, p, p) for
matrices such as graph Laplacians, or an (n, n) distance matrix together
with metric="precomputed".
"""

from ._core import (
    ConfigError,
    InputError,
    detect,
    final_location,
    generate_networks,
    generate_vectors,
    load_dataset,
    localize,
    mcvm,
    run,
    scan_curve,
    segment,
)

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "InputError",
    "detect",
    "final_location",
    "generate_networks",
    "generate_vectors",
    "load_dataset",
    "localize",
    "mcvm",
    "run",
    "scan_curve",
    "segment",
]
