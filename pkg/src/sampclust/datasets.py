"""Synthetic and bundled datasets."""
from __future__ import annotations

import os
from pathlib import Path

import numpy as np

from .graph import PointSet


def gaussian_blobs(n: int, centers: int = 10, dim: int = 8, spread: float = 1.0,
                   separation: float = 10.0, seed: int = 0) -> PointSet:
    """``n`` points split as evenly as possible over isotropic Gaussian blobs.

    Centers are drawn uniformly from a cube of side ``separation * centers**(1/dim)``.
    """
    rng = np.random.default_rng(seed)
    side = separation * centers ** (1.0 / dim)
    mu = rng.uniform(0, side, size=(centers, dim))
    labels = np.arange(n) % centers
    rng.shuffle(labels)
    points = mu[labels] + rng.normal(scale=spread, size=(n, dim))
    return PointSet(points, labels)


def pendigits_path() -> Path | None:
    """Locate ``pendigits.csv``: ``$SAMPCLUST_PENDIGITS`` or ``data/`` in the checkout."""
    env = os.environ.get("SAMPCLUST_PENDIGITS")
    candidates = [Path(env)] if env else []
    candidates.append(Path(__file__).resolve().parents[2] / "data" / "pendigits.csv")
    candidates.append(Path.cwd() / "data" / "pendigits.csv")
    for path in candidates:
        if path.is_file():
            return path
    return None


def load_pendigits() -> PointSet:
    """Pendigits: 10,992 pen trajectories, 16 features, 10 digit classes."""
    from .dataio import load_points

    path = pendigits_path()
    if path is None:
        raise FileNotFoundError(
            "pendigits.csv not found; run scripts/fetch_pendigits.py or set SAMPCLUST_PENDIGITS"
        )
    return load_points(path, label_column=-1)
