"""
Symmetric alpha-stable variates by the Chambers-Mallows-Stuck method.

Each variate is built from exactly two uniforms ``u1, u2`` in [0, 1):

    V = pi * (u1 - 1/2)            uniform angle on [-pi/2, pi/2)
    W = -log(1 - u2)               unit exponential

    X = sin(a V) / cos(V)**(1/a) * (cos((1 - a) V) / W)**((1 - a) / a)

with ``X = tan(V)`` for ``a = 1`` (standard Cauchy). For ``a = 2`` the
formula collapses to ``2 sin(V) sqrt(W)``, a normal variate of variance 2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import RngStream

__all__ = ["StableParams", "sample_stable", "sample_stable_array",
           "sample_stable_vector", "stable_from_uniforms"]


@dataclass(frozen=True)
class StableParams:
    alpha: float = 1.5
    scale: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.alpha <= 2.0:
            raise ValueError(f"alpha must lie in (0, 2], got {self.alpha}")
        if not self.scale > 0.0:
            raise ValueError(f"scale must be positive, got {self.scale}")


def stable_from_uniforms(u1, u2, alpha: float):
    """Map uniform pairs to unit-scale symmetric stable variates."""
    u1 = np.asarray(u1, dtype=float)
    u2 = np.asarray(u2, dtype=float)
    v = np.pi * (u1 - 0.5)
    if alpha == 1.0:
        return np.tan(v)
    w = -np.log1p(-u2)
    return (np.sin(alpha * v) / np.cos(v) ** (1.0 / alpha)
            * (np.cos((1.0 - alpha) * v) / w) ** ((1.0 - alpha) / alpha))


def sample_stable_array(shape, params: StableParams, rng: RngStream) -> np.ndarray:
    """Array of independent variates; draws ``2 * prod(shape)`` uniforms."""
    shape = (shape,) if np.isscalar(shape) else tuple(shape)
    u = rng.uniform((2,) + shape)
    return params.scale * stable_from_uniforms(u[0], u[1], params.alpha)


def sample_stable(params: StableParams, rng: RngStream) -> float:
    u1, u2 = rng.uniform(2)
    return float(params.scale * stable_from_uniforms(u1, u2, params.alpha))


def sample_stable_vector(dim: int, params: StableParams, rng: RngStream) -> np.ndarray:
    if dim < 1:
        raise ValueError("dim must be >= 1")
    return sample_stable_array((dim,), params, rng)
