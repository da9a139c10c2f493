"""Counter-based random numbers: SplitMix64 in counter mode.

Draw ``k``-th value of stream ``s`` under master seed ``q`` as

    mix(state0(q, s) + k * GOLDEN)

where ``mix`` is the SplitMix64 finalizer and ``state0`` scrambles the
(seed, stream) pair.  Every value is a pure function of
(seed, stream, counter), so any partitioning of work across threads,
processes or batch sizes reproduces the serial sequence exactly.  Path
simulations key streams by path index; samplers derive disjoint
sub-seeds with :func:`derive_seed`.

Normals come from the inverse normal CDF applied to counter-indexed
uniforms, keeping the counter-to-value mapping one-to-one.
"""

from __future__ import annotations

import numpy as np
from scipy.special import ndtri

_MASK = (1 << 64) - 1
_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_STREAM_SALT = np.uint64(0xD6E8FEB86659FD93)


def _mix(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


def _as_u64(value) -> np.ndarray:
    arr = np.asarray(value)
    if arr.dtype.kind in ("i", "u"):
        return arr.astype(np.uint64, copy=False) if arr.dtype != np.uint64 else arr
    if arr.ndim == 0:
        return np.uint64(int(arr) & _MASK)
    return np.asarray([int(v) & _MASK for v in arr.ravel()], dtype=np.uint64).reshape(
        arr.shape
    )


def raw64(seed: int, stream, counter) -> np.ndarray:
    """Raw 64-bit words; ``stream`` and ``counter`` broadcast."""
    with np.errstate(over="ignore"):
        base = _mix(np.uint64(seed & _MASK) + _GOLDEN)
        state0 = _mix(base ^ (_as_u64(stream) * _GOLDEN + _STREAM_SALT))
        return _mix(state0 + _as_u64(counter) * _GOLDEN)


def uniforms(seed: int, stream, counter) -> np.ndarray:
    """Uniform doubles strictly inside (0, 1)."""
    bits = raw64(seed, stream, counter)
    return ((bits >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0**-53


def normals(seed: int, stream, counter) -> np.ndarray:
    """Standard normal deviates, one per (stream, counter) pair."""
    return ndtri(uniforms(seed, stream, counter))


def derive_seed(seed: int, *tags: int) -> int:
    """Deterministic sub-seed for an independent purpose (sampling lanes,
    per-point estimator seeds, ...)."""
    z = np.uint64(seed & _MASK)
    with np.errstate(over="ignore"):
        for tag in tags:
            z = _mix(z + _GOLDEN * np.uint64((int(tag) + 1) & _MASK))
    return int(z)
