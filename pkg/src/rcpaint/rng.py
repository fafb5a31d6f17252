"""Stateless, counter-based random numbers.

Every value is a pure function of its integer key, so a pixel computes the
same jitter no matter which worker handles it or in what order.
"""

from __future__ import annotations

import numpy as np

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_INV_2_53 = 1.0 / 9007199254740992.0


def _mix(x: np.ndarray) -> np.ndarray:
    # splitmix64 finalizer
    x = x ^ (x >> np.uint64(30))
    x = x * _M1
    x = x ^ (x >> np.uint64(27))
    x = x * _M2
    return x ^ (x >> np.uint64(31))


def hash_keys(*keys) -> np.ndarray:
    """Fold integer keys (scalars or broadcastable arrays) into one uint64 hash."""
    with np.errstate(over="ignore"):
        h = np.zeros((), dtype=np.uint64)
        for k in keys:
            k = np.asarray(k)
            if k.dtype != np.uint64:
                k = k.astype(np.int64).view(np.uint64)
            h = _mix(h + _GOLDEN + k)
        return np.asarray(h, dtype=np.uint64)


def uniform(*keys) -> np.ndarray:
    """Uniform float64 in [0, 1) keyed by ``keys``."""
    h = hash_keys(*keys)
    return (h >> np.uint64(11)).astype(np.float64) * _INV_2_53


def float_bits(x) -> np.ndarray:
    """Reinterpret float64 values as uint64 so coordinates can key a hash."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    # fold -0.0 onto +0.0
    x = x + 0.0
    return x.view(np.uint64)


def hash3(u, v, seed: int) -> np.ndarray:
    """Deterministic per-coordinate vector in [-1, 1]^3, shape ``u.shape + (3,)``."""
    ub = float_bits(u)
    vb = float_bits(v)
    comps = [2.0 * uniform(seed, ub, vb, k) - 1.0 for k in range(3)]
    return np.stack(comps, axis=-1)
