"""Content-addressed cache for eigendecompositions.

Keys are hashes of canonicalized config sections: numeric values are
normalized (2 and 2.0 hash identically) so cosmetic config edits do not
invalidate the cache.
"""

from __future__ import annotations

import hashlib
import os

import numpy as np

__all__ = ["canonical_value", "cache_key", "EigenCache"]


def canonical_value(value):
    """Stable string form: floats via repr(float), ints collapse to the
    same form as the equal float, sequences recurse."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, float)):
        return repr(float(value))
    if isinstance(value, (list, tuple)):
        return "[" + ",".join(canonical_value(v) for v in value) + "]"
    if isinstance(value, str):
        try:
            return repr(float(value))
        except ValueError:
            return value
    raise TypeError(f"uncanonicalizable config value {value!r}")


def cache_key(section):
    """sha256 over the sorted canonical key=value lines of a section."""
    lines = [f"{k}={canonical_value(v)}" for k, v in sorted(section.items())]
    return hashlib.sha256("\n".join(lines).encode()).hexdigest()[:32]


class EigenCache:
    """Disk cache of operator eigensystems, keyed by the operator's
    defining parameters.  Loading seeds the in-process memo, so repeat
    runs skip the tridiagonal solve entirely."""

    def __init__(self, root, enabled=True):
        self.root = root
        self.enabled = enabled
        if enabled:
            os.makedirs(root, exist_ok=True)

    def _path(self, op):
        pot = op.potential
        section = {"R": op.grid.R, "M": op.grid.M, "n": op.n,
                   "c": pot.c if pot else 0.0,
                   "delta": pot.delta if pot else 0.0}
        return os.path.join(self.root, f"eig_{cache_key(section)}.npz")

    def eigensystem(self, op):
        if not self.enabled:
            return op.eigensystem()
        if op._eig:
            return op._eig[0]
        path = self._path(op)
        if os.path.exists(path):
            data = np.load(path)
            op._eig.append((data["vals"], data["vecs"]))
            return op._eig[0]
        vals, vecs = op.eigensystem()
        tmp = path + ".tmp"
        with open(tmp, "wb") as fh:       # file handle: no .npz suffix games
            np.savez(fh, vals=vals, vecs=vecs)
        os.replace(tmp, path)
        return vals, vecs
