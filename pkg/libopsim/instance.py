"""
Seeded random instances

Copyright (c) 2026 The libopsim authors.
Distributed under the terms of the GNU General Public License version 2.

Every random draw comes from stream(seed, label): the label is hashed into the seed sequence so that the
streams of different stages are independent of each other and of the order in which they are requested.
"""

__all__ = ["stream", "gen_instance", "INSTANCE_KINDS"]

import hashlib

import numpy as np

from libopsim.linalg import spectral_radius, op_norm

INSTANCE_KINDS = ("gaussian", "upper", "normal", "contraction")


def stream(seed, label):
    """Independent Generator for (seed, label)"""
    digest = hashlib.sha256(label.encode("utf-8")).digest()
    key = [int.from_bytes(digest[i:i + 4], "little") for i in range(0, 16, 4)]
    return np.random.default_rng(np.random.SeedSequence([int(seed) % 2 ** 64] + key))


def _gaussian(rng, n):
    return rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))


def gen_instance(kind, n, cap, seed):
    """
    n x n complex instance, deterministic in (kind, n, cap, seed).

    gaussian: complex Gaussian rescaled to spectral radius cap (strictly upper triangular when cap = 0);
    upper: strictly upper triangular, hence nilpotent, rescaled to norm cap (unscaled when cap = 0);
    normal: unitarily diagonalizable with spectral radius cap; contraction: rescaled to norm cap.
    """
    if kind not in INSTANCE_KINDS:
        raise ValueError("unknown instance kind '{}', expected one of {}".format(kind, INSTANCE_KINDS))
    if n < 1:
        raise ValueError("instance dimension must be >= 1")
    if cap < 0:
        raise ValueError("cap must be >= 0")
    rng = stream(seed, "instance:{}:{}:{!r}".format(kind, n, float(cap)))
    g = _gaussian(rng, n)

    if kind == "gaussian":
        if cap == 0:
            return np.triu(g, 1)
        return g * (cap / spectral_radius(g))
    if kind == "upper":
        upper = np.triu(g, 1)
        if cap == 0 or not np.any(upper):
            return upper
        return upper * (cap / op_norm(upper))
    if kind == "normal":
        unitary, _ = np.linalg.qr(_gaussian(rng, n))
        spectrum = g[0]
        spectrum = spectrum * (cap / np.max(np.abs(spectrum)))
        return (unitary * spectrum) @ unitary.conj().T
    return g * (cap / op_norm(g))
