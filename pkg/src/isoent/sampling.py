"""Seeded random matrices.

All stochastic routines draw from numpy's Philox generator (a 64-bit
counter-based bit generator) keyed by an integer seed, so a seed fixes every
sample bit-for-bit on a given numpy version.
"""

import numpy as np


def make_rng(seed):
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.Philox(int(seed)))


def haar_unitary(d, rng):
    """Haar-distributed d x d unitary (QR of a Ginibre matrix, phases fixed)."""
    rng = make_rng(rng)
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


def random_local_unitaries(rng):
    rng = make_rng(rng)
    return haar_unitary(2, rng), haar_unitary(2, rng)


def random_permutation(n, rng):
    return make_rng(rng).permutation(n)
