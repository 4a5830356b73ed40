"""Pinned deterministic random number generation.

Every random choice in this package flows through the fixed algorithm
below. It is frozen on purpose: artifacts must be bit-reproducible from
(seed, parameters) alone, across platforms and library versions, so we
do not delegate stream definitions to numpy's Generator.

Core primitive: the SplitMix64 finalizer

    mix64(z):
        z ^= z >> 30;  z *= 0xBF58476D1CE4E5B9   (mod 2^64)
        z ^= z >> 27;  z *= 0x94D049BB133111EB   (mod 2^64)
        z ^= z >> 31

Counter stream: draw i (i = 1, 2, ...) of the stream with base seed s is

    mix64((s + i * GAMMA) mod 2^64),   GAMMA = 0x9E3779B97F4A7C15

which gives O(1) random access to any position, so batches vectorize.

Substreams: fold(s, label) = mix64(s XOR mix64((label + GAMMA) mod 2^64))
derives an independent stream per integer label; folds chain for nested
labels. Trial t of a run uses fold(seed, t); column j inside a trial
uses fold(trial_seed, j); replicate r of a simulation uses fold(seed, r).

Permutations: a permutation of n items is the stable argsort of n
consecutive uint64 draws (distinct keys are exchangeable, so all n!
orders are equally likely). If the n keys collide anywhere the whole
block is discarded and the next n draws of the stream are used; the
retry preserves uniformity because blocks are i.i.d.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB

_G = np.uint64(GAMMA)


def mix64(z: int) -> int:
    """SplitMix64 finalizer on a 64-bit integer."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * _M1) & MASK64
    z = ((z ^ (z >> 27)) * _M2) & MASK64
    return z ^ (z >> 31)


def fold(seed: int, *labels: int) -> int:
    """Derive a substream seed from integer labels, chaining left to right."""
    s = seed & MASK64
    for label in labels:
        s = mix64(s ^ mix64((label + GAMMA) & MASK64))
    return s


def _mix64_arr(z: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore"):
        z = z ^ (z >> np.uint64(30))
        z = z * np.uint64(_M1)
        z = z ^ (z >> np.uint64(27))
        z = z * np.uint64(_M2)
        z = z ^ (z >> np.uint64(31))
    return z


def raw_block(seed: int, start: int, count: int) -> np.ndarray:
    """Draws start+1 .. start+count of the stream, as a uint64 array."""
    idx = np.arange(start + 1, start + count + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = np.uint64(seed & MASK64) + idx * _G
    return _mix64_arr(z)


def fold_array(seed: int, labels: np.ndarray) -> np.ndarray:
    """Vectorized fold(seed, label) over an array of labels."""
    lab = np.asarray(labels, dtype=np.uint64)
    with np.errstate(over="ignore"):
        inner = _mix64_arr(lab + _G)
        return _mix64_arr(np.uint64(seed & MASK64) ^ inner)


def fold_grid(seeds: np.ndarray, labels: np.ndarray) -> np.ndarray:
    """fold(seed, label) for every (seed, label) pair; shape (len(seeds), len(labels))."""
    s = np.asarray(seeds, dtype=np.uint64)
    lab = np.asarray(labels, dtype=np.uint64)
    with np.errstate(over="ignore"):
        inner = _mix64_arr(lab + _G)
        return _mix64_arr(s[:, None] ^ inner[None, :])


def permutations_from_seeds(seeds: np.ndarray, n: int) -> np.ndarray:
    """One uniform permutation of {0..n-1} per seed; shape (*seeds.shape, n).

    Stable argsort of n consecutive stream draws per seed. Rows whose key
    block contains a collision are redrawn from the next block of the
    same stream until the keys are distinct.
    """
    s = np.asarray(seeds, dtype=np.uint64).reshape(-1)
    out = np.empty((s.size, n), dtype=np.int64)
    pending = np.arange(s.size)
    rnd = 0
    while pending.size:
        idx = np.arange(rnd * n + 1, rnd * n + n + 1, dtype=np.uint64)
        with np.errstate(over="ignore"):
            keys = _mix64_arr(s[pending][:, None] + idx[None, :] * _G)
        order = np.argsort(keys, axis=1, kind="stable")
        if n > 1:
            ks = np.take_along_axis(keys, order, axis=1)
            dup = (ks[:, 1:] == ks[:, :-1]).any(axis=1)
        else:
            dup = np.zeros(pending.size, dtype=bool)
        ok = ~dup
        out[pending[ok]] = order[ok]
        pending = pending[dup]
        rnd += 1
    return out.reshape(*np.asarray(seeds, dtype=np.uint64).shape, n)


def permutation(seed: int, n: int) -> np.ndarray:
    """Single uniform permutation of {0..n-1} for this seed."""
    return permutations_from_seeds(np.array([seed], dtype=np.uint64), n)[0]
