"""Portable seeded randomness: splitmix64 + Marsaglia polar Gaussians.

The generator is pinned so that seeded runs produce identical streams on
any platform: splitmix64 (Steele/Lea/Flood) drives 64-bit states, uniforms
take the top 53 bits, and normal deviates come from the polar method.
Everything downstream (random states, random unitaries) is deterministic
given the seed.
"""

from __future__ import annotations

import math

import numpy as np

_MASK = (1 << 64) - 1


class SplitMix64:
    """64-bit splitmix64 stream."""

    def __init__(self, seed: int = 0):
        self.state = seed & _MASK
        self._spare: float | None = None

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return (z ^ (z >> 31)) & _MASK

    def uniform(self) -> float:
        """Uniform in [0, 1) with 53 bits of precision."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def randint(self, low: int, high: int) -> int:
        """Uniform integer in [low, high] (inclusive, modulo-reduced)."""
        return low + self.next_u64() % (high - low + 1)

    def normal(self) -> float:
        """Standard normal deviate via the polar method."""
        if self._spare is not None:
            value, self._spare = self._spare, None
            return value
        while True:
            u = 2.0 * self.uniform() - 1.0
            v = 2.0 * self.uniform() - 1.0
            s = u * u + v * v
            if 0.0 < s < 1.0:
                factor = math.sqrt(-2.0 * math.log(s) / s)
                self._spare = v * factor
                return u * factor

    def complex_normal(self) -> complex:
        return complex(self.normal(), self.normal())

    def complex_matrix(self, rows: int, cols: int) -> np.ndarray:
        out = np.empty((rows, cols), dtype=complex)
        for i in range(rows):
            for j in range(cols):
                out[i, j] = self.complex_normal()
        return out


def random_density(rng: SplitMix64, dim: int) -> np.ndarray:
    """Random mixed state: normalize G @ G.conj().T for complex Gaussian G."""
    g = rng.complex_matrix(dim, dim)
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_pure(rng: SplitMix64, dim: int) -> np.ndarray:
    """Haar-like random pure state vector (normalized complex Gaussian)."""
    v = np.array([rng.complex_normal() for _ in range(dim)])
    return v / np.linalg.norm(v)


def random_unitary(rng: SplitMix64, dim: int) -> np.ndarray:
    """Random unitary from the QR decomposition of a complex Gaussian."""
    q, r = np.linalg.qr(rng.complex_matrix(dim, dim))
    return q * (np.diagonal(r) / np.abs(np.diagonal(r)))
