"""Distributional transform, dyadic binary expansion, and their composition.

A continuous random variable pushed through its own distribution function is
uniform on [0, 1]; expanding that uniform value in base 2 yields independent
Bernoulli(1/2) bits.  The composition (transform, then expansion) is the
quantizer used throughout this package to turn Gaussian raw keys into bit
planes.

Bit convention
--------------
Bit ``i`` (1-indexed) of ``d`` in [0, 1] is 1 iff ``frac(d * 2**(i-1)) >= 1/2``,
i.e. the standard half-open dyadic partition, right-closed only at ``d = 1``
(which maps to all ones).  Ties such as ``d = 0.5`` therefore take the upper
interval.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr, ndtri

__all__ = [
    "GaussianCdf",
    "EmpiricalCdf",
    "DteConfig",
    "BitMatrix",
    "normal_cdf",
    "normal_quantile",
    "binary_expand",
    "dte",
    "dte_sequence",
]

MAX_DEPTH = 32


@dataclass(frozen=True)
class GaussianCdf:
    """Gaussian distribution function N(mean, std_dev**2).

    ``cdf`` is evaluated through the complementary error function and is
    accurate to better than 1e-12 absolute; ``quantile`` inverts it to
    double precision, so ``cdf(quantile(u))`` round-trips within 1e-10.
    """

    mean: float = 0.0
    std_dev: float = 1.0

    def __post_init__(self):
        if not np.isfinite(self.mean):
            raise ValueError("mean must be finite")
        if not (np.isfinite(self.std_dev) and self.std_dev > 0):
            raise ValueError(f"std_dev must be > 0, got {self.std_dev}")

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        if not np.all(np.isfinite(x)):
            raise ValueError("cdf argument must be finite")
        out = ndtr((x - self.mean) / self.std_dev)
        return float(out) if out.ndim == 0 else out

    def quantile(self, u):
        u = np.asarray(u, dtype=float)
        if not np.all((u > 0.0) & (u < 1.0)):
            raise ValueError("quantile argument must lie in the open interval (0, 1)")
        out = self.mean + self.std_dev * ndtri(u)
        return float(out) if out.ndim == 0 else out


class EmpiricalCdf:
    """Rank-based distribution function fitted to reference samples.

    Maps ``x`` to ``rank(x) / (n + 1)``.  This is a step function, not a
    strictly increasing continuous CDF, so the transformed values are only
    approximately uniform; use it when the true marginal is unknown.
    """

    def __init__(self, samples):
        samples = np.asarray(samples, dtype=float)
        if samples.ndim != 1 or samples.size == 0:
            raise ValueError("samples must be a nonempty 1-D sequence")
        if not np.all(np.isfinite(samples)):
            raise ValueError("samples must be finite")
        self._sorted = np.sort(samples)

    @property
    def n(self) -> int:
        return self._sorted.size

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        if not np.all(np.isfinite(x)):
            raise ValueError("cdf argument must be finite")
        out = np.searchsorted(self._sorted, x, side="right") / (self.n + 1)
        return float(out) if out.ndim == 0 else out

    def quantile(self, u):
        u = np.asarray(u, dtype=float)
        if not np.all((u > 0.0) & (u < 1.0)):
            raise ValueError("quantile argument must lie in the open interval (0, 1)")
        idx = np.clip(np.ceil(u * (self.n + 1)).astype(int) - 1, 0, self.n - 1)
        out = self._sorted[idx]
        return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class DteConfig:
    """Expansion depth: how many bit planes to extract per sample."""

    depth: int

    def __post_init__(self):
        if not isinstance(self.depth, (int, np.integer)):
            raise ValueError("depth must be an integer")
        if not 1 <= self.depth <= MAX_DEPTH:
            raise ValueError(f"depth must be in 1..{MAX_DEPTH}, got {self.depth}")


class BitMatrix:
    """l x n matrix of expansion bits; row i holds bit plane i of the sequence.

    The underlying array is frozen after construction.
    """

    def __init__(self, bits):
        bits = np.ascontiguousarray(bits, dtype=np.uint8)
        if bits.ndim != 2 or bits.shape[0] < 1 or bits.shape[1] < 1:
            raise ValueError("bits must be a nonempty 2-D array")
        if not np.all((bits == 0) | (bits == 1)):
            raise ValueError("bit entries must be 0 or 1")
        bits.flags.writeable = False
        self.bits = bits

    @property
    def depth(self) -> int:
        return self.bits.shape[0]

    @property
    def length(self) -> int:
        return self.bits.shape[1]

    def row(self, level: int) -> np.ndarray:
        """Bit plane for 1-indexed ``level``."""
        if not 1 <= level <= self.depth:
            raise ValueError(f"level must be in 1..{self.depth}, got {level}")
        return self.bits[level - 1]

    def to_text(self) -> str:
        """One row per level, '0'/'1' characters, newline separated."""
        return "\n".join("".join("1" if b else "0" for b in row) for row in self.bits)

    @classmethod
    def from_text(cls, text: str) -> "BitMatrix":
        rows = [line for line in text.strip().splitlines() if line]
        if not rows:
            raise ValueError("empty bit-matrix text")
        if any(set(r) - {"0", "1"} for r in rows):
            raise ValueError("bit-matrix text may contain only '0' and '1'")
        return cls(np.array([[int(c) for c in r] for r in rows], dtype=np.uint8))

    def __eq__(self, other):
        return isinstance(other, BitMatrix) and np.array_equal(self.bits, other.bits)

    def __repr__(self):
        return f"BitMatrix(depth={self.depth}, length={self.length})"


def normal_cdf(x, dist: GaussianCdf):
    """Evaluate the Gaussian distribution function at ``x``."""
    return dist.cdf(x)


def normal_quantile(u, dist: GaussianCdf):
    """Evaluate the Gaussian quantile (inverse distribution) function at ``u``."""
    return dist.quantile(u)


def _expansion_codes(d, depth: int):
    """Integer codes floor(d * 2**depth), with d == 1 collapsed to all ones.

    Scaling by a power of two is exact in binary floating point, so the codes
    match the mathematical definition bit for bit.
    """
    d = np.asarray(d, dtype=float)
    if np.any(~np.isfinite(d)) or np.any((d < 0.0) | (d > 1.0)):
        raise ValueError("expansion argument must lie in [0, 1]")
    scaled = np.ldexp(d, depth)
    codes = np.floor(scaled).astype(np.int64)
    return np.minimum(codes, (np.int64(1) << depth) - 1)


def binary_expand(d: float, depth: int) -> np.ndarray:
    """First ``depth`` bits of the dyadic expansion of ``d`` in [0, 1].

    Reconstructing ``sum(b_i * 2**-i)`` from the result underestimates ``d``
    by less than ``2**-depth``; ``d = 1`` maps to all ones.
    """
    DteConfig(depth)
    code = int(_expansion_codes(float(d), depth))
    return np.array([(code >> (depth - i)) & 1 for i in range(1, depth + 1)],
                    dtype=np.uint8)


def dte(x: float, dist, cfg: DteConfig) -> np.ndarray:
    """Quantize one sample: transform through ``dist`` then expand to bits."""
    return binary_expand(dist.cdf(float(x)), cfg.depth)


def dte_sequence(xs, dist, cfg: DteConfig) -> BitMatrix:
    """Quantize a sequence; column j of the result is ``dte(xs[j])``."""
    xs = np.asarray(xs, dtype=float)
    if xs.ndim != 1 or xs.size == 0:
        raise ValueError("xs must be a nonempty 1-D sequence")
    codes = _expansion_codes(dist.cdf(xs), cfg.depth)
    shifts = np.arange(cfg.depth - 1, -1, -1, dtype=np.int64)
    bits = ((codes[None, :] >> shifts[:, None]) & 1).astype(np.uint8)
    return BitMatrix(bits)
