"""Equivalent AWGN reduction of the Gaussian-modulated protocol and raw keys.

Both detection modes reduce to a classical channel ``Y = X + Z`` with
``X ~ N(0, mod_variance)`` and noise variance fixed by the physical
parameters:

* homodyne:   ``sigma_Z^2 = (xi + 1) / (4 tau)``
* heterodyne: ``sigma_Z^2 = (1 + xi/2) / (2 tau)``

All variances are in shot-noise units.  The public interface takes the
per-quadrature modulation variance only; the 4x convention between it and
the total modulation variance is handled internally.  Excess noise ``xi``
is taken as the channel-output-referred estimate; the thermal-photon
relation ``xi = 2 nbar (1 - tau)`` is not parameterized here.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from enum import Enum

import numpy as np

__all__ = [
    "Detection",
    "ChannelParams",
    "AwgnModel",
    "RawKeyPair",
    "UnreachableSnrError",
    "snr",
    "snr_db",
    "awgn_model",
    "params_for_target_snr",
    "sample_raw_keys",
    "repeat_seed",
    "raw_keys_to_csv",
    "raw_keys_from_csv",
]


class Detection(Enum):
    HOMODYNE = "homodyne"
    HETERODYNE = "heterodyne"

    @classmethod
    def parse(cls, text: str) -> "Detection":
        t = text.strip().lower()
        for det in cls:
            if det.value.startswith(t) and t:
                return det
        raise ValueError(f"unknown detection mode {text!r} (want hom/het)")


class UnreachableSnrError(ValueError):
    """Requested SNR needs transmittance above 1."""


@dataclass(frozen=True)
class ChannelParams:
    """Physical scenario: modulation variance, channel, and detection mode."""

    mod_variance: float           # per-quadrature Gaussian modulation variance
    transmittance: float
    excess_noise: float
    detection: Detection

    def __post_init__(self):
        if not (np.isfinite(self.mod_variance) and self.mod_variance > 0):
            raise ValueError(f"mod_variance must be > 0, got {self.mod_variance}")
        if not (np.isfinite(self.transmittance) and 0 < self.transmittance <= 1):
            raise ValueError(f"transmittance must be in (0, 1], got {self.transmittance}")
        if not (np.isfinite(self.excess_noise) and self.excess_noise >= 0):
            raise ValueError(f"excess_noise must be >= 0, got {self.excess_noise}")
        if not isinstance(self.detection, Detection):
            raise ValueError("detection must be a Detection")

    @property
    def total_mod_variance(self) -> float:
        """Total modulation variance (both quadratures): 4x the per-quadrature one."""
        return 4.0 * self.mod_variance

    @property
    def total_quadrature_variance(self) -> float:
        return self.total_mod_variance + 1.0


@dataclass(frozen=True)
class AwgnModel:
    """Normalized classical channel Y = X + Z equivalent to one detection mode."""

    signal_variance: float
    noise_variance: float

    def __post_init__(self):
        if not (np.isfinite(self.signal_variance) and self.signal_variance > 0):
            raise ValueError("signal_variance must be > 0")
        if not (np.isfinite(self.noise_variance) and self.noise_variance > 0):
            raise ValueError("noise_variance must be > 0")

    @property
    def snr_linear(self) -> float:
        return self.signal_variance / self.noise_variance

    @property
    def snr_db(self) -> float:
        return 10.0 * np.log10(self.snr_linear)

    @property
    def output_variance(self) -> float:
        return self.signal_variance + self.noise_variance


def _noise_variance(params: ChannelParams) -> float:
    tau, xi = params.transmittance, params.excess_noise
    if params.detection is Detection.HOMODYNE:
        return (xi + 1.0) / (4.0 * tau)
    return (1.0 + xi / 2.0) / (2.0 * tau)


def snr(params: ChannelParams) -> float:
    """Linear SNR of the equivalent AWGN channel for ``params``."""
    tau, xi, vm = params.transmittance, params.excess_noise, params.total_mod_variance
    if params.detection is Detection.HOMODYNE:
        return tau * vm / (1.0 + xi)
    return (tau / 2.0) * vm / (1.0 + xi / 2.0)


def snr_db(params: ChannelParams) -> float:
    return 10.0 * np.log10(snr(params))


def awgn_model(params: ChannelParams) -> AwgnModel:
    """Reduce ``params`` to the normalized AWGN channel."""
    model = AwgnModel(signal_variance=params.mod_variance,
                      noise_variance=_noise_variance(params))
    assert abs(model.snr_linear - snr(params)) <= 1e-12 * max(1.0, snr(params))
    return model


def params_for_target_snr(target_snr_db: float, mod_variance: float,
                          excess_noise: float, detection: Detection) -> ChannelParams:
    """Solve for the transmittance giving ``target_snr_db``.

    Raises
    ------
    UnreachableSnrError
        If the target needs transmittance > 1 for the given modulation
        variance and excess noise.
    """
    target = 10.0 ** (target_snr_db / 10.0)
    vm = 4.0 * mod_variance
    if detection is Detection.HOMODYNE:
        tau = target * (1.0 + excess_noise) / vm
    else:
        tau = target * (1.0 + excess_noise / 2.0) * 2.0 / vm
    if tau > 1.0 + 2e-10:
        raise UnreachableSnrError(
            f"unreachable SNR: {target_snr_db:g} dB needs transmittance "
            f"{tau:.6g} > 1 for mod_variance={mod_variance:g}, "
            f"excess_noise={excess_noise:g}, {detection.value}")
    return ChannelParams(mod_variance=mod_variance, transmittance=min(tau, 1.0),
                         excess_noise=excess_noise, detection=detection)


@dataclass(frozen=True)
class RawKeyPair:
    """One simulated run: Alice's modulation values and Bob's normalized outcomes."""

    x: np.ndarray
    y: np.ndarray
    params: ChannelParams
    seed: int

    def __post_init__(self):
        if self.x.shape != self.y.shape or self.x.ndim != 1 or self.x.size == 0:
            raise ValueError("x and y must be nonempty 1-D arrays of equal length")
        if not (np.all(np.isfinite(self.x)) and np.all(np.isfinite(self.y))):
            raise ValueError("raw key values must be finite")
        self.x.flags.writeable = False
        self.y.flags.writeable = False

    @property
    def n(self) -> int:
        return self.x.size


def repeat_seed(master_seed: int, repeat_index: int) -> np.random.SeedSequence:
    """Stream-splitting rule for parallel Monte Carlo: one child per repeat.

    ``SeedSequence`` hashes the (master, index) pair, so distinct repeats get
    independent, platform-stable streams.
    """
    return np.random.SeedSequence((int(master_seed), int(repeat_index)))


def sample_raw_keys(params: ChannelParams, n: int, seed) -> RawKeyPair:
    """Draw one raw-key pair: x ~ N(0, mod_variance), y = x + z.

    Bit-reproducible for a fixed seed; ``seed`` may be an int or a
    ``SeedSequence`` (e.g. from :func:`repeat_seed`).
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    model = awgn_model(params)
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(n) * np.sqrt(model.signal_variance)
    z = rng.standard_normal(n) * np.sqrt(model.noise_variance)
    seed_repr = seed if isinstance(seed, (int, np.integer)) else seed.entropy
    return RawKeyPair(x=x, y=x + z, params=params, seed=_flatten_seed(seed_repr))


def _flatten_seed(entropy) -> int:
    if isinstance(entropy, (int, np.integer)):
        return int(entropy)
    # tuple entropy from repeat_seed: fold to one stable integer for the header
    return int(np.random.SeedSequence(entropy).generate_state(1, np.uint64)[0])


def raw_keys_to_csv(pair: RawKeyPair) -> str:
    """Two-column CSV with a header comment carrying params and seed."""
    p = pair.params
    buf = io.StringIO()
    buf.write(f"# mod_variance={p.mod_variance!r} transmittance={p.transmittance!r} "
              f"excess_noise={p.excess_noise!r} detection={p.detection.value} "
              f"seed={pair.seed}\n")
    buf.write("x,y\n")
    for xv, yv in zip(pair.x, pair.y):
        buf.write(f"{float(xv)!r},{float(yv)!r}\n")
    return buf.getvalue()


def raw_keys_from_csv(text: str) -> RawKeyPair:
    lines = text.strip().splitlines()
    if len(lines) < 3 or not lines[0].startswith("#"):
        raise ValueError("malformed raw-key CSV")
    meta = dict(item.split("=", 1) for item in lines[0][1:].split())
    params = ChannelParams(mod_variance=float(meta["mod_variance"]),
                           transmittance=float(meta["transmittance"]),
                           excess_noise=float(meta["excess_noise"]),
                           detection=Detection(meta["detection"]))
    if lines[1] != "x,y":
        raise ValueError("missing x,y column header")
    data = np.array([[float(v) for v in line.split(",")] for line in lines[2:]])
    return RawKeyPair(x=data[:, 0].copy(), y=data[:, 1].copy(), params=params,
                      seed=int(meta["seed"]))
