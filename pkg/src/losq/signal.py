"""Transmit constellations, enumerated input ensembles, and the 1-bit front end.

The transmit power constraint is E[x x^H] = (1/N) I_N: every enumerated
input vector is scaled by 1/sqrt(N) and drawn with uniform priors, so SNR
is 10 log10(1 / sigma^2) regardless of the antenna count.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Constellation",
    "InputEnsemble",
    "NoiseModel",
    "SignVector",
    "SignalError",
    "build_constellation",
    "custom_constellation",
    "enumerate_inputs",
    "quantize_1bit",
    "sample_received",
    "rng_stream",
    "DEFAULT_ENSEMBLE_CAP",
]

DEFAULT_ENSEMBLE_CAP = 65536


class SignalError(ValueError):
    """Invalid constellation, ensemble, or noise parameter."""


def _readonly(a: np.ndarray, dtype) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=dtype)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class Constellation:
    """Complex symbol alphabet with unit average power."""

    name: str
    points: np.ndarray

    def __post_init__(self):
        pts = _readonly(np.atleast_1d(self.points), complex)
        object.__setattr__(self, "points", pts)
        if pts.ndim != 1 or pts.size == 0:
            raise SignalError("constellation needs a non-empty 1-d point list")
        power = float(np.mean(np.abs(pts) ** 2))
        if abs(power - 1.0) > 1e-12:
            raise SignalError(f"constellation average power is {power!r}, expected 1")
        diff = np.abs(pts[:, None] - pts[None, :])
        np.fill_diagonal(diff, np.inf)
        if diff.min() == 0:
            raise SignalError("constellation points must be pairwise distinct")

    @property
    def size(self) -> int:
        return int(self.points.size)

    @property
    def bits(self) -> float:
        return float(np.log2(self.size))


def _gray_sequence(n_bits: int) -> np.ndarray:
    codes = np.arange(1 << n_bits)
    return codes ^ (codes >> 1)


def _square_qam(order: int) -> np.ndarray:
    side = int(round(np.sqrt(order)))
    if side * side != order:
        raise SignalError(f"square QAM order must be a perfect square, got {order}")
    levels = np.arange(side) * 2 - (side - 1)       # ..., -3, -1, 1, 3, ...
    gray = levels[np.argsort(_gray_sequence(int(np.log2(side))))]
    pts = (gray[:, None] + 1j * gray[None, :]).ravel()
    return pts / np.sqrt(np.mean(np.abs(pts) ** 2))


def build_constellation(name: str) -> Constellation:
    """Gray-ordered square QAM by name ("qam4" or "qam16")."""
    key = name.strip().lower().replace("-", "")
    if key in ("qam4", "4qam", "qpsk"):
        return Constellation("qam4", _square_qam(4))
    if key in ("qam16", "16qam"):
        return Constellation("qam16", _square_qam(16))
    raise SignalError(f"unknown constellation {name!r}")


def custom_constellation(points, name: str = "custom") -> Constellation:
    """Wrap explicit points (must already have unit average power)."""
    return Constellation(name, np.asarray(points, complex))


@dataclass(frozen=True)
class InputEnsemble:
    """All |A|^N transmit vectors with uniform priors, scaled by 1/sqrt(N)."""

    vectors: np.ndarray          # (K, N) complex, scaling included
    priors: np.ndarray           # (K,)
    n_tx: int
    constellation: Constellation

    def __post_init__(self):
        object.__setattr__(self, "vectors", _readonly(self.vectors, complex))
        object.__setattr__(self, "priors", _readonly(self.priors, float))
        if self.vectors.shape != (self.priors.size, self.n_tx):
            raise SignalError("ensemble vectors/priors shape mismatch")
        if abs(self.priors.sum() - 1.0) > 1e-12 or (self.priors < 0).any():
            raise SignalError("priors must be a probability vector")

    @property
    def size(self) -> int:
        return int(self.priors.size)

    @property
    def per_antenna_scale(self) -> float:
        return 1.0 / np.sqrt(self.n_tx)

    def entropy_bits(self) -> float:
        p = self.priors[self.priors > 0]
        return float(-np.sum(p * np.log2(p)))


def enumerate_inputs(
    constellation: Constellation, n_tx: int, cap: int = DEFAULT_ENSEMBLE_CAP
) -> InputEnsemble:
    """Enumerate constellation^N in lexicographic order (first antenna is the
    most significant digit), scaled to meet the transmit power constraint."""
    if n_tx < 1:
        raise SignalError("n_tx must be >= 1")
    total = constellation.size**n_tx
    if total > cap:
        raise SignalError(
            f"ensemble of {constellation.size}^{n_tx} = {total} vectors exceeds cap {cap}"
        )
    idx = np.indices((constellation.size,) * n_tx).reshape(n_tx, -1).T
    vectors = constellation.points[idx] / np.sqrt(n_tx)
    priors = np.full(total, 1.0 / total)
    return InputEnsemble(vectors, priors, n_tx, constellation)


@dataclass(frozen=True)
class NoiseModel:
    """Circularly-symmetric complex noise, variance sigma2 per receive antenna
    (sigma2/2 in each real dimension)."""

    sigma2: float
    _snr_db: float | None = field(default=None, repr=False)

    def __post_init__(self):
        if not self.sigma2 > 0:
            raise SignalError("noise variance must be positive")

    @classmethod
    def from_snr_db(cls, snr_db: float) -> "NoiseModel":
        # keep the dB value so the round trip is exact
        return cls(10.0 ** (-snr_db / 10.0), float(snr_db))

    @property
    def snr_db(self) -> float:
        if self._snr_db is not None:
            return self._snr_db
        return float(10.0 * np.log10(1.0 / self.sigma2))

    @property
    def sigma(self) -> float:
        return float(np.sqrt(self.sigma2))


@dataclass(frozen=True)
class SignVector:
    """Per-antenna (re, im) signs in {-1, +1}; bijective with a base-4 index."""

    signs: np.ndarray            # (M, 2) int8

    def __post_init__(self):
        s = _readonly(np.atleast_2d(self.signs), np.int8)
        object.__setattr__(self, "signs", s)
        if s.ndim != 2 or s.shape[1] != 2 or s.shape[0] == 0:
            raise SignalError("signs must be a non-empty (M, 2) array")
        if not np.isin(s, (-1, 1)).all():
            raise SignalError("signs must be +1 or -1")

    @property
    def m_rx(self) -> int:
        return self.signs.shape[0]

    @property
    def index(self) -> int:
        """Packed index in {0..4^M - 1}; antenna m contributes its
        quadrant code (2 per negative real part, 1 per negative imaginary
        part) times 4^m."""
        q = (self.signs[:, 0] < 0) * 2 + (self.signs[:, 1] < 0)
        return int(np.sum(q.astype(object) * (4 ** np.arange(self.m_rx, dtype=object))))

    @classmethod
    def from_index(cls, index: int, m_rx: int) -> "SignVector":
        if not 0 <= index < 4**m_rx:
            raise SignalError(f"index {index} out of range for M={m_rx}")
        q = (index // 4 ** np.arange(m_rx, dtype=object)) % 4
        q = q.astype(np.int64)
        signs = np.stack([1 - 2 * (q // 2), 1 - 2 * (q % 2)], axis=1)
        return cls(signs.astype(np.int8))


def quantize_1bit(y) -> SignVector:
    """Componentwise signs of real and imaginary parts; an exact zero maps
    to +1 (the probability-level boundary handling lives in the rate
    engines, where it matters)."""
    y = np.atleast_1d(np.asarray(y, complex))
    if not np.isfinite(y).all():
        raise SignalError("received vector must be finite")
    signs = np.stack(
        [np.where(y.real >= 0, 1, -1), np.where(y.imag >= 0, 1, -1)], axis=1
    )
    return SignVector(signs.astype(np.int8))


def sample_received(channel, x, noise: NoiseModel, rng: np.random.Generator) -> np.ndarray:
    """One noisy receive vector y = Hx + n for a single transmit vector.

    Deterministic given the generator state; each real dimension of n has
    variance sigma2/2.
    """
    h = channel.entries if hasattr(channel, "entries") else np.asarray(channel, complex)
    x = np.asarray(x, complex).ravel()
    if h.shape[1] != x.size:
        raise SignalError(f"channel is {h.shape}, transmit vector has {x.size} entries")
    m = h.shape[0]
    scale = noise.sigma / np.sqrt(2.0)
    n = scale * (rng.standard_normal(m) + 1j * rng.standard_normal(m))
    return h @ x + n


def rng_stream(seed: int, *labels) -> np.random.Generator:
    """Independent counter-based generator for a named stream.

    The Philox key is derived by hashing (seed, labels), so streams for
    different labels never collide and a given (seed, labels) pair yields
    the same draws on every platform and under any execution order.
    """
    tag = "losq/" + str(int(seed)) + "/" + "/".join(str(l) for l in labels)
    digest = hashlib.sha256(tag.encode()).digest()
    key = int.from_bytes(digest[:16], "little")
    return np.random.Generator(np.random.Philox(key=key))
