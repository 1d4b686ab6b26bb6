"""Randomized configuration matrix exercising the engine invariants.

Shared by the property suite and the acceptance gate. Each configuration
is a small random link (custom scattered receive array, random aperture,
random noise level); the checks cover output-distribution normalization,
the scale invariance I(H, sigma) = I(cH, c sigma), receive-permutation
invariance, antenna-superset monotonicity, the data-processing inequality,
rate bounds, Monte-Carlo/exact agreement, and the high-SNR limit.
"""

from dataclasses import dataclass

import numpy as np

from losq.geometry import ChannelMatrix, ula_positions
from losq.infotheory import (
    gaussian_capacity,
    high_snr_mi,
    mi_quantized_exact,
    mi_quantized_mc,
    mi_unquantized_discrete_mc,
    source_entropy,
)
from losq.signal import NoiseModel, build_constellation, enumerate_inputs, rng_stream

from conftest import make_channel, random_custom_array


@dataclass
class _RawChannel:
    """Duck-typed channel stand-in for scaled matrices (|h| != 1)."""

    entries: np.ndarray

    @property
    def m_rx(self):
        return self.entries.shape[0]

    @property
    def n_tx(self):
        return self.entries.shape[1]


@dataclass
class PropertyConfig:
    index: int
    channel: ChannelMatrix
    channel_plus: ChannelMatrix      # same link with extra receive antennas
    ensemble: object
    noise: NoiseModel
    heavy: bool                      # include the Monte-Carlo cross-checks


def sample_configs(count=50, seed=2024):
    """Generate ``count`` random configurations.

    Geometries are rejection-sampled so that every noise-free mean
    dimension is either a true boundary value or at least 5% of the
    largest one; the high-SNR consistency check is only meaningful once
    60 dB actually resolves all non-boundary dimensions.
    """
    rng = np.random.default_rng(seed)
    configs = []
    while len(configs) < count:
        n = int(rng.integers(1, 3))
        m = int(rng.integers(1, 5))
        tx = ula_positions(float(rng.uniform(0.2, 0.8)), n)
        rx = random_custom_array(rng, m, aperture=float(rng.uniform(0.3, 0.8)))
        extra = random_custom_array(rng, m + int(rng.integers(1, 3)), aperture=1.2)
        rx_plus_pos = np.vstack([rx.positions, extra.positions[m:]])
        from losq.geometry import AntennaArray, ArrayKind

        rx_plus = AntennaArray(rx_plus_pos, 1.3, ArrayKind.CUSTOM)
        channel = make_channel(tx, rx)
        channel_plus = make_channel(tx, rx_plus)
        ensemble = enumerate_inputs(build_constellation("qam4"), n)
        mu = ensemble.vectors @ channel.entries.T
        dims = np.abs(np.concatenate([mu.real.ravel(), mu.imag.ravel()]))
        top = dims.max()
        if top == 0 or ((dims > 1e-6 * top) & (dims < 0.05 * top)).any():
            continue     # gray-zone dimension: 60 dB would not be asymptotic
        noise = NoiseModel(float(10 ** rng.uniform(-1.5, 1.5)))
        configs.append(
            PropertyConfig(
                index=len(configs),
                channel=channel,
                channel_plus=channel_plus,
                ensemble=ensemble,
                noise=noise,
                heavy=len(configs) % 5 == 0,
            )
        )
    return configs


def check_normalization(cfg):
    from losq.infotheory import build_quadrant_table

    table = build_quadrant_table(cfg.channel, cfg.ensemble, cfg.noise)
    for k in range(table.n_inputs):
        total = np.ones(1)
        for m in range(table.m_rx):
            total = np.outer(total, table.probs[k, m]).ravel()
        if abs(total.sum() - 1.0) > 1e-9:
            return f"pattern probabilities sum to {total.sum()!r}"
    return None


def check_scale_invariance(cfg):
    c = 3.7
    base = mi_quantized_exact(cfg.channel, cfg.ensemble, cfg.noise).bpcu
    scaled = mi_quantized_exact(
        _RawChannel(c * cfg.channel.entries),
        cfg.ensemble,
        NoiseModel(c**2 * cfg.noise.sigma2),
    ).bpcu
    if abs(base - scaled) > 1e-9:
        return f"I(H, s) = {base!r} but I(cH, cs) = {scaled!r}"
    return None


def check_rx_permutation(cfg):
    perm = np.random.default_rng(cfg.index).permutation(cfg.channel.m_rx)
    permuted = ChannelMatrix(cfg.channel.entries[perm])
    a = mi_quantized_exact(cfg.channel, cfg.ensemble, cfg.noise).bpcu
    b = mi_quantized_exact(permuted, cfg.ensemble, cfg.noise).bpcu
    if abs(a - b) > 1e-12:
        return f"exact engine moved by {b - a!r} under receive permutation"
    a = high_snr_mi(cfg.channel, cfg.ensemble).bpcu
    b = high_snr_mi(permuted, cfg.ensemble).bpcu
    if abs(a - b) > 1e-12:
        return f"high-SNR engine moved by {b - a!r} under receive permutation"
    a = gaussian_capacity(cfg.channel, cfg.noise).bpcu
    b = gaussian_capacity(permuted, cfg.noise).bpcu
    if abs(a - b) > 1e-9:
        return f"capacity moved by {b - a!r} under receive permutation"
    return None


def check_superset_monotonicity(cfg):
    base = mi_quantized_exact(cfg.channel, cfg.ensemble, cfg.noise).bpcu
    more = mi_quantized_exact(cfg.channel_plus, cfg.ensemble, cfg.noise).bpcu
    if more < base - 1e-9:
        return f"adding antennas dropped the rate: {base!r} -> {more!r}"
    return None


def check_bounds(cfg):
    mi = mi_quantized_exact(cfg.channel, cfg.ensemble, cfg.noise).bpcu
    ceiling = min(source_entropy(cfg.ensemble), 2 * cfg.channel.m_rx)
    if not (-1e-12 <= mi <= ceiling + 1e-9):
        return f"rate {mi!r} outside [0, {ceiling!r}]"
    big_noise = mi_quantized_exact(cfg.channel, cfg.ensemble, NoiseModel(1e8)).bpcu
    if not (-1e-12 <= big_noise <= 1e-6):
        return f"rate {big_noise!r} does not vanish for huge noise"
    return None


def check_data_processing(cfg):
    quant = mi_quantized_exact(cfg.channel, cfg.ensemble, cfg.noise).bpcu
    soft = mi_unquantized_discrete_mc(
        cfg.channel, cfg.ensemble, cfg.noise, 30_000,
        rng_stream(100 + cfg.index, "prop-dpi"),
    )
    if quant > soft.bpcu + 3 * soft.stderr + 1e-9:
        return f"quantized {quant!r} exceeds unquantized {soft.bpcu!r} (+3se)"
    return None


def check_mc_agreement(cfg):
    exact = mi_quantized_exact(cfg.channel, cfg.ensemble, cfg.noise).bpcu
    mc = mi_quantized_mc(
        cfg.channel, cfg.ensemble, cfg.noise, 30_000,
        rng_stream(200 + cfg.index, "prop-mc"),
    )
    # 1e-6 floor: at saturation the sample values are all identical, the
    # standard error collapses to rounding noise, and the exact engine
    # still sums tail patterns the sampler never visits
    if abs(mc.bpcu - exact) > 3 * mc.stderr + 1e-6:
        return f"MC {mc.bpcu!r} vs exact {exact!r} beyond 3 x {mc.stderr!r}"
    return None


def check_high_snr_consistency(cfg):
    limit = high_snr_mi(cfg.channel, cfg.ensemble).bpcu
    finite = mi_quantized_exact(
        cfg.channel, cfg.ensemble, NoiseModel.from_snr_db(60)
    ).bpcu
    if abs(finite - limit) > 1e-3:
        return f"exact at 60 dB {finite!r} vs limit {limit!r}"
    return None


ALWAYS_CHECKS = (
    ("normalization", check_normalization),
    ("scale invariance", check_scale_invariance),
    ("rx permutation", check_rx_permutation),
    ("superset monotonicity", check_superset_monotonicity),
    ("bounds", check_bounds),
    ("high-SNR consistency", check_high_snr_consistency),
)
HEAVY_CHECKS = (
    ("data processing", check_data_processing),
    ("MC agreement", check_mc_agreement),
)


def run_matrix(count=50, seed=2024):
    """Run every check over the matrix; returns (n_configs, failures)."""
    failures = []
    configs = sample_configs(count, seed)
    for cfg in configs:
        checks = ALWAYS_CHECKS + (HEAVY_CHECKS if cfg.heavy else ())
        for label, fn in checks:
            msg = fn(cfg)
            if msg is not None:
                failures.append(f"config {cfg.index} [{label}]: {msg}")
    return len(configs), failures
