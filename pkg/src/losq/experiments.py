"""Configuration-driven rate sweeps with reproducible output.

A sweep is a pure function of (config, seed): every (S, SNR) grid point
gets its own counter-based random stream derived from the seed, the
experiment name and the grid indices, so results do not depend on
execution order or worker count, and rerunning a config reproduces the
output CSV byte for byte.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import geometry, infotheory
from .geometry import AntennaArray, ArrayKind, GeometryError, LinkGeometry, PackingCatalog
from .infotheory import Engine, EngineCapError, MIResult
from .signal import (
    Constellation,
    DEFAULT_ENSEMBLE_CAP,
    InputEnsemble,
    NoiseModel,
    SignalError,
    build_constellation,
    enumerate_inputs,
    rng_stream,
)

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "ResultRow",
    "CSV_HEADER",
    "load_config",
    "validate_config",
    "run_sweep",
    "emit_csv",
    "parse_csv",
    "format_number",
]

log = logging.getLogger(__name__)

CSV_HEADER = "experiment,snr_db,s_factor,m_rx,n_tx,engine,mi_bpcu,stderr,samples,seed"

DEFAULT_MC_SAMPLES = 200_000
DEFAULT_MC_UNQUANTIZED_SAMPLES = 100_000


class ConfigError(ValueError):
    """Malformed or inconsistent experiment configuration."""


@dataclass(frozen=True)
class ExperimentConfig:
    """A validated sweep: geometry instantiated, S resolved to antenna counts."""

    name: str
    tx: AntennaArray
    rx_arrays: tuple[tuple[float, AntennaArray], ...]   # (s_factor, array), sweep order
    distance_m: float
    wavelength_m: float
    constellation: Constellation
    snr_grid_db: tuple[float, ...]
    engine: Engine | None                               # None = per-point default
    samples: int
    seed: int
    flags: tuple[str, ...] = ()

    @property
    def n_tx(self) -> int:
        return self.tx.count


@dataclass(frozen=True)
class ResultRow:
    """One CSV record of a sweep."""

    experiment: str
    snr_db: float
    s_factor: float
    m_rx: int
    n_tx: int
    engine: str
    mi_bpcu: float
    stderr: float
    samples: int
    seed: int


def _require_table(section, name: str) -> dict:
    if not isinstance(section, dict):
        raise ConfigError(f"section [{name}] must be a table")
    return dict(section)


def _pop(table: dict, section: str, key: str, default=None, required: bool = False):
    if key in table:
        return table.pop(key)
    if required:
        raise ConfigError(f"missing required key '{key}' in [{section}]")
    return default


def _reject_unknown(table: dict, section: str) -> None:
    if table:
        raise ConfigError(f"unknown key(s) in [{section}]: {', '.join(sorted(table))}")


def _build_array(kind: str, aperture: float, count: int, catalog: PackingCatalog,
                 section: str) -> AntennaArray:
    try:
        if kind == "ula":
            return geometry.ula_positions(aperture, count)
        if kind == "ura":
            return geometry.ura_positions(aperture, count)
        if kind == "packed":
            return geometry.packed_positions(aperture, count, catalog)
    except GeometryError as exc:
        raise ConfigError(f"[{section}] {exc}") from exc
    raise ConfigError(f"[{section}] unknown array kind {kind!r} (ula, ura, or packed)")


def load_config(path) -> dict:
    """Parse a TOML config file into a raw dict (no validation)."""
    try:
        import tomllib  # py311+
    except ModuleNotFoundError:  # pragma: no cover - py310 path
        import tomli as tomllib
    with open(path, "rb") as fh:
        return tomllib.load(fh)


def validate_config(raw: dict, catalog: PackingCatalog | None = None) -> ExperimentConfig:
    """Check a raw config dict and resolve it into runnable form.

    Resolves S <-> M (S * N must land on an integer antenna count),
    instantiates the arrays, applies engine defaults, and rejects unknown
    keys at every level.
    """
    if catalog is None:
        catalog = geometry.default_packing_catalog()
    top = dict(raw)
    name = str(_pop(top, "top level", "name", default="experiment"))
    seed = _pop(top, "top level", "seed", default=0)
    if not isinstance(seed, int) or seed < 0:
        raise ConfigError("seed must be a non-negative integer")

    tx_t = _require_table(_pop(top, "top level", "tx", required=True), "tx")
    tx_kind = str(_pop(tx_t, "tx", "kind", required=True)).lower()
    tx_aperture = float(_pop(tx_t, "tx", "aperture", required=True))
    tx_count = _pop(tx_t, "tx", "count", required=True)
    _reject_unknown(tx_t, "tx")
    if not isinstance(tx_count, int) or tx_count < 1:
        raise ConfigError("[tx] count must be a positive integer")
    tx = _build_array(tx_kind, tx_aperture, tx_count, catalog, "tx")

    rx_t = _require_table(_pop(top, "top level", "rx", required=True), "rx")
    rx_kind = str(_pop(rx_t, "rx", "kind", required=True)).lower()
    rx_aperture = float(_pop(rx_t, "rx", "aperture", required=True))
    rx_count = _pop(rx_t, "rx", "count", default=None)
    rx_s = _pop(rx_t, "rx", "s_factor", default=None)
    _reject_unknown(rx_t, "rx")
    if (rx_count is None) == (rx_s is None):
        raise ConfigError("[rx] needs exactly one of 'count' or 's_factor'")
    flags: list[str] = []
    if rx_s is not None:
        s_list = [float(s) for s in (rx_s if isinstance(rx_s, list) else [rx_s])]
        counts = []
        for s in s_list:
            m = s * tx_count
            if s <= 0 or abs(m - round(m)) > 1e-9:
                raise ConfigError(
                    f"[rx] s_factor {s} with {tx_count} transmit antennas gives a "
                    f"non-integer receive count {m}"
                )
            counts.append(int(round(m)))
    else:
        counts = [c for c in (rx_count if isinstance(rx_count, list) else [rx_count])]
        for c in counts:
            if not isinstance(c, int) or c < 1:
                raise ConfigError("[rx] count must be positive integer(s)")
    rx_arrays = []
    for m in counts:
        s = m / tx_count
        if s == 1.0:
            flags.append(f"no oversampling at S=1 (M={m})")
        rx_arrays.append((s, _build_array(rx_kind, rx_aperture, m, catalog, "rx")))

    ch_t = _require_table(_pop(top, "top level", "channel", required=True), "channel")
    distance = float(_pop(ch_t, "channel", "distance", required=True))
    wavelength = float(_pop(ch_t, "channel", "wavelength", required=True))
    _reject_unknown(ch_t, "channel")
    if distance <= 0 or wavelength <= 0:
        raise ConfigError("[channel] distance and wavelength must be positive")

    in_t = _require_table(_pop(top, "top level", "input", required=True), "input")
    const_name = str(_pop(in_t, "input", "constellation", required=True))
    _reject_unknown(in_t, "input")
    try:
        constellation = build_constellation(const_name)
    except SignalError as exc:
        raise ConfigError(str(exc)) from exc
    if constellation.size**tx_count > DEFAULT_ENSEMBLE_CAP:
        raise ConfigError(
            f"{constellation.size}^{tx_count} input vectors exceed the "
            f"enumeration cap {DEFAULT_ENSEMBLE_CAP}"
        )

    eng_t = _require_table(_pop(top, "top level", "engine", default={}), "engine")
    eng_kind = str(_pop(eng_t, "engine", "kind", default="auto")).lower()
    samples = _pop(eng_t, "engine", "samples", default=None)
    _reject_unknown(eng_t, "engine")
    if eng_kind == "auto":
        engine = None
    else:
        try:
            engine = Engine(eng_kind)
        except ValueError:
            raise ConfigError(f"[engine] unknown kind {eng_kind!r}") from None
    if samples is None:
        samples = (
            DEFAULT_MC_UNQUANTIZED_SAMPLES
            if engine is Engine.MC_UNQUANTIZED
            else DEFAULT_MC_SAMPLES
        )
    if not isinstance(samples, int) or samples < 1000:
        raise ConfigError("[engine] samples must be an integer >= 1000")

    sw_t = _require_table(_pop(top, "top level", "sweep", required=True), "sweep")
    snr_grid = _pop(sw_t, "sweep", "snr_db", required=True)
    _reject_unknown(sw_t, "sweep")
    if not isinstance(snr_grid, list) or not snr_grid:
        raise ConfigError("[sweep] snr_db must be a non-empty list")
    snr_grid = tuple(float(v) for v in snr_grid)

    _reject_unknown(top, "top level")
    return ExperimentConfig(
        name=name,
        tx=tx,
        rx_arrays=tuple(rx_arrays),
        distance_m=distance,
        wavelength_m=wavelength,
        constellation=constellation,
        snr_grid_db=snr_grid,
        engine=engine,
        samples=samples,
        seed=seed,
        flags=tuple(flags),
    )


def _resolve_engine(engine: Engine | None, m_rx: int) -> Engine:
    if engine is not None:
        return engine
    return Engine.EXACT if m_rx <= infotheory.EXACT_ENGINE_MAX_RX else Engine.MC


def compute_point(
    channel: geometry.ChannelMatrix,
    ensemble: InputEnsemble,
    snr_db: float,
    engine: Engine,
    samples: int,
    rng: np.random.Generator,
) -> MIResult:
    """Dispatch one grid point to the requested rate engine."""
    noise = NoiseModel.from_snr_db(snr_db)
    if engine is Engine.EXACT:
        return infotheory.mi_quantized_exact(channel, ensemble, noise)
    if engine is Engine.MC:
        return infotheory.mi_quantized_mc(channel, ensemble, noise, samples, rng)
    if engine is Engine.MC_UNQUANTIZED:
        return infotheory.mi_unquantized_discrete_mc(channel, ensemble, noise, samples, rng)
    if engine is Engine.CAPACITY:
        return infotheory.gaussian_capacity(channel, noise, ensemble.n_tx)
    if engine is Engine.HIGH_SNR:
        return infotheory.high_snr_mi(channel, ensemble)
    raise ValueError(f"unhandled engine {engine}")


def run_sweep(cfg: ExperimentConfig, threads: int = 1) -> list[ResultRow]:
    """All (S, SNR) grid points of a config, in deterministic order.

    Points are independent tasks; each draws from its own stream keyed by
    (seed, experiment, snr index, S index). An engine-cap violation on one
    point yields a NaN row rather than aborting the sweep.
    """
    ensemble = enumerate_inputs(cfg.constellation, cfg.n_tx)
    channels = [
        (s, geometry.los_channel(
            LinkGeometry(cfg.tx, rx, cfg.distance_m, cfg.wavelength_m)))
        for s, rx in cfg.rx_arrays
    ]

    def one_point(s_idx: int, snr_idx: int) -> ResultRow:
        s, channel = channels[s_idx]
        snr_db = cfg.snr_grid_db[snr_idx]
        engine = _resolve_engine(cfg.engine, channel.m_rx)
        rng = rng_stream(cfg.seed, cfg.name, snr_idx, s_idx)
        try:
            res = compute_point(channel, ensemble, snr_db, engine, cfg.samples, rng)
        except EngineCapError as exc:
            log.warning("point S=%s snr=%s dB skipped: %s", s, snr_db, exc)
            res = MIResult(math.nan, engine)
        log.debug(
            "%s S=%g snr=%g dB engine=%s mi=%.9g (%.3fs)",
            cfg.name, s, snr_db, res.engine.value, res.bpcu, res.wallclock,
        )
        return ResultRow(
            experiment=cfg.name,
            snr_db=snr_db,
            s_factor=s,
            m_rx=channel.m_rx,
            n_tx=cfg.n_tx,
            engine=res.engine.value,
            mi_bpcu=res.bpcu,
            stderr=res.stderr,
            samples=res.samples,
            seed=cfg.seed,
        )

    points = [
        (s_idx, snr_idx)
        for s_idx in range(len(channels))
        for snr_idx in range(len(cfg.snr_grid_db))
    ]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(lambda p: one_point(*p), points))
    else:
        rows = [one_point(*p) for p in points]
    return rows


def format_number(value: float) -> str:
    """Fixed 9-significant-digit decimal rendering used in all CSV output."""
    if isinstance(value, float) and math.isnan(value):
        return "nan"
    return format(float(value), ".9g")


def emit_csv(rows, path) -> None:
    """Write rows in the sweep schema; header-only when empty, LF endings,
    deterministic bytes for identical input."""
    lines = [CSV_HEADER]
    for r in rows:
        lines.append(
            ",".join(
                [
                    r.experiment,
                    format_number(r.snr_db),
                    format_number(r.s_factor),
                    str(r.m_rx),
                    str(r.n_tx),
                    r.engine,
                    format_number(r.mi_bpcu),
                    format_number(r.stderr),
                    str(r.samples),
                    str(r.seed),
                ]
            )
        )
    Path(path).write_text("\n".join(lines) + "\n", newline="\n")


def parse_csv(path) -> list[ResultRow]:
    """Read back a sweep CSV (inverse of emit_csv up to float formatting)."""
    text = Path(path).read_text()
    lines = [ln for ln in text.split("\n") if ln]
    if not lines or lines[0] != CSV_HEADER:
        raise ConfigError(f"{path} is not a sweep CSV (bad header)")
    rows = []
    for ln in lines[1:]:
        f = ln.split(",")
        if len(f) != 10:
            raise ConfigError(f"malformed CSV row: {ln!r}")
        rows.append(
            ResultRow(
                experiment=f[0],
                snr_db=float(f[1]),
                s_factor=float(f[2]),
                m_rx=int(f[3]),
                n_tx=int(f[4]),
                engine=f[5],
                mi_bpcu=float(f[6]),
                stderr=float(f[7]),
                samples=int(f[8]),
                seed=int(f[9]),
            )
        )
    return rows
