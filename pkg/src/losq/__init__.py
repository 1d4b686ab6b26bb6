"""losq: achievable rates of LOS MIMO links with 1-bit I/Q receivers.

Library layout:

* :mod:`losq.geometry` - antenna arrays, packing catalog, LOS channel
* :mod:`losq.signal` - constellations, input ensembles, quantizer, noise
* :mod:`losq.infotheory` - quadrant kernels and the rate engines
* :mod:`losq.experiments` - config-driven sweeps and CSV output
* :mod:`losq.figures` - published-figure presets and regression reports
"""

from .geometry import (
    AntennaArray,
    ArrayKind,
    ChannelMatrix,
    GeometryError,
    LinkGeometry,
    PackingCatalog,
    default_packing_catalog,
    load_packing_catalog,
    los_channel,
    packed_positions,
    ula_positions,
    ura_positions,
)
from .infotheory import (
    DecodabilityReport,
    Engine,
    EngineCapError,
    MIResult,
    QuadrantTable,
    build_quadrant_table,
    gaussian_capacity,
    high_snr_mi,
    mi_quantized_exact,
    mi_quantized_mc,
    mi_unquantized_discrete_mc,
    quadrant_probabilities,
    source_entropy,
    unique_decodability_check,
)
from .signal import (
    Constellation,
    InputEnsemble,
    NoiseModel,
    SignalError,
    SignVector,
    build_constellation,
    custom_constellation,
    enumerate_inputs,
    quantize_1bit,
    rng_stream,
    sample_received,
)
from .experiments import (
    ConfigError,
    ExperimentConfig,
    ResultRow,
    emit_csv,
    load_config,
    parse_csv,
    run_sweep,
    validate_config,
)
from .figures import FIGURE_IDS, FigureReport, reproduce_figure

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
