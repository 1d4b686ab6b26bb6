"""Antenna array geometry and line-of-sight channel construction.

Arrays live in a plane transverse to the link axis; a position is a pair
``(u, v)`` in meters relative to the array center. Transmit and receive
arrays are parallel, broadside-facing, and share the boresight axis, so a
link is fully described by the two arrays, the link distance and the
carrier wavelength. Channel coefficients follow the spherical-wave model:
each entry is ``exp(-j 2 pi r / lambda)`` with ``r`` the exact Euclidean
distance between the transmit and receive element. Path attenuation is
taken as unity for all pairs (near-identical over a single LOS aperture),
so every channel entry has modulus one.

Two-dimensional receive layouts come from best-known max-min-distance
point arrangements in a square ("circle packing"); see
:func:`load_packing_catalog`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from pathlib import Path

import numpy as np

__all__ = [
    "ArrayKind",
    "AntennaArray",
    "LinkGeometry",
    "ChannelMatrix",
    "PackingCatalog",
    "GeometryError",
    "ula_positions",
    "ura_positions",
    "packed_positions",
    "los_channel",
    "load_packing_catalog",
    "default_packing_catalog",
    "BEST_KNOWN_MIN_DISTANCE",
]

_COORD_TOL = 1e-12
_PACKING_TOL = 1e-9


class GeometryError(ValueError):
    """Invalid array geometry or packing data."""


class ArrayKind(Enum):
    ULA = "ula"
    URA = "ura"
    PACKED = "packed"
    CUSTOM = "custom"


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=float)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class AntennaArray:
    """Ordered antenna coordinates in the transverse plane.

    positions: (n, 2) array of (u, v) offsets in meters from the array
        center. aperture_1d is the side of the bounding square (segment
        length for one-dimensional arrays).
    """

    positions: np.ndarray
    aperture_1d: float
    kind: ArrayKind

    def __post_init__(self):
        pos = _readonly(np.atleast_2d(self.positions))
        object.__setattr__(self, "positions", pos)
        if pos.ndim != 2 or pos.shape[1] != 2 or pos.shape[0] == 0:
            raise GeometryError("positions must be a non-empty (n, 2) array")
        if not np.isfinite(pos).all():
            raise GeometryError("positions must be finite")
        if self.aperture_1d <= 0:
            raise GeometryError("aperture must be positive")
        half = self.aperture_1d / 2 + _COORD_TOL
        if np.abs(pos).max() > half:
            raise GeometryError(
                f"coordinates exceed the declared bounding square of side {self.aperture_1d}"
            )
        if pos.shape[0] > 1 and self.min_pairwise_distance() <= 0:
            raise GeometryError("antenna positions must be pairwise distinct")
        if self.kind is ArrayKind.ULA:
            if np.abs(pos[:, 1]).max() > _COORD_TOL:
                raise GeometryError("ULA positions must have v = 0")
            if pos.shape[0] > 2:
                gaps = np.diff(np.sort(pos[:, 0]))
                if gaps.max() - gaps.min() > _COORD_TOL:
                    raise GeometryError("ULA spacing must be uniform")

    @property
    def count(self) -> int:
        return self.positions.shape[0]

    def min_pairwise_distance(self) -> float:
        if self.count < 2:
            return math.inf
        d = self.positions[:, None, :] - self.positions[None, :, :]
        dist = np.hypot(d[..., 0], d[..., 1])
        return float(dist[np.triu_indices(self.count, k=1)].min())

    def translated(self, du: float, dv: float) -> "AntennaArray":
        """Same array shifted in the transverse plane (kind becomes CUSTOM).

        Shifted coordinates may leave the centered bounding square, so the
        declared aperture grows accordingly.
        """
        pos = self.positions + np.array([du, dv])
        aperture = max(self.aperture_1d, 2 * float(np.abs(pos).max()) + 1e-9)
        return AntennaArray(pos, aperture, ArrayKind.CUSTOM)


@dataclass(frozen=True)
class LinkGeometry:
    """Broadside-facing transmit/receive arrays separated by ``distance_m``."""

    tx: AntennaArray
    rx: AntennaArray
    distance_m: float
    wavelength_m: float

    def __post_init__(self):
        if self.distance_m <= 0:
            raise GeometryError("link distance must be positive")
        if self.wavelength_m <= 0:
            raise GeometryError("wavelength must be positive")


@dataclass(frozen=True)
class ChannelMatrix:
    """M x N matrix of unit-modulus spherical-wave coefficients."""

    entries: np.ndarray
    m_rx: int = field(init=False)
    n_tx: int = field(init=False)

    def __post_init__(self):
        h = np.ascontiguousarray(self.entries, dtype=complex)
        h.flags.writeable = False
        object.__setattr__(self, "entries", h)
        if h.ndim != 2:
            raise GeometryError("channel entries must be a 2-d matrix")
        object.__setattr__(self, "m_rx", h.shape[0])
        object.__setattr__(self, "n_tx", h.shape[1])
        if np.abs(np.abs(h) - 1.0).max() > _COORD_TOL:
            raise GeometryError("channel entries must have unit modulus")


def ula_positions(aperture_d: float, count: int) -> AntennaArray:
    """Uniform linear array spanning the full aperture.

    ``count`` antennas on the u-axis with spacing ``aperture_d / (count - 1)``
    and endpoints at +/- aperture_d / 2. A single antenna sits at the
    segment center.
    """
    if count < 1:
        raise GeometryError("antenna count must be >= 1")
    if aperture_d <= 0:
        raise GeometryError("aperture must be positive")
    if count == 1:
        u = np.zeros(1)
    else:
        u = -aperture_d / 2 + aperture_d * np.arange(count) / (count - 1)
    pos = np.stack([u, np.zeros(count)], axis=1)
    return AntennaArray(pos, aperture_d, ArrayKind.ULA)


def ura_positions(aperture_d: float, count: int) -> AntennaArray:
    """Uniform rectangular array: a sqrt(count) x sqrt(count) grid on the
    aperture square, centered at the origin. ``count`` must be a perfect
    square."""
    if count < 1:
        raise GeometryError("antenna count must be >= 1")
    if aperture_d <= 0:
        raise GeometryError("aperture must be positive")
    side = math.isqrt(count)
    if side * side != count:
        raise GeometryError(f"URA count must be a perfect square, got {count}")
    if side == 1:
        g = np.zeros(1)
    else:
        g = -aperture_d / 2 + aperture_d * np.arange(side) / (side - 1)
    uu, vv = np.meshgrid(g, g, indexing="ij")
    pos = np.stack([uu.ravel(), vv.ravel()], axis=1)
    return AntennaArray(pos, aperture_d, ArrayKind.URA)


def packed_positions(aperture_d: float, count: int, catalog: "PackingCatalog") -> AntennaArray:
    """Best-known max-min-distance arrangement scaled to the aperture square.

    Catalog coordinates are used verbatim (no rotation or reflection),
    scaled by ``aperture_d`` and recentered so the square center sits at
    the origin. Ordering follows the catalog record.
    """
    if aperture_d <= 0:
        raise GeometryError("aperture must be positive")
    unit = catalog.coordinates(count)
    pos = (unit - 0.5) * aperture_d
    return AntennaArray(pos, aperture_d, ArrayKind.PACKED)


def los_channel(geom: LinkGeometry) -> ChannelMatrix:
    """Spherical-wave LOS channel for the given link.

    Entry (m, n) is exp(-j 2 pi r_mn / lambda) with
    r_mn = sqrt(R^2 + (u_tn - u_rm)^2 + (v_tn - v_rm)^2). Unit path gain.
    """
    t = geom.tx.positions
    r = geom.rx.positions
    du = t[None, :, 0] - r[:, None, 0]
    dv = t[None, :, 1] - r[:, None, 1]
    dist = np.sqrt(geom.distance_m**2 + du**2 + dv**2)
    return ChannelMatrix(np.exp(-2j * np.pi * dist / geom.wavelength_m))


# Best-known max-min distances for point arrangements in the unit square.
# Counts 2..10 are the published optima (closed forms where they exist);
# larger counts carry the distances achieved by the shipped arrangements,
# which a local solver reproduced but which are not all proven optimal.
BEST_KNOWN_MIN_DISTANCE: dict[int, float] = {
    2: math.sqrt(2),
    3: math.sqrt(6) - math.sqrt(2),
    4: 1.0,
    5: math.sqrt(2) / 2,
    6: math.sqrt(13) / 6,
    7: 2 * (2 - math.sqrt(3)),
    8: (math.sqrt(6) - math.sqrt(2)) / 2,
    9: 0.5,
    10: 0.421279543983903,
    11: 0.398207310236844,
    12: 0.388730126323019,
    13: 0.366096007696425,
    14: 0.348915260374018,
    15: 0.341081377402108,
    16: 1.0 / 3.0,
    17: 0.306153985300332,
    18: 0.300462606288665,
    19: 0.289541991994981,
    20: 0.286611652351681,
}


@dataclass(frozen=True)
class PackingCatalog:
    """Map from point count to a unit-square max-min-distance arrangement."""

    entries: dict[int, np.ndarray]

    def __post_init__(self):
        frozen = {}
        for m, coords in self.entries.items():
            c = _readonly(np.atleast_2d(coords))
            if c.shape != (m, 2):
                raise GeometryError(f"packing for M={m} must have shape ({m}, 2)")
            if c.min() < -_PACKING_TOL or c.max() > 1 + _PACKING_TOL:
                raise GeometryError(f"packing for M={m} leaves the unit square")
            declared = BEST_KNOWN_MIN_DISTANCE.get(m)
            if declared is not None and m >= 2:
                got = _min_pairwise(c)
                if abs(got - declared) > _PACKING_TOL:
                    raise GeometryError(
                        f"packing for M={m} has min distance {got!r}, "
                        f"declared best known is {declared!r}"
                    )
            frozen[m] = c
        object.__setattr__(self, "entries", frozen)

    def counts(self) -> list[int]:
        return sorted(self.entries)

    def coordinates(self, count: int) -> np.ndarray:
        try:
            return self.entries[count]
        except KeyError:
            raise GeometryError(f"no packing with {count} points in the catalog") from None

    def min_distance(self, count: int) -> float:
        c = self.coordinates(count)
        return _min_pairwise(c) if count >= 2 else math.inf


def _min_pairwise(c: np.ndarray) -> float:
    d = c[:, None, :] - c[None, :, :]
    dist = np.hypot(d[..., 0], d[..., 1])
    return float(dist[np.triu_indices(len(c), k=1)].min())


def load_packing_catalog(path: str | Path | None = None) -> PackingCatalog:
    """Read a packing catalog file.

    Format: one record per line, ``M x1 y1 x2 y2 ... xM yM`` with
    coordinates in [0, 1]; ``#`` starts a comment. Defaults to the data
    file shipped with the package.
    """
    if path is None:
        text = resources.files("losq").joinpath("data/packings.txt").read_text()
    else:
        text = Path(path).read_text()
    entries: dict[int, np.ndarray] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        try:
            m = int(fields[0])
            values = [float(f) for f in fields[1:]]
        except ValueError as exc:
            raise GeometryError(f"packings line {lineno}: {exc}") from None
        if m < 1 or len(values) != 2 * m:
            raise GeometryError(
                f"packings line {lineno}: expected {2 * m} coordinates for M={m}, "
                f"got {len(values)}"
            )
        if m in entries:
            raise GeometryError(f"packings line {lineno}: duplicate record for M={m}")
        entries[m] = np.array(values).reshape(m, 2)
    return PackingCatalog(entries)


_default_catalog: PackingCatalog | None = None


def default_packing_catalog() -> PackingCatalog:
    """Shared instance of the shipped catalog (loaded once)."""
    global _default_catalog
    if _default_catalog is None:
        _default_catalog = load_packing_catalog()
    return _default_catalog
