import numpy as np
import pytest

from losq import geometry
from losq.geometry import LinkGeometry, los_channel
from losq.signal import build_constellation, enumerate_inputs

DISTANCE = 100.0
WAVELENGTH = 5e-3


@pytest.fixture(scope="session")
def catalog():
    return geometry.default_packing_catalog()


def make_channel(tx, rx, distance=DISTANCE, wavelength=WAVELENGTH):
    return los_channel(LinkGeometry(tx, rx, distance, wavelength))


def qam_ensemble(name, n_tx):
    return enumerate_inputs(build_constellation(name), n_tx)


def random_custom_array(rng, count, aperture=0.5, min_sep=0.02):
    """Scattered antennas in the aperture square with a minimum separation."""
    pts = []
    while len(pts) < count:
        cand = (rng.random(2) - 0.5) * aperture
        if all(np.hypot(*(cand - p)) >= min_sep for p in pts):
            pts.append(cand)
    return geometry.AntennaArray(np.array(pts), aperture, geometry.ArrayKind.CUSTOM)
