import os

import numpy as np
import pytest

from helscat.beamoptics import BeamConfig, LensConfig, sweep
from helscat.materials import load_silicon
from helscat.mie import Particle

THREADS = os.cpu_count() or 1
PAPER_GRID = np.linspace(975.0, 1150.0, 176)


@pytest.fixture(scope="session")
def silicon():
    return load_silicon()


@pytest.fixture(scope="session")
def particle(silicon):
    return Particle(250.0, silicon)


@pytest.fixture(scope="session")
def paper_spectrum(particle):
    return sweep(BeamConfig(), LensConfig(), particle, PAPER_GRID, threads=THREADS)


@pytest.fixture(scope="session")
def fine_spectrum(particle):
    """0.125 nm sweep wide enough for sigma = 3 THz pulses centred in [975, 1150] nm."""
    grid = np.arange(964.0, 1165.0 + 1e-9, 0.125)
    return sweep(BeamConfig(), LensConfig(), particle, grid, threads=THREADS)
