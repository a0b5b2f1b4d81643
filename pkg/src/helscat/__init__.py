"""Helicity-resolved backscattering of focused light by a Mie sphere and the
resulting purity loss of frequency-entangled photon pairs."""

from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version("artifact")
except PackageNotFoundError:  # pragma: no cover - source tree without install
    __version__ = "0.0.0"

from .beamoptics import (BeamConfig, FocusExpansion, HelicitySpectrum, LensConfig, Options,
                         Quadrature, focus_coefficients, project_alpha_beta, sweep)
from .materials import MaterialError, RefractiveIndexTable, load_silicon, load_table
from .mie import MieSet, Particle, cross_section, mie_set
from .quantum import (BasisLabel, DensityMatrix4, SpectralAmplitude, density_matrix,
                      purity, purity_approx, purity_spectrum, quasi_mono_params)

__all__ = [
    "BasisLabel", "BeamConfig", "DensityMatrix4", "FocusExpansion", "HelicitySpectrum",
    "LensConfig", "MaterialError", "MieSet", "Options", "Particle", "Quadrature",
    "RefractiveIndexTable", "SpectralAmplitude", "cross_section", "density_matrix",
    "focus_coefficients", "load_silicon", "load_table", "mie_set", "project_alpha_beta",
    "purity", "purity_approx", "purity_spectrum", "quasi_mono_params", "sweep",
]
