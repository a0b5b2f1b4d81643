"""Mie coefficients of a homogeneous sphere in vacuum.

Time convention ``exp(-i omega t)``; outgoing waves carry ``h_n^(1)``. The
helicity combinations are ``V_n = -(a_n + b_n)/sqrt(2)`` and
``W_n = (a_n - b_n)/sqrt(2)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import ceil

import numpy as np
from scipy.constants import c as SPEED_OF_LIGHT

from .materials import RefractiveIndexTable, refractive_index
from .specfun import riccati_all

SQRT2 = np.sqrt(2.0)


def truncation_order(x: float) -> int:
    """Wiscombe-style multipole cutoff ``ceil(x + 4 x^(1/3) + 2)``, at least 3."""
    if not x > 0:
        raise ValueError("size parameter must be positive")
    return max(3, ceil(x + 4.0 * x ** (1.0 / 3.0) + 2.0))


def mie_coefficients(nmax: int, x: float, m_rel: complex):
    """Arrays ``a_n, b_n`` for ``n = 1..nmax``."""
    if not x > 0:
        raise ValueError("size parameter must be positive")
    mx = m_rel * x
    psi_x, dpsi_x = riccati_all("psi", nmax, x)
    xi_x, dxi_x = riccati_all("xi", nmax, x)
    psi_mx, dpsi_mx = riccati_all("psi", nmax, mx)
    sl = slice(1, None)
    psi_x, dpsi_x, xi_x, dxi_x = psi_x[sl], dpsi_x[sl], xi_x[sl], dxi_x[sl]
    psi_mx, dpsi_mx = psi_mx[sl], dpsi_mx[sl]
    a = (m_rel * psi_mx * dpsi_x - psi_x * dpsi_mx) / (m_rel * psi_mx * dxi_x - xi_x * dpsi_mx)
    b = (psi_mx * dpsi_x - m_rel * psi_x * dpsi_mx) / (psi_mx * dxi_x - m_rel * xi_x * dpsi_mx)
    return a, b


def mie_ab(n: int, x: float, m_rel: complex) -> tuple[complex, complex]:
    if n < 1:
        raise ValueError("order must be >= 1")
    a, b = mie_coefficients(n, x, m_rel)
    return complex(a[-1]), complex(b[-1])


@dataclass(frozen=True)
class Particle:
    radius_nm: float
    material: RefractiveIndexTable

    def __post_init__(self):
        if not self.radius_nm > 0:
            raise ValueError("radius must be positive")


@dataclass(frozen=True, eq=False)
class MieSet:
    """Mie coefficients of orders ``1..N`` at one frequency."""

    omega: float
    size_parameter: float
    m_rel: complex
    a: np.ndarray
    b: np.ndarray

    @classmethod
    def from_coefficients(cls, omega, a, b, size_parameter=np.nan, m_rel=np.nan):
        a = np.asarray(a, dtype=complex)
        b = np.asarray(b, dtype=complex)
        if a.shape != b.shape or a.ndim != 1:
            raise ValueError("a and b must be 1-D arrays of equal length")
        return cls(float(omega), float(size_parameter), complex(m_rel), a, b)

    @property
    def nmax(self) -> int:
        return self.a.size

    @property
    def orders(self) -> np.ndarray:
        return np.arange(1, self.nmax + 1)

    @property
    def V(self) -> np.ndarray:
        return -(self.a + self.b) / SQRT2

    @property
    def W(self) -> np.ndarray:
        return (self.a - self.b) / SQRT2

    def truncated(self, nmax: int) -> "MieSet":
        if nmax <= self.nmax:
            return MieSet(self.omega, self.size_parameter, self.m_rel, self.a[:nmax], self.b[:nmax])
        pad = np.zeros(nmax - self.nmax, dtype=complex)
        return MieSet(self.omega, self.size_parameter, self.m_rel,
                      np.concatenate([self.a, pad]), np.concatenate([self.b, pad]))


def wavelength_nm(omega: float) -> float:
    return 2.0 * np.pi * SPEED_OF_LIGHT / omega * 1e9


def omega_from_wavelength(lambda_nm):
    return 2.0 * np.pi * SPEED_OF_LIGHT / (np.asarray(lambda_nm, dtype=float) * 1e-9)


def mie_set(omega: float, particle: Particle, nmax: int | None = None) -> MieSet:
    """Mie coefficients of ``particle`` at angular frequency ``omega`` (rad/s).

    ``nmax`` defaults to :func:`truncation_order` of the size parameter.
    """
    lam = wavelength_nm(omega)
    m_rel = refractive_index(particle.material, lam)
    x = omega / SPEED_OF_LIGHT * particle.radius_nm * 1e-9
    if nmax is None:
        nmax = truncation_order(x)
    a, b = mie_coefficients(nmax, x, m_rel)
    return MieSet(float(omega), float(x), complex(m_rel), a, b)


@dataclass(frozen=True, eq=False)
class CrossSectionDecomposition:
    omega: float
    electric: np.ndarray
    magnetic: np.ndarray

    @property
    def total(self) -> float:
        return float(np.sum(self.electric) + np.sum(self.magnetic))

    @property
    def per_order(self):
        return [(n, float(e), float(m))
                for n, (e, m) in enumerate(zip(self.electric, self.magnetic), start=1)]

    def term(self, kind: str, n: int) -> float:
        """Single contribution, ``kind`` being ``"a"`` (electric) or ``"b"`` (magnetic)."""
        arr = self.electric if kind == "a" else self.magnetic
        return float(arr[n - 1]) if n <= arr.size else 0.0


def cross_section(mie: MieSet, focus) -> CrossSectionDecomposition:
    """Per-multipole scattering cross section for a focused beam.

    ``sigma = (2 pi / k^2) sum_n |C_n|^2 (|a_n|^2 + |b_n|^2)`` with ``C_n``
    from ``focus`` (any object with ``omega`` and ``coefficients``). Lengths
    are in millimetres, matching the unit-power aperture normalization of the
    focusing coefficients, so the result is the scattered power fraction
    times ``2 pi``. Orders missing from either side contribute nothing.
    """
    if not np.isclose(mie.omega, focus.omega, rtol=1e-12, atol=0.0):
        raise ValueError(f"frequency mismatch: mie at {mie.omega}, focus at {focus.omega}")
    k = mie.omega / SPEED_OF_LIGHT * 1e-3
    n = min(mie.nmax, len(focus.coefficients))
    weight = 2.0 * np.pi / k**2 * np.abs(np.asarray(focus.coefficients)[:n]) ** 2
    return CrossSectionDecomposition(
        mie.omega, weight * np.abs(mie.a[:n]) ** 2, weight * np.abs(mie.b[:n]) ** 2
    )
