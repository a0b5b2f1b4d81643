"""Focused Laguerre-Gauss illumination, scattering and helicity projection.

The chain goes aperture field -> helicity multipole coefficients ``C_n``
(aplanatic lens) -> scattered field on the lens reference sphere ->
collimated field in the aperture -> overlaps ``alpha``/``beta`` with the
backward-propagating Laguerre-Gauss modes of either helicity.

Lengths are in millimetres throughout this module; aperture fields are in
units of ``1/mm`` (unit power over the aperture plane), which makes
``alpha`` and ``beta`` dimensionless channel amplitudes.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from functools import lru_cache
from dataclasses import dataclass
from math import factorial

import numpy as np
from scipy.constants import c as SPEED_OF_LIGHT

from .mie import MieSet, Particle, mie_set, omega_from_wavelength
from .specfun import laguerre, legendre_p_all, riccati_all, tau_n0_all

SQRT2 = np.sqrt(2.0)
SPEED_OF_LIGHT_MM = SPEED_OF_LIGHT * 1e3


@lru_cache(maxsize=32)
def gauss_legendre(order: int):
    """Read-only Gauss-Legendre nodes and weights on [-1, 1]."""
    x, w = np.polynomial.legendre.leggauss(order)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


class QuadratureError(ArithmeticError):
    """A quadrature failed its order-doubling convergence check."""


def spin_vector(s: int) -> np.ndarray:
    """Cartesian spin unit vector: ``u_{+1} = (1, i, 0)/sqrt2``, ``u_{-1} = (-1, i, 0)/sqrt2``."""
    if s == 1:
        return np.array([1.0, 1.0j, 0.0]) / SQRT2
    if s == -1:
        return np.array([-1.0, 1.0j, 0.0]) / SQRT2
    if s == 0:
        return np.array([0.0, 0.0, 1.0], dtype=complex)
    raise ValueError("spin must be -1, 0 or +1")


@dataclass(frozen=True)
class BeamConfig:
    """Input Laguerre-Gauss mode.

    ``helicity`` is that of the forward (+z) propagating beam, equal to its
    spin ``s``; the orbital index is ``l = m - s``.
    """

    waist_mm: float = 0.5
    q: int = 0
    s: int = -1
    m: int = 0

    def __post_init__(self):
        if self.s not in (-1, 1):
            raise ValueError("spin s must be +1 or -1")
        if self.m != 0:
            raise ValueError("only total angular momentum m = 0 is supported")
        if self.q < 0:
            raise ValueError("radial index q must be >= 0")
        if not self.waist_mm > 0:
            raise ValueError("waist must be positive")

    @property
    def l(self) -> int:
        return self.m - self.s

    @property
    def helicity(self) -> int:
        return self.s


@dataclass(frozen=True)
class LensConfig:
    na: float = 0.9
    focal_mm: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.na < 1.0:
            raise ValueError("numerical aperture must lie strictly inside (0, 1)")
        if not self.focal_mm > 0:
            raise ValueError("focal length must be positive")

    @property
    def theta_max(self) -> float:
        return float(np.arcsin(self.na))

    @property
    def aperture_radius_mm(self) -> float:
        return self.focal_mm * self.na


@dataclass(frozen=True)
class Quadrature:
    """Quadrature orders: Gauss-Legendre in the focusing angle, Gauss-Legendre
    radial times uniform azimuthal over the aperture disk."""

    theta: int = 128
    radial: int = 96
    azimuthal: int = 64
    azimuthal_offset: float = 0.0


@dataclass(frozen=True)
class Options:
    """Model switches; the defaults reproduce the published formulas."""

    collimation_exponent: float = 1.0
    focal_phase: bool = True


@dataclass(frozen=True, eq=False)
class FocusExpansion:
    omega: float
    coefficients: np.ndarray
    helicity: int

    @property
    def nmax(self) -> int:
        return len(self.coefficients)

    def tail_ratio(self, n_from: int) -> float:
        """``max_{n >= n_from} |C_n| / max |C_n|``."""
        mag = np.abs(self.coefficients)
        if n_from > mag.size:
            return 0.0
        return float(mag[n_from - 1:].max() / mag.max())


@dataclass(frozen=True, eq=False)
class FieldSample:
    position: tuple
    E: np.ndarray


@dataclass(frozen=True, eq=False)
class HelicitySpectrum:
    """Sampled ``alpha(omega)``, ``beta(omega)`` on an increasing frequency grid.

    ``delay`` (seconds) names a common carrier ``exp(-i omega delay)`` that is
    divided out before interpolation and differentiation, so that only the
    slowly varying envelope is sampled linearly.
    """

    omega: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray
    fingerprint: str = ""
    wavelengths: np.ndarray | None = None
    delay: float = 0.0

    def __post_init__(self):
        omega = np.asarray(self.omega, dtype=float)
        alpha = np.asarray(self.alpha, dtype=complex)
        beta = np.asarray(self.beta, dtype=complex)
        if not (omega.shape == alpha.shape == beta.shape) or omega.ndim != 1:
            raise ValueError("omega, alpha and beta must be 1-D of equal length")
        if omega.size < 2 or np.any(np.diff(omega) <= 0):
            raise ValueError("frequency grid must be strictly increasing with >= 2 points")
        object.__setattr__(self, "omega", omega)
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "beta", beta)
        if self.wavelengths is not None:
            lam = np.asarray(self.wavelengths, dtype=float)
            if lam.shape != omega.shape:
                raise ValueError("wavelengths must match the frequency grid")
            object.__setattr__(self, "wavelengths", lam)

    @classmethod
    def from_wavelengths(cls, lambda_nm, alpha, beta, fingerprint="", delay=0.0):
        """Build from samples given on a wavelength grid (any order); the
        wavelengths are kept verbatim for output."""
        lambda_nm = np.asarray(lambda_nm, dtype=float)
        omega = omega_from_wavelength(lambda_nm)
        order = np.argsort(omega)
        return cls(omega[order], np.asarray(alpha)[order], np.asarray(beta)[order],
                   fingerprint, lambda_nm[order], float(delay))

    def _carrier(self, omega):
        return np.exp(-1j * np.asarray(omega, dtype=float) * self.delay)

    def derivative(self, omega: float):
        """``(d alpha/d omega, d beta/d omega)`` from the parabola through the
        three grid nodes nearest ``omega`` (central difference on a
        non-uniform grid), applied to the envelope."""
        if not self.omega[0] < omega < self.omega[-1]:
            raise ValueError("derivative requested outside the spectrum interior")
        centre = int(np.clip(np.argmin(np.abs(self.omega - omega)), 1, self.omega.size - 2))
        idx = slice(centre - 1, centre + 2)
        x = self.omega[idx] - omega
        strip = 1.0 / self._carrier(self.omega[idx])
        carrier = complex(self._carrier(omega))
        out = []
        for full in (self.alpha[idx], self.beta[idx]):
            y = full * strip
            # Lagrange derivative at 0 through (x0, y0), (x1, y1), (x2, y2)
            x0, x1, x2 = x
            d = (y[0] * (-x1 - x2) / ((x0 - x1) * (x0 - x2))
                 + y[1] * (-x0 - x2) / ((x1 - x0) * (x1 - x2))
                 + y[2] * (-x0 - x1) / ((x2 - x0) * (x2 - x1)))
            value = np.interp(0.0, x, y.real) + 1j * np.interp(0.0, x, y.imag)
            out.append(complex(carrier * (d - 1j * self.delay * value)))
        return out[0], out[1]

    @property
    def lambda_nm(self) -> np.ndarray:
        if self.wavelengths is not None:
            return self.wavelengths
        return 2 * np.pi * SPEED_OF_LIGHT / self.omega * 1e9

    def interpolate(self, omega):
        """Linear interpolation of ``alpha``, ``beta`` at ``omega``."""
        omega = np.asarray(omega, dtype=float)
        lo, hi = self.omega[0], self.omega[-1]
        if np.any(omega < lo * (1 - 1e-14)) or np.any(omega > hi * (1 + 1e-14)):
            raise ValueError(
                f"frequencies [{omega.min():.6e}, {omega.max():.6e}] rad/s outside the "
                f"spectrum range [{lo:.6e}, {hi:.6e}] rad/s"
            )
        strip = 1.0 / self._carrier(self.omega)
        env_a, env_b = self.alpha * strip, self.beta * strip
        a = np.interp(omega, self.omega, env_a.real) + 1j * np.interp(omega, self.omega, env_a.imag)
        b = np.interp(omega, self.omega, env_b.real) + 1j * np.interp(omega, self.omega, env_b.imag)
        if self.delay:
            carrier = self._carrier(omega)
            a, b = a * carrier, b * carrier
        return a, b


# ---------------------------------------------------------------- input mode

def lg_radial(beam: BeamConfig, rho, l: int | None = None):
    """Normalized radial profile of the Laguerre-Gauss mode (``1/mm``)."""
    l = beam.l if l is None else l
    al = abs(l)
    w0 = beam.waist_mm
    rho = np.asarray(rho, dtype=float)
    norm = np.sqrt(2.0 * factorial(beam.q) / (np.pi * factorial(beam.q + al))) / w0
    u = 2.0 * rho**2 / w0**2
    return norm * (np.sqrt(2.0) * rho / w0) ** al * np.exp(-rho**2 / w0**2) * laguerre(beam.q, al, u)


def lg_field(beam: BeamConfig, rho, phi, l: int | None = None, s: int | None = None):
    """Vector LG field ``E(rho, phi)`` with shape ``rho.shape + (3,)``."""
    l = beam.l if l is None else l
    s = beam.s if s is None else s
    amp = lg_radial(beam, rho, l) * np.exp(1j * l * np.asarray(phi, dtype=float))
    return amp[..., None] * spin_vector(s)


def lg_mode(beam: BeamConfig, rho: float, phi: float) -> FieldSample:
    """Input mode sampled at aperture polar coordinates ``(rho [mm], phi)``."""
    if rho < 0:
        raise ValueError("rho must be >= 0")
    return FieldSample(("aperture", rho, phi), lg_field(beam, rho, phi))


def backward_mode(beam: BeamConfig, helicity: int, rho, phi):
    """Backward-propagating projection mode of the given helicity.

    Helicity ``h`` along ``-z`` means spin ``-h`` along ``+z`` and, at
    ``m = 0``, orbital index ``l = h``.
    """
    return lg_field(beam, rho, phi, l=helicity, s=-helicity)


# ----------------------------------------------------------------- focusing

def wigner_d_0h(nmax: int, helicity: int, theta):
    """Small Wigner d ``d^n_{0,h}(theta)`` for ``n = 1..nmax`` and ``h = +-1``."""
    n = np.arange(1, nmax + 1).reshape((-1,) + (1,) * np.ndim(theta))
    tau = tau_n0_all(nmax, theta)[1:]
    return -helicity * tau / np.sqrt(n * (n + 1))


def focus_coefficients(beam: BeamConfig, lens: LensConfig, omega: float,
                       nmax: int, order: int = 128,
                       focal_phase: bool = True) -> FocusExpansion:
    """Helicity-multipole coefficients ``C_n`` of the focused beam.

    ``C_n = i^n sqrt(2n+1) k sqrt(2 pi) (-i) f e^{-ikf}
    * int_0^theta_max sin(t) d^n_{0,h}(t) u(f sin t) sqrt(cos t) dt``
    with ``u`` the aperture amplitude along the spin vector, evaluated by
    Gauss-Legendre quadrature of the given order. The helicity sign of the
    Wigner function is absorbed into the multipole phase convention of
    :func:`helicity_multipoles`, so the integrand carries ``h d^n_{0,h}``;
    with it ``sqrt2 sum_n C_n A^{(h)}_{1,n}`` equals the Richards-Wolf focal
    field for either helicity.
    """
    if not omega > 0:
        raise ValueError("omega must be positive")
    k = omega / SPEED_OF_LIGHT_MM
    f = lens.focal_mm
    if nmax < 1:
        raise ValueError("nmax must be >= 1")
    x, w = gauss_legendre(order)
    half = 0.5 * lens.theta_max
    theta = half * (x + 1.0)
    weights = half * w
    amp = lg_radial(beam, f * np.sin(theta))
    d = beam.helicity * wigner_d_0h(nmax, beam.helicity, theta)
    integral = d @ (weights * np.sin(theta) * amp * np.sqrt(np.cos(theta)))
    n = np.arange(1, nmax + 1)
    phase = np.exp(-1j * k * f) if focal_phase else 1.0
    coeffs = (1j**n) * np.sqrt(2 * n + 1) * k * np.sqrt(2 * np.pi) * (-1j) * f * phase * integral
    return FocusExpansion(float(omega), coeffs, beam.helicity)


def check_focus_convergence(beam, lens, omega, nmax, order=128, rtol=1e-8):
    """Raise :class:`QuadratureError` unless doubling ``order`` moves every
    significant ``C_n`` by less than ``rtol`` (relative to ``max |C_n|``)."""
    c1 = focus_coefficients(beam, lens, omega, nmax, order).coefficients
    c2 = focus_coefficients(beam, lens, omega, nmax, 2 * order).coefficients
    change = np.max(np.abs(c2 - c1)) / np.max(np.abs(c2))
    if change > rtol:
        raise QuadratureError(f"C_n quadrature not converged: relative change {change:.2e}")
    return change


# ------------------------------------------------------- multipole fields

def _spherical_basis(theta, phi):
    theta, phi = np.broadcast_arrays(np.asarray(theta, float), np.asarray(phi, float))
    st, ct = np.sin(theta), np.cos(theta)
    sp, cp = np.sin(phi), np.cos(phi)
    r_hat = np.stack([st * cp, st * sp, ct], axis=-1)
    t_hat = np.stack([ct * cp, ct * sp, -st], axis=-1)
    p_hat = np.stack([-sp, cp, np.zeros_like(sp)], axis=-1)
    return r_hat, t_hat, p_hat


def multipole_components(nmax: int, kr: float, theta, kind: str = "outgoing"):
    """Spherical components of ``M_n0`` and ``N_n0`` for ``n = 1..nmax``.

    Returns ``(m_phi, n_r, n_theta)`` with shapes ``(nmax,) + theta.shape``;
    ``M_n0 = -z_n(kr) tau_n phi_hat`` and
    ``N_n0 = n(n+1) z_n/(kr) P_n r_hat + [kr z_n]'/(kr) tau_n theta_hat``.
    """
    riccati_kind = {"outgoing": "xi", "regular": "psi"}[kind]
    value, deriv = riccati_all(riccati_kind, nmax, kr)
    zn = value[1:] / kr
    dzn = deriv[1:] / kr
    n = np.arange(1, nmax + 1)
    shape = (nmax,) + (1,) * np.ndim(theta)
    tau = tau_n0_all(nmax, theta)[1:]
    pn = legendre_p_all(nmax, theta)[1:]
    m_phi = -zn.reshape(shape) * tau
    n_r = (n * (n + 1)).reshape(shape) * (zn / kr).reshape(shape) * pn
    n_theta = dzn.reshape(shape) * tau
    return m_phi, n_r, n_theta


def multipole_norm(nmax: int) -> np.ndarray:
    n = np.arange(1, nmax + 1)
    return np.sqrt((2 * n + 1) / (4 * np.pi * n * (n + 1)))


def helicity_multipoles(nmax: int, k: float, r: float, theta, phi, helicity: int,
                        kind: str = "outgoing"):
    """Cartesian helicity multipoles ``A^{(h)}_n = i kappa_n (M_n0 + h N_n0)/sqrt2``.

    ``kappa_n`` is the unit-sphere normalization of the vector spherical
    harmonics. Shape ``(nmax,) + theta.shape + (3,)``.
    """
    theta = np.asarray(theta, dtype=float)
    phi = np.broadcast_to(np.asarray(phi, dtype=float), theta.shape)
    m_phi, n_r, n_theta = multipole_components(nmax, k * r, theta, kind)
    r_hat, t_hat, p_hat = _spherical_basis(theta, phi)
    coeff = (1j * multipole_norm(nmax) / SQRT2).reshape((nmax,) + (1,) * (theta.ndim + 1))
    field = (m_phi[..., None] * p_hat
             + helicity * (n_r[..., None] * r_hat + n_theta[..., None] * t_hat))
    return coeff * field


def _scattered_spherical(mie: MieSet, focus: FocusExpansion, k, r, theta):
    """``(E_r, E_theta, E_phi)`` of the scattered field; independent of phi for m = 0."""
    nmax = min(mie.nmax, focus.nmax)
    h = focus.helicity
    theta = np.asarray(theta, dtype=float)
    c = np.asarray(focus.coefficients)[:nmax] * 1j * multipole_norm(nmax) / SQRT2
    same = c * mie.V[:nmax]
    flip = c * mie.W[:nmax]
    m_phi, n_r, n_theta = multipole_components(nmax, k * r, theta)
    m_coef = same + flip
    n_coef = h * (same - flip)
    e_r = np.tensordot(n_coef, n_r, axes=(0, 0))
    e_theta = np.tensordot(n_coef, n_theta, axes=(0, 0))
    e_phi = np.tensordot(m_coef, m_phi, axes=(0, 0))
    return e_r, e_theta, e_phi


def _scattered_cartesian(mie: MieSet, focus: FocusExpansion, k, r, theta, phi):
    theta, phi = np.asarray(theta, dtype=float), np.asarray(phi, dtype=float)
    e_r, e_theta, e_phi = _scattered_spherical(mie, focus, k, r, theta)
    r_hat, t_hat, p_hat = _spherical_basis(theta, phi)
    return e_r[..., None] * r_hat + e_theta[..., None] * t_hat + e_phi[..., None] * p_hat


def scattered_field(mie: MieSet, focus: FocusExpansion, r: float, phi_s: float,
                    theta: float) -> FieldSample:
    """``E_SC = sum_n C_n (V_n A_{3,n}^{(h)} + W_n A_{3,n}^{(-h)})`` at one point.

    ``r`` in mm; ``theta`` is the polar angle from ``+z``.
    """
    if not np.isclose(mie.omega, focus.omega, rtol=1e-12, atol=0.0):
        raise ValueError("mie and focus expansions refer to different frequencies")
    k = mie.omega / SPEED_OF_LIGHT_MM
    E = _scattered_cartesian(mie, focus, k, r, np.asarray(theta), np.asarray(phi_s))
    return FieldSample(("sphere", r, phi_s, theta), E)


# --------------------------------------------------------------- collimation

def euler_rotation(phi, theta) -> np.ndarray:
    """Position-dependent rotation ``R = P(phi) R_x(theta) P(phi)^T`` with
    ``P = [[sin, -cos, 0], [cos, sin, 0], [0, 0, 1]]``.

    Its fixed axis is ``(sin phi, cos phi, 0)``: the azimuth is measured
    clockwise, so collimation evaluates it at ``-phi_s``.
    """
    phi = np.asarray(phi, dtype=float)
    theta = np.asarray(theta, dtype=float)
    sp, cp = np.sin(phi), np.cos(phi)
    st, ct = np.sin(theta), np.cos(theta)
    zero, one = np.zeros_like(sp), np.ones_like(sp)
    p = np.stack([np.stack([sp, -cp, zero], -1), np.stack([cp, sp, zero], -1),
                  np.stack([zero, zero, one], -1)], -2)
    zt, ot = np.zeros_like(st), np.ones_like(st)
    rx = np.stack([np.stack([ot, zt, zt], -1), np.stack([zt, ct, -st], -1),
                   np.stack([zt, st, ct], -1)], -2)
    return p @ rx @ np.swapaxes(p, -1, -2)


def collimate(E_sc, theta_prime, phi_s, focal_mm: float = 1.0, exponent: float = 1.0) -> FieldSample:
    """Map a field sampled on the backward cap into the lens aperture.

    ``theta_prime`` is measured from the backward (-z) axis. Returns the
    field ``R E / cos(theta')^exponent`` at ``rho = f sin(theta')``,
    ``phi_p = phi_s``.
    """
    theta_prime = np.asarray(theta_prime, dtype=float)
    if np.any(theta_prime < 0) or np.any(theta_prime >= np.pi / 2):
        raise ValueError("theta' must lie in [0, pi/2)")
    rot = euler_rotation(-np.asarray(phi_s, dtype=float), theta_prime)
    E_col = np.einsum("...ij,...j->...i", rot, np.asarray(E_sc)) / np.cos(theta_prime)[..., None] ** exponent
    rho = focal_mm * np.sin(theta_prime)
    return FieldSample(("aperture", rho, phi_s), E_col)


# ---------------------------------------------------------------- projection

def _aperture_grid(lens: LensConfig, quad: Quadrature):
    x, w = gauss_legendre(quad.radial)
    R = lens.aperture_radius_mm
    rho = 0.5 * R * (x + 1.0)
    w_rho = 0.5 * R * w * rho
    phi = quad.azimuthal_offset + 2 * np.pi * np.arange(quad.azimuthal) / quad.azimuthal
    w_phi = 2 * np.pi / quad.azimuthal
    return rho, w_rho, phi, w_phi


def collimated_field(mie: MieSet, focus: FocusExpansion, lens: LensConfig,
                     rho, phi, options: Options = Options()):
    """Collimated backscattered field at aperture points ``(rho, phi)``."""
    rho, phi = np.asarray(rho, float), np.asarray(phi, float)
    f = lens.focal_mm
    theta_prime = np.arcsin(rho / f)
    k = mie.omega / SPEED_OF_LIGHT_MM
    E_sc = _scattered_cartesian(mie, focus, k, f, np.pi - theta_prime, phi)
    theta_prime = np.broadcast_to(theta_prime, E_sc.shape[:-1])
    phi = np.broadcast_to(phi, E_sc.shape[:-1])
    return collimate(E_sc, theta_prime, phi, f, options.collimation_exponent).E


def project_alpha_beta(beam: BeamConfig, lens: LensConfig, mie: MieSet,
                       focus: FocusExpansion, quad: Quadrature = Quadrature(),
                       options: Options = Options()) -> tuple[complex, complex]:
    """Overlap of the collimated field with the helicity-preserving (``alpha``)
    and helicity-flipped (``beta``) backward modes."""
    if not np.isclose(mie.omega, focus.omega, rtol=1e-12, atol=0.0):
        raise ValueError("mie and focus expansions refer to different frequencies")
    rho, w_rho, phi, w_phi = _aperture_grid(lens, quad)
    RHO, PHI = np.meshgrid(rho, phi, indexing="ij")
    E_col = collimated_field(mie, focus, lens, rho[:, None], phi[None, :], options)
    weights = (w_rho[:, None] * w_phi)[..., None]
    h = beam.helicity
    mode_a = backward_mode(beam, h, RHO, PHI)
    mode_b = backward_mode(beam, -h, RHO, PHI)
    alpha = np.sum(weights * np.conj(mode_a) * E_col)
    beta = np.sum(weights * np.conj(mode_b) * E_col)
    return complex(alpha), complex(beta)


def single_frequency(omega: float, beam: BeamConfig, lens: LensConfig, particle: Particle,
                     quad: Quadrature = Quadrature(), options: Options = Options(),
                     nmax: int | None = None):
    """``(alpha, beta, mie, focus)`` at one angular frequency."""
    mie = mie_set(omega, particle, nmax)
    focus = focus_coefficients(beam, lens, omega, mie.nmax, quad.theta, options.focal_phase)
    alpha, beta = project_alpha_beta(beam, lens, mie, focus, quad, options)
    return alpha, beta, mie, focus


class SweepError(RuntimeError):
    def __init__(self, lambda_nm, cause):
        super().__init__(f"sweep failed at lambda = {lambda_nm} nm: {cause}")
        self.lambda_nm = lambda_nm


def sweep(beam: BeamConfig, lens: LensConfig, particle: Particle, lambda_nm,
          quad: Quadrature = Quadrature(), options: Options = Options(),
          threads: int = 1, fingerprint: str = "") -> HelicitySpectrum:
    """``alpha``, ``beta`` over a wavelength grid (nm).

    Each wavelength is independent; results are collected by grid index so
    the output does not depend on ``threads``.
    """
    lambda_nm = np.asarray(lambda_nm, dtype=float)
    if lambda_nm.ndim != 1 or lambda_nm.size < 2:
        raise ValueError("need a 1-D wavelength grid with at least 2 points")

    def one(lam):
        try:
            a, b, _, _ = single_frequency(float(omega_from_wavelength(lam)), beam, lens,
                                          particle, quad, options)
        except Exception as exc:  # noqa: BLE001 - re-raised with the offending wavelength
            raise SweepError(float(lam), exc) from exc
        return a, b

    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            values = list(pool.map(one, lambda_nm))
    else:
        values = [one(lam) for lam in lambda_nm]
    alpha = np.array([v[0] for v in values])
    beta = np.array([v[1] for v in values])
    # the outgoing wave carries exp(+ikf); the optional lens factor exp(-ikf) removes it
    delay = 0.0 if options.focal_phase else -lens.focal_mm / SPEED_OF_LIGHT_MM
    return HelicitySpectrum.from_wavelengths(lambda_nm, alpha, beta, fingerprint, delay)
