"""Special functions for multipole optics.

Spherical Bessel and Riccati-Bessel functions of integer order (real or
complex argument), generalized Laguerre polynomials and the angular functions
``pi_nm``/``tau_nm`` of the vector spherical harmonics.

All routines are pure. Array arguments broadcast; the order axis, when a
routine returns every order up to ``nmax``, is the leading axis.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import factorial

import numpy as np

KINDS = ("first", "second", "third")


class NumericalDomainError(ArithmeticError):
    """A special function left its finite range (e.g. ``y_n`` at ``z -> 0``)."""


def _check_finite(values, what):
    if not np.all(np.isfinite(values)):
        raise NumericalDomainError(f"non-finite value in {what}")
    return values


def _sin_cos(z):
    return np.sin(z), np.cos(z)


def spherical_jn_all(nmax: int, z):
    """Return ``j_0(z) .. j_nmax(z)`` stacked along the first axis.

    Upward recurrence where every requested order stays below ``|z|``,
    Miller's downward recurrence otherwise, normalized against whichever of
    ``j_0``/``j_1`` is larger in magnitude at each point.
    """
    if nmax < 0:
        raise ValueError("nmax must be >= 0")
    z = np.asarray(z, dtype=complex)
    out = np.empty((nmax + 1,) + z.shape, dtype=complex)
    zero = z == 0
    zs = np.where(zero, 1.0, z)
    s, c = _sin_cos(zs)
    j0 = s / zs
    j1 = s / zs**2 - c / zs
    absz = np.abs(zs)

    if nmax == 0:
        out[0] = j0
    elif np.all(absz > nmax + 1):
        out[0], out[1] = j0, j1
        for n in range(1, nmax):
            out[n + 1] = (2 * n + 1) / zs * out[n] - out[n - 1]
    else:
        start = int(max(nmax, np.max(absz))) + 20 + int(np.sqrt(40 * (nmax + 1)))
        upper = np.zeros(z.shape, dtype=complex)
        cur = np.full(z.shape, 1e-300, dtype=complex)
        vals = {}
        for n in range(start, 0, -1):
            lower = (2 * n + 1) / zs * cur - upper
            upper, cur = cur, lower
            if n - 1 <= nmax:
                vals[n - 1] = cur
            # rescale to stay inside the floating range
            big = np.abs(cur) > 1e250
            if np.any(big):
                scale = np.where(big, 1e-250, 1.0)
                cur = cur * scale
                upper = upper * scale
                for key in vals:
                    vals[key] = vals[key] * scale
        raw = np.stack([vals[n] for n in range(nmax + 1)])
        use0 = np.abs(j0) >= np.abs(j1)
        norm = np.where(use0, j0 / raw[0], j1 / raw[1])
        out[:] = raw * norm
    out[:, zero] = 0.0
    out[0, zero] = 1.0
    return out


def spherical_yn_all(nmax: int, z):
    """Return ``y_0(z) .. y_nmax(z)`` by upward recurrence."""
    z = np.asarray(z, dtype=complex)
    if np.any(z == 0):
        raise NumericalDomainError("y_n is singular at z = 0")
    out = np.empty((nmax + 1,) + z.shape, dtype=complex)
    s, c = _sin_cos(z)
    out[0] = -c / z
    if nmax >= 1:
        out[1] = -c / z**2 - s / z
    with np.errstate(over="ignore", invalid="ignore"):
        for n in range(1, nmax):
            out[n + 1] = (2 * n + 1) / z * out[n] - out[n - 1]
    return _check_finite(out, "spherical_yn")


def spherical_bessel(kind: str, n: int, z):
    """Spherical Bessel function ``j_n``, ``y_n`` or ``h_n^(1) = j_n + i y_n``.

    Parameters
    ----------
    kind : {"first", "second", "third"}
    n : int
        Order, ``n >= 0``.
    z : complex or array_like

    Raises
    ------
    NumericalDomainError
        If the result is not finite.
    """
    if kind not in KINDS:
        raise ValueError(f"kind must be one of {KINDS}, got {kind!r}")
    if n < 0:
        raise ValueError("order must be >= 0")
    if kind == "first":
        value = spherical_jn_all(n, z)[n]
    elif kind == "second":
        value = spherical_yn_all(n, z)[n]
    else:
        value = spherical_jn_all(n, z)[n] + 1j * spherical_yn_all(n, z)[n]
    value = _check_finite(value, f"spherical_bessel({kind}, {n})")
    return value[()] if np.ndim(value) == 0 else value


def spherical_hn1_all(nmax: int, z):
    """Return ``h_0^(1)(z) .. h_nmax^(1)(z)``."""
    return spherical_jn_all(nmax, z) + 1j * spherical_yn_all(nmax, z)


@dataclass(frozen=True)
class RiccatiPair:
    value: complex
    derivative: complex


def riccati_all(kind: str, nmax: int, z):
    """Riccati-Bessel values and derivatives for orders ``0..nmax``.

    ``psi_n(z) = z j_n(z)`` and ``xi_n(z) = z h_n^(1)(z)``; derivatives use
    ``f_n' = f_{n-1} - n f_n / z`` on the matching spherical function.
    """
    if kind == "psi":
        zn = spherical_jn_all(nmax, z)
    elif kind == "xi":
        zn = spherical_hn1_all(nmax, z)
    else:
        raise ValueError(f"kind must be 'psi' or 'xi', got {kind!r}")
    z = np.asarray(z, dtype=complex)
    value = z * zn
    deriv = np.empty_like(value)
    s, c = _sin_cos(z)
    # n = 0: psi_0 = sin z, xi_0 = -i e^{iz}
    deriv[0] = c if kind == "psi" else np.exp(1j * z)
    for n in range(1, nmax + 1):
        deriv[n] = z * zn[n - 1] - n * zn[n]
    _check_finite(value, f"riccati {kind}")
    _check_finite(deriv, f"riccati {kind} derivative")
    return value, deriv


def riccati(kind: str, n: int, z) -> RiccatiPair:
    """Riccati-Bessel function of order ``n >= 1`` with its derivative."""
    if n < 1:
        raise ValueError("order must be >= 1")
    if np.any(np.asarray(z) == 0):
        raise NumericalDomainError("Riccati functions need z != 0")
    value, deriv = riccati_all(kind, n, z)
    return RiccatiPair(complex(value[n]), complex(deriv[n]))


def laguerre(q: int, l: int, x):
    """Generalized Laguerre polynomial ``L_q^l(x)`` by recurrence in ``q``.

    ``l`` enters only as a parameter; negative values are allowed.
    """
    if q < 0:
        raise ValueError("q must be >= 0")
    x = np.asarray(x, dtype=float)
    prev = np.zeros_like(x)
    cur = np.ones_like(x)
    for k in range(q):
        prev, cur = cur, ((2 * k + l + 1 - x) * cur - (k + l) * prev) / (k + 1)
    return cur[()] if cur.ndim == 0 else cur


@dataclass(frozen=True)
class AngularFunctions:
    n: int
    m: int
    theta: float
    pi_nm: float
    tau_nm: float


def legendre_p_all(nmax: int, theta):
    """Legendre polynomials ``P_0 .. P_nmax`` at ``cos(theta)``."""
    mu = np.cos(np.asarray(theta, dtype=float))
    out = np.empty((nmax + 1,) + mu.shape)
    out[0] = 1.0
    if nmax >= 1:
        out[1] = mu
    for n in range(2, nmax + 1):
        out[n] = ((2 * n - 1) * mu * out[n - 1] - (n - 1) * out[n - 2]) / n
    return out


def tau_n0_all(nmax: int, theta):
    """``tau_n0(theta) = dP_n(cos theta)/dtheta`` for ``n = 0..nmax``.

    Built from ``P_n'(mu)`` via its own three-term recurrence, so the
    poles need no special casing.
    """
    theta = np.asarray(theta, dtype=float)
    mu = np.cos(theta)
    dp = np.zeros((nmax + 1,) + mu.shape)
    if nmax >= 1:
        dp[1] = 1.0
    if nmax >= 2:
        dp[2] = 3.0 * mu
    for n in range(3, nmax + 1):
        dp[n] = ((2 * n - 1) * mu * dp[n - 1] - n * dp[n - 2]) / (n - 1)
    return -np.sin(theta) * dp


def _assoc_over_sin(nmax: int, m: int, theta):
    """``P_n^m(cos theta) / sin(theta)`` for ``m >= 1`` and ``n = 0..nmax``.

    Condon-Shortley phase. The seed ``P_m^m / sin = (-1)^m (2m-1)!! sin^(m-1)``
    is finite at the poles.
    """
    theta = np.asarray(theta, dtype=float)
    mu, s = np.cos(theta), np.sin(theta)
    out = np.zeros((nmax + 1,) + theta.shape)
    if m > nmax:
        return out
    dfact = float(np.prod(np.arange(2 * m - 1, 0, -2))) if m > 0 else 1.0
    out[m] = (-1) ** m * dfact * s ** (m - 1)
    if m + 1 <= nmax:
        out[m + 1] = (2 * m + 1) * mu * out[m]
    for n in range(m + 2, nmax + 1):
        out[n] = ((2 * n - 1) * mu * out[n - 1] - (n + m - 1) * out[n - 2]) / (n - m)
    return out


def angular_functions(n: int, m: int, theta: float) -> AngularFunctions:
    """Angular functions of the vector spherical harmonics.

    ``pi_nm = m P_n^m(cos theta) / sin theta`` and
    ``tau_nm = d P_n^m(cos theta) / d theta`` (Condon-Shortley phase; for
    negative ``m``, ``P_n^{-m} = (-1)^m (n-m)!/(n+m)! P_n^m``).
    """
    if n < 1 or abs(m) > n:
        raise ValueError("need n >= 1 and |m| <= n")
    if not 0.0 <= theta <= np.pi:
        raise ValueError("theta must lie in [0, pi]")
    if m == 0:
        return AngularFunctions(n, m, theta, 0.0, float(tau_n0_all(n, theta)[n]))
    am = abs(m)
    ratio = _assoc_over_sin(n, am, theta)
    mu = np.cos(theta)
    pi_val = am * ratio[n]
    tau_val = n * mu * ratio[n] - (n + am) * ratio[n - 1]
    if m < 0:
        scale = (-1) ** am * factorial(n - am) / factorial(n + am)
        pi_val, tau_val = -scale * pi_val, scale * tau_val
    return AngularFunctions(n, m, theta, float(pi_val), float(tau_val))
