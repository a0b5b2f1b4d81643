import numpy as np
import pytest
from numpy.testing import assert_allclose

from helscat.beamoptics import BeamConfig, LensConfig, focus_coefficients
from helscat.materials import load_silicon
from helscat.mie import (MieSet, Particle, cross_section, mie_ab, mie_coefficients, mie_set,
                         omega_from_wavelength, truncation_order)


def test_truncation_order_examples():
    assert truncation_order(1.0) == 7
    assert truncation_order(0.01) == 3
    x = 2 * np.pi * 250 / 1000
    assert truncation_order(x) == 9
    with pytest.raises(ValueError):
        truncation_order(0.0)


def test_truncation_tail_is_small():
    mie = mie_set(float(omega_from_wavelength(1000.0)), Particle(250, load_silicon()))
    assert mie.nmax == 9
    assert abs(mie.a[-1]) < 1e-8 and abs(mie.b[-1]) < 1e-8


def test_index_matched_sphere_is_invisible():
    a, b = mie_coefficients(8, 2.3, 1.0 + 0j)
    assert np.max(np.abs(a)) < 1e-14 and np.max(np.abs(b)) < 1e-14


def test_rayleigh_limit():
    x, m = 0.01, 1.5
    a1, _ = mie_ab(1, x, m)
    rayleigh = -1j * (2 * x**3 / 3) * (m**2 - 1) / (m**2 + 2)
    assert abs(a1 - rayleigh) / abs(rayleigh) < 0.01


@pytest.mark.parametrize("x,m", [(1.5, 3.5), (0.3, 1.33), (7.0, 2.0), (2.0, 4.2)])
def test_lossless_unitarity_circle(x, m):
    a, b = mie_coefficients(truncation_order(x), x, m)
    assert np.max(np.abs(np.abs(a - 0.5) - 0.5)) < 1e-8
    assert np.max(np.abs(np.abs(b - 0.5) - 0.5)) < 1e-8


def test_known_value():
    # x = 1, m = 1.5: independent reference from a scipy-based implementation
    a, b = mie_coefficients(2, 1.0, 1.5)
    from scipy.special import spherical_jn, spherical_yn

    def ref(n, x, m):
        def psi(z):
            return z * spherical_jn(n, z), spherical_jn(n, z) + z * spherical_jn(n, z, True)

        def xi(z):
            h = spherical_jn(n, z) + 1j * spherical_yn(n, z)
            dh = spherical_jn(n, z, True) + 1j * spherical_yn(n, z, True)
            return z * h, h + z * dh

        px, dpx = psi(x)
        pm, dpm = psi(m * x)
        xx, dxx = xi(x)
        an = (m * pm * dpx - px * dpm) / (m * pm * dxx - xx * dpm)
        bn = (pm * dpx - m * px * dpm) / (pm * dxx - m * xx * dpm)
        return an, bn

    for n in (1, 2):
        ra, rb = ref(n, 1.0, 1.5)
        assert_allclose(a[n - 1], ra, rtol=1e-12)
        assert_allclose(b[n - 1], rb, rtol=1e-12)


def test_helicity_combinations():
    a = np.array([0.3 + 0.1j, 0.02 - 0.01j])
    b = np.array([0.1 - 0.2j, 0.4 + 0.05j])
    mie = MieSet.from_coefficients(1e15, a, b)
    assert_allclose(mie.V, -(a + b) / np.sqrt(2), rtol=0)
    assert_allclose(mie.W, (a - b) / np.sqrt(2), rtol=0)
    assert_allclose(-(mie.V - mie.W) / np.sqrt(2), a, rtol=1e-15)
    assert_allclose(-(mie.V + mie.W) / np.sqrt(2), b, rtol=1e-15)
    magnetic = MieSet.from_coefficients(1e15, np.zeros(2), b)
    assert_allclose(magnetic.V, -b / np.sqrt(2))
    assert_allclose(magnetic.W, -b / np.sqrt(2))
    electric = MieSet.from_coefficients(1e15, a, np.zeros(2))
    assert_allclose(electric.V, -a / np.sqrt(2))
    assert_allclose(electric.W, a / np.sqrt(2))


def test_quadrupole_dominates_electric_at_1040():
    mie = mie_set(float(omega_from_wavelength(1040.0)), Particle(250, load_silicon()))
    assert np.argmax(np.abs(mie.a)) == 1


def _focus(omega, nmax):
    return focus_coefficients(BeamConfig(), LensConfig(), omega, nmax)


def test_cross_section_sums_and_signs():
    omega = float(omega_from_wavelength(1030.0))
    mie = mie_set(omega, Particle(250, load_silicon()))
    cs = cross_section(mie, _focus(omega, mie.nmax))
    parts = np.sum(cs.electric) + np.sum(cs.magnetic)
    assert_allclose(cs.total, parts, rtol=1e-12)
    assert np.all(cs.electric >= 0) and np.all(cs.magnetic >= 0)
    assert cs.per_order[0][0] == 1
    # scattered power fraction of a unit-power beam cannot exceed 1
    assert 0 < cs.total / (2 * np.pi) < 1


def test_cross_section_zero_without_particle():
    omega = 1.8e15
    mie = MieSet.from_coefficients(omega, np.zeros(5), np.zeros(5))
    assert cross_section(mie, _focus(omega, 5)).total == 0.0


def test_cross_section_truncation_convergence():
    omega = float(omega_from_wavelength(1000.0))
    particle = Particle(250, load_silicon())
    mie = mie_set(omega, particle)
    mie2 = mie_set(omega, particle, 2 * mie.nmax)
    t1 = cross_section(mie, _focus(omega, mie.nmax)).total
    t2 = cross_section(mie2, _focus(omega, mie2.nmax)).total
    assert abs(t2 - t1) / t1 < 1e-8


def test_cross_section_frequency_mismatch():
    mie = MieSet.from_coefficients(1.8e15, np.zeros(3), np.zeros(3))
    with pytest.raises(ValueError, match="mismatch"):
        cross_section(mie, _focus(1.9e15, 3))
