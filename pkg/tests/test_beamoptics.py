import numpy as np
import pytest
from numpy.testing import assert_allclose

from helscat.beamoptics import (BeamConfig, HelicitySpectrum, LensConfig, Options, Quadrature,
                                QuadratureError, SweepError, SPEED_OF_LIGHT_MM, _spherical_basis,
                                backward_mode, check_focus_convergence, collimate,
                                euler_rotation, focus_coefficients, helicity_multipoles,
                                lg_field, lg_mode, project_alpha_beta,
                                scattered_field, single_frequency, spin_vector, sweep)
from helscat.mie import MieSet, mie_set, omega_from_wavelength

OMEGA_1000 = float(omega_from_wavelength(1000.0))
BEAM = BeamConfig()
LENS = LensConfig()


# --------------------------------------------------------------- LG modes

def test_beam_derived_indices():
    assert BEAM.l == 1 and BEAM.helicity == -1
    assert BeamConfig(s=1).l == -1
    with pytest.raises(ValueError):
        BeamConfig(m=1)
    with pytest.raises(ValueError):
        BeamConfig(s=0)


def test_lens_validation():
    assert_allclose(LENS.theta_max, np.arcsin(0.9))
    assert_allclose(LENS.aperture_radius_mm, 0.9)
    for na in (0.0, 1.0, 1.3):
        with pytest.raises(ValueError):
            LensConfig(na=na)


def test_vortex_null_and_phase():
    assert np.all(lg_mode(BEAM, 0.0, 0.7).E == 0)
    rho0, phi = 0.3, 1.234
    e0 = lg_mode(BEAM, rho0, 0.0).E
    e1 = lg_mode(BEAM, rho0, phi).E
    assert_allclose(np.angle(e1[1] / e0[1]), BEAM.l * phi, rtol=1e-14)
    with pytest.raises(ValueError):
        lg_mode(BEAM, -1.0, 0.0)


@pytest.mark.parametrize("q,s", [(0, -1), (0, 1), (2, -1), (1, 1)])
def test_lg_unit_norm(q, s):
    beam = BeamConfig(q=q, s=s)
    x, w = np.polynomial.legendre.leggauss(400)
    rmax = 12 * beam.waist_mm
    rho = 0.5 * rmax * (x + 1)
    weight = 0.5 * rmax * w * rho
    phi = 2 * np.pi * np.arange(16) / 16
    field = lg_field(beam, rho[:, None], phi[None, :])
    norm = np.sum(weight[:, None, None] * np.abs(field) ** 2) * 2 * np.pi / 16
    assert abs(norm - 1.0) < 1e-10


def test_spin_vectors_orthonormal():
    u = np.array([spin_vector(s) for s in (1, 0, -1)])
    assert_allclose(u.conj() @ u.T, np.eye(3), atol=1e-15)
    with pytest.raises(ValueError):
        spin_vector(2)


def test_backward_modes_orthonormal_pair():
    x, w = np.polynomial.legendre.leggauss(200)
    rho = 3.0 * (x + 1)
    weight = 3.0 * w * rho
    phi = 2 * np.pi * np.arange(8) / 8
    plus = backward_mode(BEAM, 1, rho[:, None], phi[None, :])
    minus = backward_mode(BEAM, -1, rho[:, None], phi[None, :])
    dphi = 2 * np.pi / 8
    gram = lambda a, b: np.sum(weight[:, None, None] * np.conj(a) * b) * dphi
    assert_allclose(gram(plus, plus), 1.0, atol=1e-10)
    assert abs(gram(plus, minus)) < 1e-14


# ---------------------------------------------------------------- focusing

def test_focus_convergence():
    change = check_focus_convergence(BEAM, LENS, OMEGA_1000, 9, order=128, rtol=1e-8)
    assert change < 1e-8


def test_focus_convergence_failure_is_reported():
    with pytest.raises(QuadratureError):
        check_focus_convergence(BEAM, LENS, OMEGA_1000, 40, order=8, rtol=1e-8)


def test_vanishing_aperture():
    small = focus_coefficients(BEAM, LensConfig(na=1e-4), OMEGA_1000, 9)
    big = focus_coefficients(BEAM, LENS, OMEGA_1000, 9)
    assert np.max(np.abs(small.coefficients)) < 1e-6 * np.max(np.abs(big.coefficients))


def _richards_wolf(beam, lens, omega, point, n_theta=200, n_phi=128):
    """Direct angular-spectrum integral of the aplanatic lens (independent oracle)."""
    k = omega / SPEED_OF_LIGHT_MM
    f = lens.focal_mm
    x, w = np.polynomial.legendre.leggauss(n_theta)
    th = 0.5 * lens.theta_max * (x + 1)
    wt = 0.5 * lens.theta_max * w
    ph = 2 * np.pi * np.arange(n_phi) / n_phi
    TH, PH = np.meshgrid(th, ph, indexing="ij")
    r_hat, t_hat, p_hat = _spherical_basis(TH, PH)
    rho_hat = np.stack([np.cos(PH), np.sin(PH), 0 * PH], -1)
    e_in = lg_field(beam, f * np.sin(TH), PH)
    e_inf = (np.sum(e_in * p_hat, -1)[..., None] * p_hat
             + np.sum(e_in * rho_hat, -1)[..., None] * t_hat) * np.sqrt(np.cos(TH))[..., None]
    phase = np.exp(1j * k * (r_hat @ point))
    weight = (wt[:, None] * np.sin(TH) * 2 * np.pi / n_phi)[..., None]
    return np.sum(weight * e_inf * phase[..., None], axis=(0, 1)) * (-1j * k * f * np.exp(-1j * k * f) / (2 * np.pi))


@pytest.mark.parametrize("s", [-1, 1])
def test_multipole_expansion_reproduces_richards_wolf(s):
    beam = BeamConfig(s=s)
    k = OMEGA_1000 / SPEED_OF_LIGHT_MM
    point = np.array([1.1e-4, 2.3e-4, 1.5e-4])
    r = np.linalg.norm(point)
    theta, phi = np.arccos(point[2] / r), np.arctan2(point[1], point[0])
    focus = focus_coefficients(beam, LENS, OMEGA_1000, 40)
    A = helicity_multipoles(40, k, r, theta, phi, s, kind="regular")
    field = np.sqrt(2) * np.sum(focus.coefficients[:, None] * A, axis=0)
    assert_allclose(field, _richards_wolf(beam, LENS, OMEGA_1000, point), rtol=1e-8)


def test_hard_aperture_tail(particle):
    # |C_n| itself keeps a slowly decaying tail from the aperture edge; the
    # products with the Mie coefficients are what truncation must control.
    mie = mie_set(OMEGA_1000, particle)
    focus = focus_coefficients(BEAM, LENS, OMEGA_1000, 20)
    assert focus.tail_ratio(10) > 1e-3
    mie20 = mie.truncated(20)
    weight = np.abs(focus.coefficients) * np.maximum(np.abs(mie_set(OMEGA_1000, particle, 20).a),
                                                      np.abs(mie_set(OMEGA_1000, particle, 20).b))
    assert np.max(weight[mie.nmax:]) < 1e-6 * np.max(weight)
    assert mie20.nmax == 20 and np.all(mie20.a[mie.nmax:] == 0)


# ------------------------------------------------------------ scattering

def _paper_fields(particle, lam=1000.0):
    omega = float(omega_from_wavelength(lam))
    mie = mie_set(omega, particle)
    focus = focus_coefficients(BEAM, LENS, omega, mie.nmax)
    return mie, focus


def test_zero_scatterer_zero_field():
    mie = MieSet.from_coefficients(OMEGA_1000, np.zeros(9), np.zeros(9))
    focus = focus_coefficients(BEAM, LENS, OMEGA_1000, 9)
    assert np.all(scattered_field(mie, focus, 1.0, 0.3, 2.8).E == 0)
    assert project_alpha_beta(BEAM, LENS, mie, focus) == (0j, 0j)


def test_transversality_and_rotational_symmetry(particle):
    mie, focus = _paper_fields(particle)
    theta = 2.7
    norms = []
    for phi in np.linspace(0, 2 * np.pi, 13):
        sample = scattered_field(mie, focus, 1.0, phi, theta)
        r_hat, _, _ = _spherical_basis(theta, phi)
        radial = abs(np.dot(sample.E, r_hat))
        transverse = np.linalg.norm(sample.E - np.dot(sample.E, r_hat) * r_hat)
        assert radial <= 1e-3 * transverse
        norms.append(np.linalg.norm(sample.E))
    assert_allclose(norms, norms[0], rtol=1e-10)


def test_scattered_power_matches_cross_section(particle):
    from helscat.mie import cross_section
    mie, focus = _paper_fields(particle, 1030.0)
    x, w = np.polynomial.legendre.leggauss(120)
    theta = np.arccos(x)
    field = np.array([scattered_field(mie, focus, 1.0, 0.0, t).E for t in theta])
    power = np.sum(w * np.sum(np.abs(field) ** 2, axis=1)) * 2 * np.pi  # r^2 = 1 mm^2
    assert_allclose(power, cross_section(mie, focus).total / (2 * np.pi), rtol=1e-3)


def test_frequency_mismatch_rejected(particle):
    mie, _ = _paper_fields(particle)
    other = focus_coefficients(BEAM, LENS, 1.1 * OMEGA_1000, 9)
    with pytest.raises(ValueError):
        scattered_field(mie, other, 1.0, 0.0, 3.0)
    with pytest.raises(ValueError):
        project_alpha_beta(BEAM, LENS, mie, other)


# -------------------------------------------------------------- collimation

def test_rotation_properties():
    rng = np.random.default_rng(7)
    for phi, theta in rng.uniform([0, 0], [2 * np.pi, np.pi / 2], size=(20, 2)):
        R = euler_rotation(phi, theta)
        assert_allclose(R.T @ R, np.eye(3), atol=1e-14)
        assert_allclose(np.linalg.det(R), 1.0, atol=1e-14)
        v = rng.normal(size=3) + 1j * rng.normal(size=3)
        assert_allclose(euler_rotation(phi, -theta) @ (R @ v), v, atol=1e-12)


def test_on_axis_collimation_is_identity():
    v = np.array([0.3 + 0.1j, -0.2j, 0.0])
    out = collimate(v, 0.0, 1.3)
    assert_allclose(out.E, v, atol=1e-15)
    assert out.position[1] == 0.0


def test_collimation_sends_cap_rays_backward():
    for phi in np.linspace(0, 2 * np.pi, 9):
        for tp in (0.1, 0.6, 1.1):
            r_hat, _, _ = _spherical_basis(np.pi - tp, phi)
            assert_allclose(collimate(r_hat, tp, phi).E * np.cos(tp), [0, 0, -1], atol=1e-14)


def test_collimation_rejects_outside_cap():
    with pytest.raises(ValueError):
        collimate(np.zeros(3), np.pi / 2, 0.0)


# --------------------------------------------------------------- projection

def test_mirror_symmetry(particle):
    a1, b1, _, _ = single_frequency(OMEGA_1000, BeamConfig(s=-1), LENS, particle)
    a2, b2, _, _ = single_frequency(OMEGA_1000, BeamConfig(s=1), LENS, particle)
    assert abs(a1 - a2) <= 1e-8 * abs(a1)
    assert abs(b1 - b2) <= 1e-8 * abs(b1)


def test_dual_and_anti_dual_scatterers(particle):
    mie, focus = _paper_fields(particle)
    dual = MieSet.from_coefficients(mie.omega, mie.a, mie.a)
    anti = MieSet.from_coefficients(mie.omega, mie.a, -mie.a)
    a, b = project_alpha_beta(BEAM, LENS, dual, focus)
    assert abs(b) < 1e-6 * abs(a)
    a, b = project_alpha_beta(BEAM, LENS, anti, focus)
    assert abs(a) < 1e-6 * abs(b)


def test_electric_only_gives_equal_magnitudes(particle):
    mie, focus = _paper_fields(particle)
    electric = MieSet.from_coefficients(mie.omega, mie.a, np.zeros_like(mie.a))
    a, b = project_alpha_beta(BEAM, LENS, electric, focus)
    assert_allclose(abs(a), abs(b), rtol=1e-6)


def test_azimuthal_offset_invariance(particle):
    mie, focus = _paper_fields(particle)
    ref = project_alpha_beta(BEAM, LENS, mie, focus)
    shifted = project_alpha_beta(BEAM, LENS, mie, focus, Quadrature(azimuthal_offset=0.37))
    assert_allclose(shifted, ref, rtol=1e-10)


def test_projection_quadrature_doubling(particle):
    mie, focus = _paper_fields(particle)
    ref = np.array(project_alpha_beta(BEAM, LENS, mie, focus))
    fine = np.array(project_alpha_beta(BEAM, LENS, mie, focus, Quadrature(radial=192, azimuthal=128)))
    assert np.max(np.abs(fine - ref)) < 1e-8 * np.max(np.abs(ref))


def test_energy_conserving_collimation_option(particle):
    mie, focus = _paper_fields(particle)
    a1, b1 = project_alpha_beta(BEAM, LENS, mie, focus)
    a2, b2 = project_alpha_beta(BEAM, LENS, mie, focus, options=Options(collimation_exponent=0.5))
    assert 0.5 < abs(a2) / abs(a1) < 1.0
    assert 0.5 < abs(b2) / abs(b1) < 1.0


# -------------------------------------------------------------------- sweep

def test_passivity_over_paper_sweep(paper_spectrum):
    assert np.all(np.abs(paper_spectrum.alpha) ** 2 + np.abs(paper_spectrum.beta) ** 2 <= 1.0)


def test_two_point_sweep_matches_single_runs(particle):
    spec = sweep(BEAM, LENS, particle, [1000.0, 1040.0])
    for lam in (1000.0, 1040.0):
        a, b, _, _ = single_frequency(float(omega_from_wavelength(lam)), BEAM, LENS, particle)
        i = int(np.argmin(np.abs(spec.lambda_nm - lam)))
        assert spec.alpha[i] == a and spec.beta[i] == b
    assert np.all(np.diff(spec.omega) > 0)


def test_sweep_independent_of_threads(particle):
    grid = np.linspace(1000, 1010, 6)
    s1 = sweep(BEAM, LENS, particle, grid, threads=1)
    s4 = sweep(BEAM, LENS, particle, grid, threads=4)
    assert np.array_equal(s1.alpha, s4.alpha) and np.array_equal(s1.beta, s4.beta)


def test_sweep_reports_failing_wavelength(particle):
    with pytest.raises(SweepError, match="1300"):
        sweep(BEAM, LENS, particle, [1000.0, 1300.0])


def test_sweep_refinement(particle):
    coarse = sweep(BEAM, LENS, particle, np.arange(1060.0, 1100.01, 2.0))
    fine = sweep(BEAM, LENS, particle, np.arange(1060.0, 1100.01, 1.0))
    on_nodes = fine.interpolate(coarse.omega)
    assert np.array_equal(on_nodes[0], coarse.alpha)
    mid = fine.omega[1::2]
    approx_a, approx_b = coarse.interpolate(mid)
    scale = max(np.max(np.abs(fine.alpha)), np.max(np.abs(fine.beta)))
    assert np.max(np.abs(approx_a - fine.alpha[1::2])) < 1e-3 * scale
    assert np.max(np.abs(approx_b - fine.beta[1::2])) < 1e-3 * scale


def test_spectrum_validation_and_interpolation_range():
    with pytest.raises(ValueError):
        HelicitySpectrum(np.array([2.0, 1.0]), np.zeros(2), np.zeros(2))
    spec = HelicitySpectrum(np.array([1.0, 2.0, 3.0]), np.array([0, 1, 2]), np.zeros(3))
    assert_allclose(spec.interpolate(np.array([1.5]))[0], [0.5])
    with pytest.raises(ValueError, match="outside"):
        spec.interpolate(np.array([3.5]))


def test_spectrum_derivative_exact_for_quadratics():
    omega = np.array([1.0, 1.3, 2.0, 2.2, 3.1])
    alpha = (2 + 1j) * omega**2 - omega
    spec = HelicitySpectrum(omega, alpha, 3 * omega)
    da, db = spec.derivative(2.05)
    assert_allclose(da, 2 * (2 + 1j) * 2.05 - 1, rtol=1e-13)
    assert_allclose(db, 3.0, rtol=1e-13)
