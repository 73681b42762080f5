import math

import numpy as np
import pytest

from nhbloch.errors import SingularAlphaError, SizeError
from nhbloch.gbt import (
    alpha_of_theta,
    analytic_spectrum,
    eigenstate_ssh,
    energy_of_alpha,
    quantized_thetas,
    solve_theta,
)
from nhbloch.model import SSHLongRangeParams, build_open_chain, ssh_to_spec
from nhbloch.numerics import eig_dense, hausdorff, localization_fit, phase_aligned_deviation
from nhbloch.polynomial import charpoly_ssh, roots, vieta_residuals

from conftest import FIG2, PSEUDO, random_ssh


@pytest.fixture(scope="module")
def fig2_n40():
    sols = analytic_spectrum(FIG2, 40)
    h = build_open_chain(ssh_to_spec(FIG2), 40)
    return sols, h, eig_dense(h)


def test_alpha_at_half_pi_closed_form():
    (alpha,) = alpha_of_theta(FIG2, math.pi / 2)
    assert alpha == pytest.approx(0.5 * math.log(6.75 / 7.05), abs=1e-12)
    assert alpha == pytest.approx(-0.02174, abs=1e-5)


def test_alpha_empty_when_reciprocal():
    assert alpha_of_theta(SSHLongRangeParams(0, 1, 2.5, 2.5, 1.3), 1.0) == ()


def test_alpha_varies_with_theta():
    alphas = [alpha_of_theta(FIG2, t)[0] for t in np.linspace(0.2, 2.9, 10)]
    assert np.ptp(alphas) > 1e-3


def test_alpha_rejects_theta_outside_interval():
    with pytest.raises(ValueError):
        alpha_of_theta(FIG2, 0.0)


def test_alpha_solves_u_quartic():
    w0, w1, w3 = 1.3, -7.05, -6.75
    for theta in (0.3, 1.1, 2.4):
        for a in alpha_of_theta(FIG2, theta):
            u = math.exp(a)
            assert 2 * w0 * math.cos(theta) * (u**4 - 1) == pytest.approx(w1 * u**3 - w3 * u, abs=1e-10)


def test_energy_makes_pair_roots():
    theta = math.pi / 2
    (alpha,) = alpha_of_theta(FIG2, theta)
    for e in energy_of_alpha(FIG2, alpha, theta):
        cp = charpoly_ssh(FIG2, e)
        for z in (math.exp(alpha) * np.exp(1j * theta), math.exp(alpha) * np.exp(-1j * theta)):
            assert cp.residual(z) < 1e-9


def test_energy_shifts_with_eps0(rng):
    for _ in range(10):
        p = random_ssh(rng, eps0=False)
        c = rng.uniform(-2, 2)
        shifted = SSHLongRangeParams(c, p.t0, p.t1L, p.t1R, p.t2)
        a = rng.uniform(0.1, 1.0)
        np.testing.assert_allclose(
            np.array(energy_of_alpha(shifted, a)), np.array(energy_of_alpha(p, a)) + c, atol=1e-12
        )


def test_energy_swap_symmetry(rng):
    for _ in range(10):
        p = random_ssh(rng)
        a = rng.uniform(0.05, 1.0)
        np.testing.assert_allclose(energy_of_alpha(p, a), energy_of_alpha(p.swapped(), -a), atol=1e-12)


def test_energy_singular_at_zero_alpha():
    with pytest.raises(SingularAlphaError):
        energy_of_alpha(FIG2, 0.0)


def test_solutions_satisfy_vieta(fig2_n40):
    sols, _, _ = fig2_n40
    for s in sols[::7]:
        cp = charpoly_ssh(FIG2, s.energy)
        assert max(cp.residual(s.z1), cp.residual(s.z2)) < 1e-9
        rs = roots(cp)
        assert np.max(vieta_residuals(cp, rs)) < 1e-8
        assert s.z1 * s.z2 * s.z3 * s.z4 == pytest.approx(1.0, abs=1e-10)
        assert abs(s.z3) < math.exp(s.alpha) < abs(s.z4)


def test_fig2_spectrum_matches_dense(fig2_n40):
    sols, h, eig = fig2_n40
    assert len(sols) == 78
    analytic = np.array([s.energy for s in sols])
    numeric = eig.eigenvalues[np.abs(eig.eigenvalues) > 1e-6]
    assert len(numeric) == 78
    assert hausdorff(analytic, numeric) < 1e-6


def test_fig2_states_are_eigenvectors(fig2_n40):
    sols, h, eig = fig2_n40
    for s in sols:
        psi = eigenstate_ssh(FIG2, s, 40)
        assert np.linalg.norm(h @ psi - s.energy * psi) < 1e-8
        k = np.argmin(np.abs(eig.eigenvalues - s.energy))
        assert phase_aligned_deviation(psi, eig.right_eigenvectors[:, k]) < 1e-6


def test_state_normalization(fig2_n40):
    s = fig2_n40[0][3]
    psi = eigenstate_ssh(FIG2, s, 40)
    assert np.linalg.norm(psi) == pytest.approx(1.0)
    k = np.argmax(np.abs(psi))
    assert psi[k].imag == 0 and psi[k].real > 0


def test_two_condition_rule_is_only_approximate_with_next_nearest_hopping(fig2_n40):
    _, _, eig = fig2_n40
    sols = analytic_spectrum(FIG2, 40, boundary="reduced")
    d = hausdorff([s.energy for s in sols], eig.eigenvalues[np.abs(eig.eigenvalues) > 1e-6])
    assert d > 1e-3


def test_reduced_state_vanishes_as_theta_goes_to_zero():
    s = solve_theta(FIG2, 1e-9)[0]
    n = np.arange(1, 41)
    phi_b = np.exp(s.alpha * n) * np.sin(n * s.theta)
    assert np.max(np.abs(phi_b)) < 1e-7


def test_hermitian_nearest_neighbour_quantization():
    t = 1.7
    p = SSHLongRangeParams(0, 1.0, t, t, 0.0)
    n = 30
    thetas = np.array(quantized_thetas(p, n).thetas)
    w = np.linalg.eigvalsh(build_open_chain(ssh_to_spec(p), n))
    # E^2 = 1 + t^2 + 2 t cos(theta) on the positive branch; the t > t0 edge pair sits near 0
    pos = w[w > 1e-6]
    recovered = np.sort(np.arccos(np.clip((pos**2 - 1 - t * t) / (2 * t), -1, 1)))
    assert len(thetas) == len(recovered)
    np.testing.assert_allclose(np.sort(thetas), recovered, atol=1e-6)


def test_hermitian_nn_states_exact():
    p = SSHLongRangeParams(0.2, 1.0, 0.6, 0.6, 0.0)
    h = build_open_chain(ssh_to_spec(p), 12)
    for s in analytic_spectrum(p, 12):
        psi = eigenstate_ssh(p, s, 12)
        assert np.linalg.norm(h @ psi - s.energy * psi) < 1e-10


def test_vanishing_mu_gives_uniform_thetas():
    p = SSHLongRangeParams(0, 1.0, 0.8, 0.0, 0.0)
    n = 15
    thetas = quantized_thetas(p, n).thetas
    np.testing.assert_allclose(thetas, np.arange(1, n + 1) * math.pi / (n + 1), atol=1e-11)


def test_pseudo_hermitian_spectrum_matches_dense():
    n = 30
    sols = analytic_spectrum(PSEUDO, n)
    assert all(s.alpha == 0 for s in sols)
    w = eig_dense(build_open_chain(ssh_to_spec(PSEUDO), n)).eigenvalues
    d = hausdorff([s.energy for s in sols], w[np.abs(w) > 1e-6])
    assert d < 1e-6


def test_left_localized_state_decays_with_alpha():
    n = 60
    sols = analytic_spectrum(FIG2, n)
    s = min(sols, key=lambda s: abs(s.theta - math.pi / 2))
    slope, _ = localization_fit(eigenstate_ssh(FIG2, s, n), n)
    assert slope == pytest.approx(s.alpha, rel=0.05)


def test_quantization_preconditions():
    with pytest.raises(SizeError):
        quantized_thetas(FIG2, 5)
    with pytest.raises(ValueError):
        quantized_thetas(SSHLongRangeParams(0, 1, 2 + 1j, 3, 1), 10)
    with pytest.raises(ValueError):
        quantized_thetas(FIG2, 10, boundary="periodic")


def test_random_draws_match_dense(rng):
    for _ in range(5):
        p = random_ssh(rng, eps0=True)
        n = 16
        sols = analytic_spectrum(p, n)
        w = eig_dense(build_open_chain(ssh_to_spec(p), n)).eigenvalues
        # every analytic energy is an exact eigenvalue
        for s in sols:
            assert np.min(np.abs(w - s.energy)) < 1e-6 * max(1, abs(s.energy))
