import cmath
import math

import numpy as np
import pytest

from conftest import FIG2, FIG3A, FIG3B, FIG4, PSEUDO, random_ssh
from nhbloch.analysis import (
    EPReport,
    ep_classify_ladder,
    ep_classify_ssh,
    gbz_trajectory,
    gbz_vs_alpha,
    ladder_alpha_rep,
    ladder_skin_residuals,
    pseudo_hermiticity_check,
    skin_condition_ladder,
    skin_condition_ssh,
)
from nhbloch.errors import DegenerateCoefficientError, DegenerateModelError
from nhbloch.gbt import analytic_spectrum
from nhbloch.model import (
    LadderParams,
    SSHLongRangeParams,
    build_bloch,
    build_open_chain,
    ladder_to_spec,
    ssh_to_spec,
)
from nhbloch.numerics import eig_dense, jordan_structure, localization_fit


def _fits(spec, n):
    ev = eig_dense(build_open_chain(spec, n))
    return np.array([localization_fit(ev.right_eigenvectors[:, k], n)[0] for k in range(2 * n)])


def _skin_free_ladder(rng):
    """Random ladder satisfying all three skin-free conditions."""
    t0l, t0r, raa, rbb, rab, rba = rng.uniform(0.4, 1.6, 6)
    return LadderParams(
        t0L=t0l, t0R=t0r, tR_AA=raa, tR_BB=rbb, tR_AB=rab, tR_BA=rba,
        tL_AA=rbb, tL_BB=raa, tL_AB=rab * t0r / t0l, tL_BA=rba * t0l / t0r,
    )


# -- skin effect, SSH --------------------------------------------------------

def test_fig2_skin_left_with_closed_form_alpha():
    v = skin_condition_ssh(FIG2)
    assert v.exists and v.side == "left"
    # alpha(pi/2) = 1/2 ln(w3/w1) with w1 = t0 t1L + t1R t2, w3 = t0 t1R + t1L t2
    expected = 0.5 * math.log((1 * 3.5 + 2.5 * 1.3) / (1 * 2.5 + 3.5 * 1.3))
    assert v.alpha_rep == pytest.approx(expected, rel=1e-9)
    assert expected == pytest.approx(-0.021742, abs=1e-6)


def test_fig2_alpha_matches_localization_slope():
    fits = _fits(ssh_to_spec(FIG2), 60)
    assert np.median(fits) == pytest.approx(skin_condition_ssh(FIG2).alpha_rep, rel=0.05)


def test_mirror_symmetric_ssh_has_no_skin_effect():
    p = SSHLongRangeParams(0.0, 1.0, 3.0, 3.0, 1.3)
    v = skin_condition_ssh(p)
    assert not v.exists and v.side == "none"
    assert np.median(np.abs(_fits(ssh_to_spec(p), 60))) < 1e-10


def test_pseudo_hermitian_ssh_has_no_skin_effect():
    v = skin_condition_ssh(PSEUDO)
    assert not v.exists
    assert v.conditions["omega1_minus_omega3"] == pytest.approx(0.0, abs=1e-12)
    assert np.median(np.abs(_fits(ssh_to_spec(PSEUDO), 60))) < 1e-3


def test_skin_condition_rejects_t0_zero():
    with pytest.raises(DegenerateCoefficientError):
        skin_condition_ssh(FIG4)


def test_skin_verdict_serializes():
    d = skin_condition_ssh(FIG2).to_dict()
    assert d["exists"] is True and d["side"] == "left"
    assert set(d) == {"exists", "side", "conditions", "alpha_rep"}


def test_random_ssh_condition_agrees_with_localization(rng):
    # A tiny alpha is below the resolution of a 60-cell fit, so the sign is only
    # required where the predicted localization is resolvable.
    checked = 0
    for _ in range(30):
        p = random_ssh(rng, eps0=False)
        p = SSHLongRangeParams(0.0, abs(p.t0), abs(p.t1L), abs(p.t1R), abs(p.t2))
        v = skin_condition_ssh(p)
        fits = _fits(ssh_to_spec(p), 60)
        assert v.exists
        if abs(v.alpha_rep) > 5e-3:
            assert np.sign(np.median(fits)) == np.sign(v.alpha_rep)
            checked += 1
    assert checked >= 15


def test_random_skin_free_ssh_draws_are_delocalized(rng):
    for _ in range(10):
        t0, t1, t2 = rng.uniform(0.4, 2.0, 3)
        p = SSHLongRangeParams(0.0, t0, t1, t1, t2)
        assert not skin_condition_ssh(p).exists
        assert np.median(np.abs(_fits(ssh_to_spec(p), 60))) < 1e-8


# -- skin effect, ladder -----------------------------------------------------

def test_fig3b_residuals_vanish_exactly():
    res = ladder_skin_residuals(FIG3B)
    assert set(res) == {"omega0_minus_omega4", "diagonal_sum", "intra_offdiagonal"}
    assert all(r == 0 for r in res.values())
    v = skin_condition_ladder(FIG3B)
    assert not v.exists and v.side == "none"
    assert np.median(np.abs(_fits(ladder_to_spec(FIG3B), 60))) < 1e-3


def test_fig3a_is_left_localized():
    v = skin_condition_ladder(FIG3A)
    assert v.exists and v.side == "left"
    assert v.alpha_rep == pytest.approx(-0.071, abs=2e-3)
    fits = _fits(ladder_to_spec(FIG3A), 60)
    assert np.mean(fits < -0.05) > 0.9


def test_ladder_alpha_rep_is_root_modulus_at_quarter_turn():
    # At theta = pi/2 the pair exp(alpha +- i pi/2) = +-i e^alpha must be roots
    # of the characteristic polynomial at the same energy.
    from nhbloch.polynomial import charpoly_generic, roots

    a = ladder_alpha_rep(FIG3A)
    spec = ladder_to_spec(FIG3A)
    z = 1j * math.exp(a)
    # hAB(z) hBA(z) = (E - hAA(z))(E - hBB(z)) fixes E up to a quadratic
    h = sum(v * z ** (-m) for (m, i, j), v in spec.hops.items() if (i, j) == ("A", "A"))
    hb = sum(v * z ** (-m) for (m, i, j), v in spec.hops.items() if (i, j) == ("B", "B"))
    hab = sum(v * z ** (-m) for (m, i, j), v in spec.hops.items() if (i, j) == ("A", "B"))
    hba = sum(v * z ** (-m) for (m, i, j), v in spec.hops.items() if (i, j) == ("B", "A"))
    es = np.roots([1.0, -(h + hb), h * hb - hab * hba])
    hit = False
    for e in es:
        rs = roots(charpoly_generic(spec, e)).roots
        if min(abs(r - z) for r in rs) < 1e-8 and min(abs(r + z) for r in rs) < 1e-8:
            hit = True
    assert hit


def test_hermitian_ladder_has_no_skin_effect():
    p = LadderParams(
        t0L=0.7, t0R=0.7, tR_AA=0.3, tR_BB=-0.8, tR_AB=0.5, tR_BA=1.1,
        tL_AA=0.3, tL_BB=-0.8, tL_AB=0.5, tL_BA=1.1,
    )
    h = build_open_chain(ladder_to_spec(p), 10)
    assert np.allclose(h, h.conj().T)
    assert not skin_condition_ladder(p).exists
    # standing waves give small slopes of either sign at finite N
    fits = _fits(ladder_to_spec(p), 40)
    assert np.median(np.abs(fits)) < 5e-3
    assert abs(np.median(fits)) < 1e-3


def test_complex_hermitian_ladder_has_zero_alpha(rng):
    # The three conditions are sufficient, not necessary: a complex Hermitian
    # ladder violates them but still has alpha = 0.
    vals = rng.uniform(-1, 1, 4) + 1j * rng.uniform(-1, 1, 4)
    t0 = 0.7 + 0.3j
    c = np.conj
    p = LadderParams(
        t0L=t0, t0R=c(t0),
        tR_AA=vals[0], tR_BB=vals[1], tR_AB=vals[2], tR_BA=vals[3],
        tL_AA=c(vals[0]), tL_BB=c(vals[1]), tL_AB=c(vals[2]), tL_BA=c(vals[3]),
    )
    h = build_open_chain(ladder_to_spec(p), 10)
    assert np.allclose(h, h.conj().T)
    v = skin_condition_ladder(p)
    assert v.side == "none" and abs(v.alpha_rep) < 1e-9
    # standing waves give small slopes of either sign at finite N
    fits = _fits(ladder_to_spec(p), 40)
    assert np.median(np.abs(fits)) < 5e-3
    assert abs(np.median(fits)) < 1e-3


def test_random_ladder_condition_agrees_with_localization(rng):
    for _ in range(8):
        p = _skin_free_ladder(rng)
        assert max(abs(r) for r in ladder_skin_residuals(p).values()) < 1e-12
        assert not skin_condition_ladder(p).exists
        assert np.median(np.abs(_fits(ladder_to_spec(p), 60))) < 1e-3
    keys = ["t0L", "t0R", "tL_AA", "tL_BB", "tL_AB", "tL_BA", "tR_AA", "tR_BB", "tR_AB", "tR_BA"]
    checked = 0
    for _ in range(8):
        p = LadderParams(**dict(zip(keys, rng.uniform(0.4, 1.6, 10))))
        v = skin_condition_ladder(p)
        assert v.exists
        fits = _fits(ladder_to_spec(p), 60)
        assert np.median(np.abs(fits)) > 1e-2
        # the ladder can localize states at both ends; the side is only
        # meaningful when every state decays the same way
        if abs(v.alpha_rep) > 2e-2 and (np.all(fits < 0) or np.all(fits > 0)):
            assert np.sign(np.median(fits)) == np.sign(v.alpha_rep)
            checked += 1
    assert checked >= 3


# -- exceptional points ------------------------------------------------------

def _order_check(spec, report, cells=(8, 12, 20)):
    for n in cells:
        h = build_open_chain(spec, n)
        for e in report.eigenvalues:
            js = jordan_structure(h, e)
            assert (js.algebraic_mult, js.geometric_mult) == (report.order(n), 1), (n, e, js)


def _residual(h, e, v):
    return np.linalg.norm(h @ v - e * v) / np.linalg.norm(v)


SSH_EP_CASES = [
    # (params, order offset, energies, head template or None, tail template or None)
    (SSHLongRangeParams(0.0, 0.0, 0.0, 3.5, 1.3), -2, (1.3, -1.3),
     lambda s: [0, s, 3.5 / 1.3, 0, 1], None),
    (SSHLongRangeParams(0.0, 0.0, 2.5, 0.0, 1.3), -2, (1.3, -1.3),
     None, lambda s: [1, 0, 2.5 / 1.3, s, 0]),
    (SSHLongRangeParams(0.0, 1.0, 0.0, 3.5, 0.0), 0, (1.0, -1.0),
     None, lambda s: [s, 1]),
    (SSHLongRangeParams(0.0, 1.0, 2.5, 0.0, 0.0), 0, (1.0, -1.0),
     lambda s: [1, s], None),
]


@pytest.mark.parametrize("row", range(4))
def test_ssh_exceptional_point_cases(row):
    p, offset, energies, head, tail = SSH_EP_CASES[row]
    rep = ep_classify_ssh(p)
    assert rep.case_id == f"ssh-{row + 1}"
    assert rep.order_offset == offset
    assert np.allclose(rep.eigenvalues, energies)
    spec = ssh_to_spec(p)
    n = 20
    h = build_open_chain(spec, n)
    for e, s in zip(energies, (1, -1)):
        v = np.zeros(2 * n)
        if head:
            v[:5 if row == 0 else 2] = head(s)
        else:
            block = tail(s)
            v[-len(block):] = block
        assert _residual(h, e, v) <= 1e-10
    for e, v in zip(rep.eigenvalues, rep.states(n)):
        assert _residual(h, e, v) <= 1e-10
    assert rep.side == ("n=1" if head else "n=N")
    _order_check(spec, rep)


def test_ssh_case_one_with_shifted_onsite():
    p = SSHLongRangeParams(0.4, 0.0, 0.0, 3.5, 1.3)
    rep = ep_classify_ssh(p)
    assert rep.case_id == "ssh-1"
    assert np.allclose(rep.eigenvalues, (1.7, -0.9))
    assert rep.order(20) == 18


def test_no_ep_for_generic_params():
    assert ep_classify_ssh(FIG2) is None
    assert ep_classify_ladder(FIG3B) is None


def test_all_zero_hoppings_is_degenerate():
    with pytest.raises(DegenerateModelError):
        ep_classify_ssh(SSHLongRangeParams(0.5, 0.0, 0.0, 0.0, 0.0))
    with pytest.raises(DegenerateModelError):
        ep_classify_ladder(LadderParams())


def test_ladder_ep_leftward_hoppings_vanish():
    p = LadderParams(t0L=1.0, t0R=0.5, tR_AA=0.6, tR_BB=1.2, tR_AB=1.0, tR_BA=1.5)
    rep = ep_classify_ladder(p)
    assert rep.case_id == "ladder-i" and rep.side == "n=N" and rep.order_expr == "N"
    sq = math.sqrt(0.5)
    assert np.allclose(rep.eigenvalues, (sq, -sq))
    n = 12
    h = build_open_chain(ladder_to_spec(p), n)
    for e, s in zip((sq, -sq), (1, -1)):
        v = np.zeros(2 * n)
        v[-2:] = [s * sq / 0.5, 1]
        assert _residual(h, e, v) <= 1e-10
    _order_check(ladder_to_spec(p), rep)


def test_ladder_ep_rightward_hoppings_vanish():
    p = LadderParams(t0L=1.0, t0R=0.5, tL_AA=1.2, tL_BB=0.6, tL_AB=1.1, tL_BA=3.0)
    rep = ep_classify_ladder(p)
    assert rep.case_id == "ladder-ii" and rep.side == "n=1" and rep.order(12) == 12
    sq = math.sqrt(0.5)
    n = 12
    h = build_open_chain(ladder_to_spec(p), n)
    for e, s in zip((sq, -sq), (1, -1)):
        v = np.zeros(2 * n)
        v[:2] = [sq / 0.5, s]
        assert _residual(h, e, v) <= 1e-10
    _order_check(ladder_to_spec(p), rep)


LADDER_III = LadderParams(
    tL_AA=1.0, tL_BB=-1.0, tL_AB=1.0, tL_BA=-1.0,
    tR_AA=0.8, tR_BB=1.3, tR_AB=0.7, tR_BA=1.1,
)


def test_ladder_ep_degenerate_left_block():
    p = LADDER_III
    rep = ep_classify_ladder(p)
    assert rep.case_id == "ladder-iii" and rep.side == "n=N" and rep.order_offset == -1
    assert rep.reading == "AB"
    assert rep.reading_residuals["AB"] <= 1e-10
    assert all(rep.reading_residuals[r] > 1e-3 for r in ("AA", "BB", "BA"))
    # E_L = [1*1*(0.8-1.3) + 1*0.7 - 1*1.1] / 1 = -0.9
    e_l = -0.9
    sq = cmath.sqrt(e_l)
    den = 1.0 * 1.1 + 1.0 * 1.3
    P, Q, S = sq * 1.0 / den, sq * 1.0 / den, (0.8 + 0.7) / den
    n = 12
    h = build_open_chain(ladder_to_spec(p), n)
    for e, s in zip((sq, -sq), (1, -1)):
        v = np.zeros(2 * n, dtype=complex)
        v[-4:] = [s * P, s * Q, S, 1]
        assert _residual(h, e, v) <= 1e-10
    assert np.allclose(rep.eigenvalues, (sq, -sq))
    _order_check(ladder_to_spec(p), rep)


def test_ladder_ep_degenerate_right_block():
    p = LadderParams(
        tR_AA=1.0, tR_BB=-1.0, tR_AB=1.0, tR_BA=-1.0,
        tL_AA=0.8, tL_BB=1.3, tL_AB=0.7, tL_BA=1.1,
    )
    rep = ep_classify_ladder(p)
    assert rep.case_id == "ladder-iv" and rep.side == "n=1" and rep.order(12) == 11
    n = 12
    h = build_open_chain(ladder_to_spec(p), n)
    for e, v in zip(rep.eigenvalues, rep.states(n)):
        assert _residual(h, e, v) <= 1e-10
        assert np.all(v[4:] == 0)
    _order_check(ladder_to_spec(p), rep)


def test_ep_report_serializes():
    rep = ep_classify_ssh(FIG4)
    d = rep.to_dict(20)
    assert d["order"] == "N-2" and d["order_at_n"] == 18
    assert isinstance(rep, EPReport)


# -- generalized Brillouin zone ----------------------------------------------

def test_fig2_gbz_inside_unit_circle():
    n = 60
    energies = [s.energy for s in analytic_spectrum(FIG2, n)]
    traj = gbz_trajectory(ssh_to_spec(FIG2), energies)
    assert traj.n_accepted == len(energies)
    assert np.all(traj.moduli < 1)
    assert {pt.pair_index for pt in traj.points} == {1, 2}


def test_hermitian_gbz_is_unit_circle():
    p = SSHLongRangeParams(0.0, 1.0, 3.0, 3.0, 1.3)
    energies = np.linalg.eigvals(build_open_chain(ssh_to_spec(p), 30))
    energies = energies[np.abs(energies) > 1e-6]
    traj = gbz_trajectory(ssh_to_spec(p), energies)
    assert len(traj) > 0
    assert np.all(np.abs(traj.moduli - 1) < 1e-6)


def test_gbz_rejects_energy_off_the_bands():
    traj = gbz_trajectory(ssh_to_spec(FIG2), [100 + 100j])
    assert len(traj) == 0 and traj.samples[0].reason


def test_gbz_records_degenerate_leading_coefficient():
    traj = gbz_trajectory(ssh_to_spec(FIG4), [0.3])
    assert not traj.samples[0].accepted


def test_gbz_vs_alpha_fig2():
    cmp = gbz_vs_alpha(FIG2)
    assert cmp.max_deviation <= 1e-6
    assert len(cmp.thetas) + cmp.skipped == 200
    assert len(cmp.thetas) > 150
    assert np.all(cmp.alphas < 0)


def test_gbz_vs_alpha_random_draws(rng):
    for _ in range(5):
        p = random_ssh(rng, eps0=False)
        p = SSHLongRangeParams(0.0, abs(p.t0), abs(p.t1L), abs(p.t1R), abs(p.t2))
        cmp = gbz_vs_alpha(p, n_theta=40)
        if len(cmp.thetas):
            assert cmp.max_deviation <= 1e-6


# -- pseudo-Hermiticity ------------------------------------------------------

def test_pseudo_hermiticity_unbroken_everywhere():
    ks = np.linspace(-math.pi, math.pi, 100)
    rep = pseudo_hermiticity_check(PSEUDO, ks)
    assert all(s.unbroken for s in rep.samples)
    assert rep.max_residual <= 1e-10
    assert rep.real_iff_unbroken


def test_pseudo_hermiticity_broken_phase():
    p = SSHLongRangeParams(0.0, 1.0, 1.0, 3.5, 1.0)
    ks = np.linspace(-math.pi, math.pi, 101)
    rep = pseudo_hermiticity_check(p, ks)
    # h_a h_b = (3.5 + 2 cos k)(1 + 2 cos k) < 0 exactly when cos k < -1/2
    for s in rep.samples:
        if abs(math.cos(s.k) + 0.5) > 1e-9:
            assert s.unbroken == (math.cos(s.k) > -0.5)
    assert any(not s.unbroken for s in rep.samples)
    assert rep.real_iff_unbroken
    assert rep.max_residual <= 1e-10
    d = rep.to_dict()
    assert d["n_samples"] == 101 and d["n_unbroken"] < 101


def test_pseudo_hermiticity_metric_is_identity_for_hermitian():
    p = SSHLongRangeParams(0.0, 1.0, 3.0, 3.0, 1.0)
    ks = np.linspace(0.1, 3.0, 7)
    rep = pseudo_hermiticity_check(p, ks)
    for k in ks:
        h = build_bloch(ssh_to_spec(p), k)
        assert np.allclose(h, h.conj().T)
    assert rep.max_residual <= 1e-12


def test_pseudo_hermiticity_requires_t0_equal_t2():
    with pytest.raises(ValueError):
        pseudo_hermiticity_check(FIG2, [0.0])
