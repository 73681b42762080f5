"""Condition checkers, real-space exceptional points, and the generalized Brillouin zone."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import (
    DegenerateCoefficientError,
    DegenerateModelError,
    TemplateVerificationError,
)
from .gbt import TOL_COND, solve_theta, ssh_omegas
from .model import (
    HoppingSpec,
    LadderParams,
    SSHLongRangeParams,
    build_bloch,
    build_open_chain,
    ladder_to_spec,
    ssh_to_spec,
)
from .polynomial import charpoly_generic, charpoly_ladder, roots

TOL_GBZ = 1e-6
TOL_TEMPLATE = 1e-10
VERIFY_CELLS = (6, 10, 20)
SIDE_SCAN = 64
SIDE_CELLS = 40


def _side(alpha):
    if alpha is None or alpha == 0:
        return "none"
    return "left" if alpha < 0 else "right"


# -- skin effect -----------------------------------------------------------

@dataclass(frozen=True)
class SkinVerdict:
    exists: bool
    side: str  # "left", "right" or "none"
    conditions: dict
    alpha_rep: float | None = None

    def to_dict(self) -> dict:
        return {
            "exists": self.exists,
            "side": self.side,
            "conditions": dict(self.conditions),
            "alpha_rep": self.alpha_rep,
        }


def skin_condition_ssh(p: SSHLongRangeParams, tol_cond: float = TOL_COND) -> SkinVerdict:
    """Skin modes exist iff ``omega_1 != omega_3``; the side is the sign of ``alpha``.

    ``alpha_rep`` is ``alpha(theta)`` at the validated angle nearest ``pi/2``,
    or the median ``log|C_z|`` of the sampled GBZ if no angle validates.
    """
    w0, w1, w3 = ssh_omegas(p)
    if w0 == 0:
        raise DegenerateCoefficientError("t0 * t2 = 0; see ep_classify_ssh")
    residual = abs(w1 - w3)
    conditions = {"omega1_minus_omega3": residual}
    if residual <= tol_cond:
        return SkinVerdict(False, "none", conditions, 0.0)
    alpha = None
    # nearest validated angle to pi/2 (no real alpha exists there when omega_3/omega_1 < 0)
    scan = np.append(math.pi / 2, math.pi * (np.arange(SIDE_SCAN) + 0.5) / SIDE_SCAN)
    for theta in sorted(scan, key=lambda t: abs(t - math.pi / 2)):
        sols = solve_theta(p, float(theta), tol_cond=tol_cond)
        if sols:
            alpha = sols[0].alpha
            break
    if alpha is None:
        alpha = _gbz_alpha(ssh_to_spec(p))
    return SkinVerdict(True, _side(alpha), conditions, alpha)


def _gbz_alpha(spec, n_cells=SIDE_CELLS):
    """Median log-modulus of the middle root pair over the open-chain spectrum.

    No equal-modulus acceptance is applied: at finite ``N`` the middle pair
    need not be a conjugate pair, but its modulus still tracks the decay.
    """
    from .numerics import eigvals_dense

    logs = []
    for e in eigvals_dense(build_open_chain(spec, n_cells)):
        try:
            rs = roots(charpoly_generic(spec, e)).roots
        except DegenerateCoefficientError:
            continue
        k = len(rs) // 2
        logs.append(0.5 * math.log(abs(rs[k - 1]) * abs(rs[k])))
    return float(np.median(logs)) if logs else None


def ladder_skin_residuals(p: LadderParams) -> dict:
    return {
        "omega0_minus_omega4": abs(
            (p.tL_AA * p.tL_BB - p.tL_AB * p.tL_BA) - (p.tR_AA * p.tR_BB - p.tR_AB * p.tR_BA)
        ),
        "diagonal_sum": abs((p.tL_AA + p.tL_BB) - (p.tR_AA + p.tR_BB)),
        "intra_offdiagonal": abs(
            (p.t0L * p.tL_AB + p.t0R * p.tL_BA) - (p.t0L * p.tR_BA + p.t0R * p.tR_AB)
        ),
    }


def ladder_alpha_rep(p: LadderParams, tol_sep: float = 1e-8) -> float | None:
    """``alpha`` of a ladder state whose middle root pair is ``exp(alpha +- i pi/2)``.

    Roots ``+- i y`` of the quartic require ``y^2 = omega_3/omega_1`` and
    ``omega_0 omega_3^2 - omega_1 omega_2 omega_3 + omega_4 omega_1^2 = 0``,
    a quartic in ``D = E - eps0``.  Among its roots with ``omega_3/omega_1``
    real positive and the pair in the middle, the smallest ``|alpha|`` wins.
    """
    P = np.polynomial.Polynomial
    w0 = P([p.tL_AA * p.tL_BB - p.tL_AB * p.tL_BA])
    w4 = P([p.tR_AA * p.tR_BB - p.tR_AB * p.tR_BA])
    w1 = P([p.t0L * p.tL_AB + p.t0R * p.tL_BA, p.tL_AA + p.tL_BB])
    w3 = P([p.t0L * p.tR_BA + p.t0R * p.tR_AB, p.tR_AA + p.tR_BB])
    w2 = P([p.tL_AA * p.tR_BB + p.tL_BB * p.tR_AA - p.t0L * p.t0R - p.tL_AB * p.tR_AB - p.tL_BA * p.tR_BA, 0, 1])
    eq = w0 * w3**2 - w1 * w2 * w3 + w4 * w1**2
    coef = np.trim_zeros(np.asarray(eq.coef, dtype=complex), "b")
    if len(coef) < 2:
        return None
    best = None
    for d in np.polynomial.polynomial.polyroots(coef):
        den = w1(d)
        if abs(den) < 1e-14:
            continue
        r = w3(d) / den
        if abs(r.imag) > 1e-9 * abs(r) or r.real <= 0:
            continue
        alpha = 0.5 * math.log(r.real)
        y = math.sqrt(r.real)
        try:
            cp = charpoly_ladder(p, p.eps0 + d)
        except DegenerateCoefficientError:
            continue
        if max(cp.residual(1j * y), cp.residual(-1j * y)) > 1e-8:
            continue
        mod = sorted(abs(z) for z in roots(cp))
        if not (mod[1] - mod[0] > tol_sep * y and mod[3] - mod[2] > tol_sep * y):
            continue
        if abs(mod[1] - y) > 1e-7 * y or abs(mod[2] - y) > 1e-7 * y:
            continue
        if best is None or abs(alpha) < abs(best):
            best = alpha
    return best


def skin_condition_ladder(p: LadderParams, tol_cond: float = TOL_COND) -> SkinVerdict:
    """Skin modes are absent iff all three E-independent residuals vanish."""
    res = ladder_skin_residuals(p)
    if all(r <= tol_cond for r in res.values()):
        return SkinVerdict(False, "none", res, 0.0)
    alpha = ladder_alpha_rep(p)
    if alpha is None:
        alpha = _gbz_alpha(ladder_to_spec(p))
    return SkinVerdict(True, _side(alpha), res, alpha)


# -- exceptional points ----------------------------------------------------

@dataclass(frozen=True)
class EPReport:
    case_id: str
    order_offset: int  # order = N + order_offset
    eigenvalues: tuple
    side: str  # "n=1" or "n=N"
    template: Callable = field(repr=False, compare=False)
    residuals: dict = field(default_factory=dict)
    reading: str | None = None
    reading_residuals: dict = field(default_factory=dict)

    @property
    def order_expr(self) -> str:
        return "N" if self.order_offset == 0 else f"N{self.order_offset:+d}"

    def order(self, n_cells: int) -> int:
        return n_cells + self.order_offset

    def states(self, n_cells: int) -> tuple:
        """``(psi_plus, psi_minus)`` at ``N`` cells, unnormalized as in the closed form."""
        return self.template(n_cells)

    def to_dict(self, n_cells: int | None = None) -> dict:
        out = {
            "case_id": self.case_id,
            "order": self.order_expr,
            "eigenvalues": [[e.real, e.imag] for e in map(complex, self.eigenvalues)],
            "side": self.side,
            "template_residuals": {str(k): v for k, v in self.residuals.items()},
        }
        if n_cells is not None:
            out["order_at_n"] = self.order(n_cells)
        if self.reading is not None:
            out["reading"] = self.reading
            out["reading_residuals"] = dict(self.reading_residuals)
        return out


def _pm(n_cells, head=None, tail=None):
    """Two length-2N vectors with the given ``(plus, minus)`` leading or trailing blocks."""
    out = []
    for block in (head if head is not None else tail):
        v = np.zeros(2 * n_cells, dtype=complex)
        if head is not None:
            v[: len(block)] = block
        else:
            v[-len(block):] = block
        out.append(v)
    return tuple(out)


def _template_residual(spec, energies, template, n_cells):
    h = build_open_chain(spec, n_cells)
    return max(
        float(np.linalg.norm(h @ v - e * v) / np.linalg.norm(v))
        for e, v in zip(energies, template(n_cells))
    )


def _verify(spec, energies, template, cells=VERIFY_CELLS):
    return {n: _template_residual(spec, energies, template, n) for n in cells}


def _small(x, tol):
    return abs(x) <= tol


def ep_classify_ssh(p: SSHLongRangeParams, tol_cond: float = TOL_COND) -> EPReport | None:
    """Match the four SSH real-space EP patterns; ``None`` if none applies."""
    if all(_small(t, tol_cond) for t in (p.t0, p.t1L, p.t1R, p.t2)):
        raise DegenerateModelError("all hoppings vanish")
    e0 = p.eps0
    cases = []
    if _small(p.t0, tol_cond) and _small(p.t1L, tol_cond) and not _small(p.t2, tol_cond):
        r = p.t1R / p.t2
        cases.append(("ssh-1", -2, (e0 + p.t2, e0 - p.t2), "n=1",
                      lambda n, r=r: _pm(n, head=([0, 1, r, 0, 1], [0, -1, r, 0, 1]))))
    if _small(p.t0, tol_cond) and _small(p.t1R, tol_cond) and not _small(p.t2, tol_cond):
        r = p.t1L / p.t2
        cases.append(("ssh-2", -2, (e0 + p.t2, e0 - p.t2), "n=N",
                      lambda n, r=r: _pm(n, tail=([1, 0, r, 1, 0], [1, 0, r, -1, 0]))))
    if _small(p.t2, tol_cond) and _small(p.t1L, tol_cond) and not _small(p.t0, tol_cond):
        cases.append(("ssh-3", 0, (e0 + p.t0, e0 - p.t0), "n=N",
                      lambda n: _pm(n, tail=([1, 1], [-1, 1]))))
    if _small(p.t2, tol_cond) and _small(p.t1R, tol_cond) and not _small(p.t0, tol_cond):
        cases.append(("ssh-4", 0, (e0 + p.t0, e0 - p.t0), "n=1",
                      lambda n: _pm(n, head=([1, 1], [1, -1]))))
    if not cases:
        return None
    spec = ssh_to_spec(p)
    case_id, offset, energies, side, template = cases[0]
    res = _verify(spec, energies, template)
    if max(res.values()) > TOL_TEMPLATE:
        raise TemplateVerificationError(f"{case_id} template fails H psi = E psi", res)
    return EPReport(case_id, offset, energies, side, template, res)


_S_READINGS = ("AB", "BB", "BA", "AA")


def _left_ep(p: LadderParams, case_id: str):
    """Closed form of the order-(N-1) ladder EP with vanishing leftward determinant and trace."""
    den = p.tL_AA * p.tR_BA + p.tL_AB * p.tR_BB
    if p.tL_AB == 0 or den == 0:
        return None
    e_l = (
        p.tL_AA * p.tL_AB * (p.tR_AA - p.tR_BB) + p.tL_AB**2 * p.tR_AB - p.tL_AA**2 * p.tR_BA
    ) / p.tL_AB
    sq = cmath.sqrt(e_l)
    energies = (p.eps0 + sq, p.eps0 - sq)
    P, Q = sq * p.tL_AA / den, sq * p.tL_AB / den

    def template_for(reading):
        s = (p.tL_AA * p.tR_AA + p.tL_AB * p.tR(reading)) / den
        return lambda n: _pm(n, tail=([P, Q, s, 1], [-P, -Q, s, 1]))

    spec = ladder_to_spec(p)
    trials = {r: _verify(spec, energies, template_for(r)) for r in _S_READINGS}
    reading_res = {r: max(v.values()) for r, v in trials.items()}
    passing = [r for r in _S_READINGS if reading_res[r] <= TOL_TEMPLATE]
    if not passing:
        raise TemplateVerificationError(f"{case_id}: no reading of S passes", reading_res)
    reading = passing[0]
    return energies, template_for(reading), trials[reading], reading, reading_res


def ep_classify_ladder(p: LadderParams, tol_cond: float = TOL_COND) -> EPReport | None:
    """Match the four ladder real-space EP patterns; every report is verified before return."""
    left = (p.tL_AA, p.tL_BB, p.tL_AB, p.tL_BA)
    right = (p.tR_AA, p.tR_BB, p.tR_AB, p.tR_BA)
    spec = ladder_to_spec(p)
    e0 = p.eps0

    if all(_small(t, tol_cond) for t in left + right + (p.t0L, p.t0R)):
        raise DegenerateModelError("all hoppings vanish")

    if all(_small(t, tol_cond) for t in left) and not _small(p.t0R, tol_cond):
        sq = cmath.sqrt(p.t0L * p.t0R)
        r = sq / p.t0R
        energies = (e0 + sq, e0 - sq)
        template = lambda n: _pm(n, tail=([r, 1], [-r, 1]))
        return _checked("ladder-i", 0, energies, "n=N", template, spec)

    if all(_small(t, tol_cond) for t in right) and not _small(p.t0R, tol_cond):
        sq = cmath.sqrt(p.t0L * p.t0R)
        r = sq / p.t0R
        energies = (e0 + sq, e0 - sq)
        template = lambda n: _pm(n, head=([r, 1], [r, -1]))
        return _checked("ladder-ii", 0, energies, "n=1", template, spec)

    def degenerate_left(q):
        return (
            _small(q.tL_AA * q.tL_BB - q.tL_AB * q.tL_BA, tol_cond)
            and _small(q.tL_AA + q.tL_BB, tol_cond)
            and _small(q.t0L, tol_cond)
            and _small(q.t0R, tol_cond)
        )

    if degenerate_left(p):
        found = _left_ep(p, "ladder-iii")
        if found is not None:
            energies, template, res, reading, rr = found
            return EPReport("ladder-iii", -1, energies, "n=N", template, res, reading, rr)

    q = p.mirrored()
    if degenerate_left(q):
        found = _left_ep(q, "ladder-iv")
        if found is not None:
            energies, mtemplate, _, reading, rr = found
            template = lambda n: tuple(v[::-1].copy() for v in mtemplate(n))
            return _checked("ladder-iv", -1, energies, "n=1", template, spec, reading, rr)
    return None


def _checked(case_id, offset, energies, side, template, spec, reading=None, reading_res=None):
    res = _verify(spec, energies, template)
    if max(res.values()) > TOL_TEMPLATE:
        raise TemplateVerificationError(f"{case_id} template fails H psi = E psi", res)
    return EPReport(case_id, offset, energies, side, template, res, reading, reading_res or {})


# -- generalized Brillouin zone ---------------------------------------------

@dataclass(frozen=True)
class GBZPoint:
    z: complex
    energy: complex
    pair_index: int  # zero-based position in the modulus-sorted root list


@dataclass(frozen=True)
class GBZSample:
    energy: complex
    accepted: bool
    gap: float
    outer_moduli: tuple  # moduli of the roots outside the middle pair
    reason: str = ""


@dataclass(frozen=True)
class GBZTrajectory:
    points: tuple
    samples: tuple

    def __len__(self):
        return len(self.points)

    @property
    def values(self) -> np.ndarray:
        return np.array([pt.z for pt in self.points], dtype=complex)

    @property
    def moduli(self) -> np.ndarray:
        return np.abs(self.values)

    @property
    def n_accepted(self) -> int:
        return sum(s.accepted for s in self.samples)


def gbz_trajectory(spec: HoppingSpec, energies: Sequence[complex], tol_gbz: float = TOL_GBZ) -> GBZTrajectory:
    """Middle root pair ``z_(d/2), z_(d/2+1)`` at each sampled energy, kept where the moduli agree."""
    points, samples = [], []
    for e in energies:
        e = complex(e)
        try:
            rs = roots(charpoly_generic(spec, e)).roots
        except DegenerateCoefficientError as exc:
            samples.append(GBZSample(e, False, math.inf, (), str(exc)))
            continue
        k = len(rs) // 2
        lo, hi = rs[k - 1], rs[k]
        gap = abs(abs(hi) - abs(lo))
        outer = tuple(abs(z) for i, z in enumerate(rs) if i not in (k - 1, k))
        ok = gap <= tol_gbz * abs(lo)
        samples.append(GBZSample(e, ok, gap, outer, "" if ok else "middle moduli differ"))
        if ok:
            points += [GBZPoint(lo, e, k - 1), GBZPoint(hi, e, k)]
    return GBZTrajectory(tuple(points), tuple(samples))


@dataclass(frozen=True)
class GBZComparison:
    max_deviation: float
    thetas: np.ndarray
    alphas: np.ndarray
    log_moduli: np.ndarray
    skipped: int

    def __float__(self):
        return self.max_deviation


def gbz_vs_alpha(p: SSHLongRangeParams, n_theta: int = 200, tol_gbz: float = TOL_GBZ) -> GBZComparison:
    """Compare ``alpha(theta)`` with ``log|C_z|`` of the root nearest ``exp(alpha + i theta)``.

    Each grid angle is seeded with its closed-form energy; angles without a
    validated solution are counted in ``skipped``.
    """
    spec = ssh_to_spec(p)
    thetas, alphas, logs = [], [], []
    skipped = 0
    for theta in math.pi * (np.arange(n_theta) + 0.5) / n_theta:
        sols = solve_theta(p, float(theta))
        if not sols:
            skipped += 1
            continue
        s = sols[0]
        traj = gbz_trajectory(spec, [s.energy], tol_gbz)
        if not traj.points:
            skipped += 1
            continue
        cz = min(traj.values, key=lambda z: abs(z - s.z1))
        thetas.append(theta)
        alphas.append(s.alpha)
        logs.append(math.log(abs(cz)))
    alphas, logs = np.array(alphas), np.array(logs)
    dev = float(np.max(np.abs(logs - alphas))) if len(alphas) else math.nan
    return GBZComparison(dev, np.array(thetas), alphas, logs, skipped)


# -- pseudo-Hermiticity ----------------------------------------------------

@dataclass(frozen=True)
class PseudoHermiticitySample:
    k: float
    product: float  # h_a(k) h_b(k), real when t0 = t2
    singular: bool
    unbroken: bool
    residual: float | None  # ||H^dagger - rho H rho^-1||, unbroken samples only
    spectrum_real: bool


@dataclass(frozen=True)
class PseudoHermiticityReport:
    samples: tuple

    @property
    def max_residual(self) -> float:
        vals = [s.residual for s in self.samples if s.residual is not None]
        return max(vals) if vals else 0.0

    @property
    def real_iff_unbroken(self) -> bool:
        return all(s.spectrum_real == s.unbroken for s in self.samples if not s.singular)

    def to_dict(self) -> dict:
        return {
            "n_samples": len(self.samples),
            "n_singular": int(sum(s.singular for s in self.samples)),
            "n_unbroken": int(sum(s.unbroken for s in self.samples)),
            "max_similarity_residual": self.max_residual,
            "real_spectrum_iff_unbroken": self.real_iff_unbroken,
        }


def pseudo_hermiticity_check(
    p: SSHLongRangeParams,
    k_samples: Sequence[float],
    tol_cond: float = TOL_COND,
) -> PseudoHermiticityReport:
    """Test ``H^dagger(k) = rho H(k) rho^-1`` with ``rho = diag(|sqrt(h_a h_b)/h_a|^2, 1)``."""
    if abs(p.t0 - p.t2) > tol_cond:
        raise ValueError("pseudo-Hermiticity construction needs t0 = t2")
    if not p.is_real():
        raise ValueError("pseudo-Hermiticity construction needs real eps0 and hoppings")
    spec = ssh_to_spec(SSHLongRangeParams(0.0, p.t0, p.t1L, p.t1R, p.t2))
    out = []
    for k in k_samples:
        h = build_bloch(spec, float(k))
        h_a, h_b = h[0, 1], h[1, 0]
        prod = h_a * h_b
        scale = max(abs(h_a), abs(h_b), 1.0)
        if abs(h_a) <= 1e-14 * scale or abs(h_b) <= 1e-14 * scale:
            out.append(PseudoHermiticitySample(float(k), 0.0, True, False, None, True))
            continue
        sq = cmath.sqrt(prod)
        rho = np.diag([abs(sq / h_a) ** 2, 1.0])
        rho_inv = np.diag([abs(sq / h_b) ** 2, 1.0])
        unbroken = prod.real >= 0
        residual = float(np.linalg.norm(h.conj().T - rho @ h @ rho_inv)) if unbroken else None
        ev = np.linalg.eigvals(h)
        real = bool(np.all(np.abs(ev.imag) <= 1e-12 * scale))
        out.append(PseudoHermiticitySample(float(k), float(prod.real), False, unbroken, residual, real))
    return PseudoHermiticityReport(tuple(out))
