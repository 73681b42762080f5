"""Generalized Bloch solutions of the long-range SSH chain.

For ``theta`` in ``(0, pi)`` the open chain admits states built on the
conjugate root pair ``z = exp(alpha +- i theta)`` of the quartic
characteristic polynomial.  ``alpha(theta)`` follows from Vieta's formulas,
``E(alpha)`` in closed form, and ``theta`` is quantized at finite ``N`` by the
boundary conditions.

Two quantization rules are available:

``"reduced"``
    ``sin((N+1)t) + mu1 sin(N t) + mu2 sin((N-1)t) = 0`` with
    ``mu1 = e^-alpha t1R/t0`` and ``mu2 = e^-2alpha t2/t0``.  It imposes only
    ``phi_(0,B) = phi_(N+1,A) = 0`` and keeps the two bulk components, which is
    exact when ``t2 = 0`` and correct to ``O(1/N)`` otherwise.
``"full"``
    All four ghost amplitudes that the open chain drops,
    ``phi_(0,B), phi_(-1,B), phi_(N+1,A), phi_(N+2,A)``, are required to vanish
    with all four roots ``exp(alpha +- i theta), z3, z4`` in the state.  The
    eigenvalues still lie on ``E(alpha(theta))``; only the quantized
    ``theta`` values move.  This reproduces dense diagonalization to rounding.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .errors import DegenerateCoefficientError, SingularAlphaError, SizeError
from .model import SSHLongRangeParams
from .numerics import canonical_state
from .polynomial import TOL_ROOT, charpoly_ssh, roots

log = logging.getLogger(__name__)

TOL_ZERO = 1e-10
TOL_SEP = 1e-8
TOL_COND = 1e-10
MIN_CELLS = 6
BOUNDARY_RULES = ("full", "reduced")


@dataclass(frozen=True)
class GBSolution:
    theta: float
    alpha: float
    energy: complex
    branch: int
    z1: complex
    z2: complex
    z3: complex
    z4: complex
    phi0: complex = 1.0
    n_cells: int = 0  # 0 = thermodynamic limit
    flags: tuple = ()

    @property
    def mu1_mu2(self):
        raise AttributeError("use mu_coefficients(params, alpha)")


@dataclass(frozen=True)
class Quantization:
    thetas: tuple
    boundary: str
    n_cells: int
    skipped: tuple = ()  # (lo, hi, reason)
    rejected: tuple = ()  # (theta, reason)

    def __len__(self):
        return len(self.thetas)

    def __iter__(self):
        return iter(self.thetas)

    def __getitem__(self, k):
        return self.thetas[k]

    @property
    def count(self) -> int:
        return len(self.thetas)


def ssh_omegas(p: SSHLongRangeParams) -> tuple:
    """Energy-independent coefficients ``(omega_0, omega_1, omega_3)``."""
    return (
        p.t0 * p.t2,
        -(p.t0 * p.t1L + p.t1R * p.t2),
        -(p.t0 * p.t1R + p.t1L * p.t2),
    )


def skin_free(p: SSHLongRangeParams, tol: float = TOL_COND) -> bool:
    _, w1, w3 = ssh_omegas(p)
    return abs(w1 - w3) <= tol


def mu_coefficients(p: SSHLongRangeParams, alpha: float) -> tuple:
    return (
        math.exp(-alpha) * p.t1R / p.t0,
        math.exp(-2 * alpha) * p.t2 / p.t0,
    )


# -- closed forms ------------------------------------------------------------

def energy_of_alpha(p: SSHLongRangeParams, alpha: float, theta: float | None = None) -> tuple:
    """Both branches ``eps0 +- sqrt(...)`` of the closed-form eigenvalue.

    ``theta`` is accepted for call-site symmetry; the energy depends on it
    only through ``alpha``.
    """
    w0, w1, w3 = ssh_omegas(p)
    if w0 == 0:
        raise DegenerateCoefficientError("t0 * t2 = 0")
    sh = math.sinh(2 * alpha)
    if sh == 0:
        raise SingularAlphaError("closed-form energy divides by sinh^2(2 alpha); alpha = 0")
    ch = math.cosh(2 * alpha)
    rad = p.t0**2 + p.t1L * p.t1R + p.t2**2 - w0 * (
        2 * ch + (2 * w1 * w3 * ch - w1**2 - w3**2) / (4 * w0**2 * sh**2)
    )
    root = complex(rad) ** 0.5
    return (p.eps0 + root, p.eps0 - root)


def energy_at_root(p: SSHLongRangeParams, z: complex) -> tuple:
    """Both energies for which ``z`` solves the bulk equations (valid at alpha = 0 too)."""
    h_ab = p.t0 + p.t1R / z + p.t2 / z**2
    h_ba = p.t0 + p.t1L * z + p.t2 * z**2
    root = complex(h_ab * h_ba) ** 0.5
    return (p.eps0 + root, p.eps0 - root)


def _polish(coeffs, u, steps=20):
    p = np.poly1d(coeffs)
    dp = p.deriv()
    for _ in range(steps):
        d = dp(u)
        if d == 0:
            break
        step = p(u) / d
        u = u - step
        if abs(step) <= 4e-16 * abs(u):
            break
    return u


@dataclass(frozen=True)
class _Check:
    ok: bool
    energy: complex
    z3: complex
    z4: complex
    reason: str = ""


def _check_pair(p, alpha, theta, energy, tol_root, tol_sep) -> _Check:
    """Is ``exp(alpha +- i theta)`` the middle root pair at ``energy``?"""
    cp = charpoly_ssh(p, energy)
    z1 = complex(math.exp(alpha) * complex(math.cos(theta), math.sin(theta)))
    z2 = z1.conjugate() if p.is_real() else math.exp(alpha) * complex(math.cos(theta), -math.sin(theta))
    res = max(cp.residual(z1), cp.residual(z2))
    if res > tol_root:
        return _Check(False, energy, 0j, 0j, f"root residual {res:.2e}")
    rs = list(roots(cp))
    for z in (z1, z2):
        rs.pop(int(np.argmin([abs(r - z) for r in rs])))
    z3, z4 = sorted(rs, key=abs)
    r = math.exp(alpha)
    if min(abs(abs(z3) - r), abs(abs(z4) - r)) <= tol_sep * r:
        return _Check(False, energy, z3, z4, "degenerate modulus: a third root has |z| = e^alpha")
    if not abs(z3) < r < abs(z4):
        return _Check(False, energy, z3, z4, "pair is not the middle-modulus pair")
    return _Check(True, energy, z3, z4)


def _alpha_candidates(p, theta, tol_zero, tol_sep, tol_root):
    w0, w1, w3 = ssh_omegas(p)
    c = math.cos(theta)
    quartic = [2 * w0 * c, -w1, 0.0, w3, -2 * w0 * c]
    out = []
    for u in np.roots(quartic):
        if abs(u.imag) > 1e-7 * abs(u) or u.real <= 0:
            continue
        u = _polish(quartic, complex(u.real))
        if abs(u.imag) > 1e-9 * abs(u) or u.real <= 0:
            continue
        alpha = math.log(u.real)
        if abs(alpha) <= tol_zero or any(abs(alpha - a) <= 1e-12 for a, _ in out):
            continue
        chk = _check_pair(p, alpha, theta, energy_of_alpha(p, alpha)[0], tol_root, tol_sep)
        if chk.ok:
            out.append((alpha, chk))
        else:
            log.debug("theta=%.6g alpha=%.6g rejected: %s", theta, alpha, chk.reason)
    out.sort(key=lambda t: t[0])
    return out


def alpha_of_theta(
    p: SSHLongRangeParams,
    theta: float,
    tol_zero: float = TOL_ZERO,
    tol_sep: float = TOL_SEP,
    tol_root: float = TOL_ROOT,
) -> tuple:
    """Validated nonzero ``alpha`` with ``exp(alpha +- i theta)`` the middle root pair.

    With ``u = e^alpha`` the Vieta constraint becomes the quartic
    ``2 w0 cos(theta) (u^4 - 1) = w1 u^3 - w3 u``.  Each positive real root is
    checked against the characteristic polynomial at the matching energy;
    spurious roots and the degenerate equal-modulus case are dropped.
    """
    if not 0 < theta < math.pi:
        raise ValueError(f"theta must lie in (0, pi), got {theta}")
    w0, w1, w3 = ssh_omegas(p)
    if w0 == 0:
        raise DegenerateCoefficientError("t0 * t2 = 0")
    if w1 == w3:
        return ()
    cands = _alpha_candidates(p, theta, tol_zero, tol_sep, tol_root)
    if not cands:
        log.debug("no validated alpha at theta=%.6g", theta)
    return tuple(a for a, _ in cands)


def solve_theta(
    p: SSHLongRangeParams,
    theta: float,
    n_cells: int = 0,
    tol_zero: float = TOL_ZERO,
    tol_sep: float = TOL_SEP,
    tol_root: float = TOL_ROOT,
    tol_cond: float = TOL_COND,
) -> tuple:
    """The two generalized Bloch solutions (``+`` and ``-`` branch) at ``theta``, or ``()``.

    Skin-free parameters (``omega_1 = omega_3``) use ``alpha = 0``; otherwise
    the branch of smallest ``|alpha|`` among validated candidates is taken.
    """
    if skin_free(p, tol_cond):
        alpha = 0.0
        energies = energy_at_root(p, complex(math.cos(theta), math.sin(theta)))
        chk = _check_pair(p, 0.0, theta, energies[0], tol_root, tol_sep)
        if not chk.ok:
            log.debug("theta=%.6g alpha=0 rejected: %s", theta, chk.reason)
            return ()
        flags = ()
    else:
        cands = _alpha_candidates(p, theta, tol_zero, tol_sep, tol_root)
        if not cands:
            return ()
        alpha, chk = min(cands, key=lambda t: abs(t[0]))
        energies = energy_of_alpha(p, alpha)
        flags = ("multiple-alpha",) if len(cands) > 1 else ()
    z1 = math.exp(alpha) * complex(math.cos(theta), math.sin(theta))
    z2 = math.exp(alpha) * complex(math.cos(theta), -math.sin(theta))
    return tuple(
        GBSolution(theta, alpha, e, b, z1, z2, chk.z3, chk.z4, n_cells=n_cells, flags=flags)
        for e, b in zip(energies, (1, -1))
    )


# -- finite-N boundary conditions -------------------------------------------

def _basis(theta, alpha, z3, z4, n):
    """B-orbital amplitudes of the four bulk components at cells ``n``.

    Real outer roots enter as ``z3^n`` and ``z4^n`` separately (mixing them
    would let the larger one swamp both columns at one end of the chain); a
    conjugate outer pair enters as ``Re z3^n`` and ``Im z3^n``, and a double
    root as ``z^n`` and ``n z^(n-1)``.
    """
    n = np.asarray(n, dtype=float)
    env = np.exp(alpha * n)
    cols = [env * np.cos(n * theta), env * np.sin(n * theta)]
    z3, z4 = complex(z3), complex(z4)
    scale = max(abs(z3), abs(z4))
    if abs(z4 - z3) <= 1e-6 * scale:
        mid = 0.5 * (z3 + z4)
        cols += [np.power(mid, n), n * np.power(mid, n - 1)]
    elif abs(z3 - z4.conjugate()) <= 1e-9 * scale and abs(z3.imag) > 1e-9 * scale:
        zn = np.power(z3 if z3.imag > 0 else z4, n)
        cols += [zn.real, zn.imag]
    else:
        cols += [np.power(z3, n), np.power(z4, n)]
    return np.array(cols, dtype=complex)


def _a_times_d(p, b):
    """``(E - eps0) phi_(n,A)`` from ``phi_B`` at ``n, n-1, n-2`` via the A-row bulk equation."""
    return lambda n: p.t0 * b(n) + p.t1R * b(np.asarray(n) - 1) + p.t2 * b(np.asarray(n) - 2)


def boundary_matrix(p: SSHLongRangeParams, sol: GBSolution, n_cells: int):
    """Column-normalized 4x4 ghost-amplitude matrix and the column norms."""
    b = lambda n: _basis(sol.theta, sol.alpha, sol.z3, sol.z4, n)
    a = _a_times_d(p, b)
    rows = np.array([b(0), b(-1), a(n_cells + 1), a(n_cells + 2)])
    norms = np.linalg.norm(rows, axis=0)
    return rows / norms, norms


def _reduced_condition(p, alpha, theta, n_cells):
    mu1, mu2 = mu_coefficients(p, alpha)
    val = (
        math.sin((n_cells + 1) * theta)
        + mu1 * math.sin(n_cells * theta)
        + mu2 * math.sin((n_cells - 1) * theta)
    )
    return complex(val).real, 1.0 + abs(mu1) + abs(mu2)


def _full_condition(p, sol, n_cells):
    m, _ = boundary_matrix(p, sol, n_cells)
    return float(np.linalg.det(m).real), m


def quantized_thetas(
    p: SSHLongRangeParams,
    n_cells: int,
    boundary: str = "full",
    grid_factor: int = 40,
    xtol: float = 1e-12,
    tol_zero: float = TOL_ZERO,
    tol_sep: float = TOL_SEP,
    tol_root: float = TOL_ROOT,
    tol_cond: float = TOL_COND,
) -> Quantization:
    """Allowed ``theta`` in ``(0, pi)`` at ``N`` cells.

    Sign changes of the boundary condition on a grid of ``grid_factor * N``
    points are bisected to ``xtol``.  Grid intervals without a validated
    ``alpha`` are skipped and reported; brackets that straddle a
    discontinuity rather than a zero are rejected and reported.
    """
    if boundary not in BOUNDARY_RULES:
        raise ValueError(f"boundary must be one of {BOUNDARY_RULES}, got {boundary!r}")
    if n_cells < MIN_CELLS:
        raise SizeError(n_cells, MIN_CELLS, "theta quantization")
    if not p.is_real():
        raise ValueError("theta quantization needs real parameters")
    if p.t0 == 0:
        raise DegenerateCoefficientError("t0 = 0: mu coefficients undefined")

    no_alpha = p.t1R == 0 and p.t2 == 0  # mu1 = mu2 = 0 whatever alpha is
    if p.t2 == 0:
        boundary_used = "reduced"  # only two ghost amplitudes couple; the reduced rule is exact
    else:
        boundary_used = boundary

    def evaluate(theta):
        if no_alpha:
            return _reduced_condition(p, 0.0, theta, n_cells)[0]
        if p.t2 == 0:
            alpha = 0.0 if skin_free(p, tol_cond) else None
            if alpha is None:
                return None
            return _reduced_condition(p, alpha, theta, n_cells)[0]
        sols = solve_theta(p, theta, n_cells, tol_zero, tol_sep, tol_root, tol_cond)
        if not sols:
            return None
        if boundary_used == "reduced":
            return _reduced_condition(p, sols[0].alpha, theta, n_cells)[0]
        return _full_condition(p, sols[0], n_cells)[0]

    grid = np.linspace(0.0, math.pi, grid_factor * n_cells + 1)[1:-1]
    values = [evaluate(t) for t in grid]
    thetas, skipped, rejected = [], [], []
    for k in range(len(grid) - 1):
        fa, fb = values[k], values[k + 1]
        if fa is None or fb is None:
            lo, hi = grid[k], grid[k + 1]
            if skipped and skipped[-1][1] == lo:
                skipped[-1] = (skipped[-1][0], hi, skipped[-1][2])
            else:
                skipped.append((lo, hi, "no validated alpha"))
            continue
        if fa == 0:
            root = grid[k]
        elif fa * fb < 0:
            root = brentq(lambda t: evaluate(t) or 0.0, grid[k], grid[k + 1], xtol=xtol)
        else:
            continue
        ok, why = _accept(p, root, n_cells, boundary_used, no_alpha, tol_zero, tol_sep, tol_root, tol_cond)
        if ok:
            if not thetas or abs(root - thetas[-1]) > 10 * xtol:
                thetas.append(float(root))
        else:
            rejected.append((float(root), why))
    if skipped:
        log.info("theta quantization skipped %d interval(s) without a validated alpha", len(skipped))
    return Quantization(tuple(thetas), boundary_used, n_cells, tuple(skipped), tuple(rejected))


def _accept(p, theta, n_cells, boundary, no_alpha, *tols):
    if no_alpha or p.t2 == 0:
        alpha = 0.0
        val, scale = _reduced_condition(p, alpha, theta, n_cells)
        return abs(val) <= 1e-8 * scale, "reduced condition not small"
    sols = solve_theta(p, theta, n_cells, *tols)
    if not sols:
        return False, "alpha lost at root"
    if boundary == "reduced":
        val, scale = _reduced_condition(p, sols[0].alpha, theta, n_cells)
        return abs(val) <= 1e-8 * scale, f"|condition| = {abs(val):.2e} (jump, not a zero)"
    _, m = _full_condition(p, sols[0], n_cells)
    smin = np.linalg.svd(m, compute_uv=False)[-1]
    return smin <= 1e-8, f"sigma_min = {smin:.2e} (jump, not a zero)"


def analytic_spectrum(p: SSHLongRangeParams, n_cells: int, boundary: str = "full", **kw) -> list:
    """Both-branch generalized Bloch solutions at every quantized ``theta``."""
    q = quantized_thetas(p, n_cells, boundary=boundary, **kw)
    out = []
    tols = {k: v for k, v in kw.items() if k in ("tol_zero", "tol_sep", "tol_root", "tol_cond")}
    for theta in q:
        if p.t2 == 0:
            out.extend(_nearest_neighbour_solutions(p, theta, n_cells))
        else:
            out.extend(solve_theta(p, theta, n_cells, **tols))
    return out


def _nearest_neighbour_solutions(p, theta, n_cells):
    # t2 = 0: alpha = 0 when skin-free; t1R = 0 makes mu vanish for any alpha.
    z = complex(math.cos(theta), math.sin(theta))
    return tuple(
        GBSolution(theta, 0.0, e, b, z, z.conjugate(), 0j, 0j, n_cells=n_cells, flags=("nearest-neighbour",))
        for e, b in zip(energy_at_root(p, z), (1, -1))
    )


def eigenstate_ssh(
    p: SSHLongRangeParams,
    sol: GBSolution,
    n_cells: int,
    boundary: str = "full",
) -> np.ndarray:
    """Site amplitudes (length ``2N``, interleaved A/B), unit norm, largest entry real positive.

    ``"reduced"`` returns the two-component closed form
    ``phi_(n,A) = e^(alpha n) [sin(n t) + mu1 sin((n-1) t) + mu2 sin((n-2) t)]``,
    ``phi_(n,B) = (E - eps0)/t0 e^(alpha n) sin(n t)``.
    ``"full"`` adds the two outer-root components fixed by the null vector
    of the 4x4 boundary matrix; it is the exact eigenvector when ``theta``
    was quantized with the full rule.
    """
    d = sol.energy - p.eps0
    if d == 0:
        raise ValueError("E = eps0 states are outside the generalized Bloch ansatz")
    n = np.arange(1, n_cells + 1)
    if boundary == "reduced" or p.t2 == 0:
        mu1, mu2 = mu_coefficients(p, sol.alpha)
        env = np.exp(sol.alpha * n)
        phi_a = env * (np.sin(n * sol.theta) + mu1 * np.sin((n - 1) * sol.theta) + mu2 * np.sin((n - 2) * sol.theta))
        phi_b = (d / p.t0) * env * np.sin(n * sol.theta)
    elif boundary == "full":
        m, norms = boundary_matrix(p, sol, n_cells)
        coef = np.linalg.svd(m)[2][-1].conj() / norms
        b = lambda k: coef @ _basis(sol.theta, sol.alpha, sol.z3, sol.z4, k)
        phi_b = b(n)
        phi_a = _a_times_d(p, b)(n) / d
    else:
        raise ValueError(f"boundary must be one of {BOUNDARY_RULES}, got {boundary!r}")
    psi = np.empty(2 * n_cells, dtype=complex)
    psi[0::2] = phi_a
    psi[1::2] = phi_b
    return canonical_state(psi)
