"""Characteristic polynomial in ``z``, its roots, and Vieta identities.

Coefficients follow the alternating-sign convention

    P(z) = omega_0 z^d - omega_1 z^(d-1) + omega_2 z^(d-2) - ... + (-1)^d omega_d,

so that the k-th elementary symmetric polynomial of the roots equals
``omega_k / omega_0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DegenerateCoefficientError
from .model import HoppingSpec, LadderParams, SSHLongRangeParams

TOL_ROOT = 1e-9
TOL_VIETA = 1e-8
TOL_TIE = 1e-9


@dataclass(frozen=True)
class CharPoly:
    omega: tuple
    energy: complex

    def __post_init__(self):
        omega = tuple(complex(w) for w in self.omega)
        if len(omega) < 2:
            raise ValueError("characteristic polynomial has no z dependence")
        if omega[0] == 0:
            raise DegenerateCoefficientError(
                f"omega_0 = 0 at E = {self.energy}; the parameters may sit on an exceptional point"
            )
        object.__setattr__(self, "omega", omega)
        object.__setattr__(self, "energy", complex(self.energy))

    @property
    def degree(self) -> int:
        return len(self.omega) - 1

    def monomial(self) -> np.ndarray:
        """Coefficients of ``P`` in descending powers of ``z`` (signs applied)."""
        w = np.asarray(self.omega)
        return w * (-1.0) ** np.arange(len(w))

    def __call__(self, z):
        return np.polyval(self.monomial(), z)

    def residual(self, z) -> float:
        """``|P(z)|`` scaled by ``max|omega| * max(1, |z|)^d``."""
        scale = max(abs(w) for w in self.omega) * max(1.0, abs(z)) ** self.degree
        return float(abs(self(z)) / scale)

    def normalized(self) -> np.ndarray:
        """``omega_k / omega_0``; invariant under overall rescaling of ``P``."""
        return np.asarray(self.omega) / self.omega[0]


@dataclass(frozen=True)
class RootSet:
    roots: tuple

    def __len__(self):
        return len(self.roots)

    def __iter__(self):
        return iter(self.roots)

    def __getitem__(self, k):
        return self.roots[k]

    @property
    def moduli(self) -> np.ndarray:
        return np.abs(np.asarray(self.roots))


# -- Laurent bookkeeping ---------------------------------------------------

def _block(spec: HoppingSpec, i: str, j: str) -> dict:
    """``h_ij(z) = sum_m hop(m, i, j) z^(-m)`` as ``{exponent: coefficient}``; zero-valued keys kept."""
    out = {}
    for (m, a, b), t in spec.hops.items():
        if (a, b) == (i, j):
            out[-m] = out.get(-m, 0j) + t
    return out


def _mul(p: dict, q: dict) -> dict:
    out = {}
    for a, x in p.items():
        for b, y in q.items():
            out[a + b] = out.get(a + b, 0j) + x * y
    return out


def _shifted(block: dict, shift: complex) -> dict:
    """``shift - block``; the constant term is always structurally present."""
    out = {e: -c for e, c in block.items()}
    out[0] = out.get(0, 0j) + shift
    return out


def charpoly_generic(spec: HoppingSpec, energy: complex) -> CharPoly:
    """Characteristic polynomial of a two-band spec at energy ``E``.

    ``P(z) z^(-lo) = h_AB h_BA - (E - eps0 - h_AA)(E - eps0 - h_BB)``, where the
    exponent span ``[lo, hi]`` is fixed by which hop keys are present, not by
    their values.  A vanishing top coefficient is therefore reported instead
    of silently lowering the degree.
    """
    d = complex(energy) - spec.onsite
    off = _mul(_block(spec, "A", "B"), _block(spec, "B", "A"))
    diag = _mul(_shifted(_block(spec, "A", "A"), d), _shifted(_block(spec, "B", "B"), d))
    laurent = dict(off)
    for e, c in diag.items():
        laurent[e] = laurent.get(e, 0j) - c
    hi, lo = max(laurent), min(laurent)
    coeffs = [laurent.get(e, 0j) for e in range(hi, lo - 1, -1)]
    omega = tuple(c * (-1) ** k for k, c in enumerate(coeffs))
    return CharPoly(omega, energy)


def charpoly_ssh(p: SSHLongRangeParams, energy: complex) -> CharPoly:
    d = complex(energy) - p.eps0
    w0 = p.t0 * p.t2
    omega = (
        w0,
        -(p.t0 * p.t1L + p.t1R * p.t2),
        p.t0**2 + p.t1L * p.t1R + p.t2**2 - d**2,
        -(p.t0 * p.t1R + p.t1L * p.t2),
        w0,
    )
    return CharPoly(omega, energy)


def charpoly_ladder(p: LadderParams, energy: complex) -> CharPoly:
    d = complex(energy) - p.eps0
    omega = (
        p.tL_AA * p.tL_BB - p.tL_AB * p.tL_BA,
        d * (p.tL_AA + p.tL_BB) + p.t0L * p.tL_AB + p.t0R * p.tL_BA,
        d**2
        + p.tL_AA * p.tR_BB
        + p.tL_BB * p.tR_AA
        - p.t0L * p.t0R
        - p.tL_AB * p.tR_AB
        - p.tL_BA * p.tR_BA,
        d * (p.tR_AA + p.tR_BB) + p.t0L * p.tR_BA + p.t0R * p.tR_AB,
        p.tR_AA * p.tR_BB - p.tR_AB * p.tR_BA,
    )
    return CharPoly(omega, energy)


# -- roots -----------------------------------------------------------------

def _phase(z: complex, tol: float) -> float:
    ph = math.atan2(z.imag, z.real) % (2 * math.pi)
    return 0.0 if ph > 2 * math.pi - tol else ph


def sort_roots(values: Sequence[complex], tie_tol: float = TOL_TIE) -> tuple:
    """Ascending modulus; moduli equal within ``tie_tol`` (relative) are ordered by phase in [0, 2pi)."""
    vals = sorted((complex(v) for v in values), key=abs)
    out, group = [], []
    for v in vals:
        if group and abs(v) - abs(group[0]) > tie_tol * max(1.0, abs(group[0])):
            out.extend(sorted(group, key=lambda z: _phase(z, tie_tol)))
            group = []
        group.append(v)
    out.extend(sorted(group, key=lambda z: _phase(z, tie_tol)))
    return tuple(out)


def companion_matrix(cp: CharPoly) -> np.ndarray:
    c = cp.monomial()
    n = cp.degree
    comp = np.zeros((n, n), dtype=complex)
    comp[0, :] = -c[1:] / c[0]
    comp[np.arange(1, n), np.arange(n - 1)] = 1.0
    return comp


def roots(cp: CharPoly, tie_tol: float = TOL_TIE) -> RootSet:
    from .numerics import eigvals_dense

    return RootSet(sort_roots(eigvals_dense(companion_matrix(cp)), tie_tol))


def elementary_symmetric(values: Sequence[complex]) -> np.ndarray:
    """``[e_1, ..., e_n]`` of the given values."""
    c = np.poly(np.asarray(values, dtype=complex))
    return c[1:] * (-1.0) ** np.arange(1, len(c))


def vieta_residuals(cp: CharPoly, rs: RootSet) -> np.ndarray:
    if len(rs) != cp.degree:
        raise ValueError(f"{len(rs)} roots for a degree-{cp.degree} polynomial")
    return np.abs(elementary_symmetric(rs.roots) - cp.normalized()[1:])
