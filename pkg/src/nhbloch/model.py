"""Two-orbital tight-binding chains: parameter records and matrix builders.

Sites are interleaved per cell, ``(1,A), (1,B), (2,A), (2,B), ...``, so the
zero-based row of ``(n, A)`` is ``2*(n-1)`` and of ``(n, B)`` is ``2*(n-1)+1``.

A hopping entry ``hops[(m, i, j)]`` is the amplitude of the term
``c^dagger_{n+m,i} c_{n,j}``: it moves weight from orbital ``j`` of cell ``n``
to orbital ``i`` of cell ``n+m``.  The *presence* of a key is structural
(it fixes the span of the characteristic polynomial); its value may be zero.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping

import numpy as np

from .errors import SizeError

ORBITALS = ("A", "B")
_ORB = {"A": 0, "B": 1}

HopKey = tuple[int, str, str]


@dataclass(frozen=True)
class HoppingSpec:
    """Generic two-band hopping table.

    Parameters
    ----------
    onsite : complex
        On-site energy shared by both orbitals.
    range : int
        Largest inter-cell offset ``M``.
    hops : mapping
        ``(m, i, j) -> amplitude`` with ``|m| <= M`` and ``i, j`` in ``{"A", "B"}``.
    """

    onsite: complex
    range: int
    hops: Mapping[HopKey, complex] = field(default_factory=dict)

    def __post_init__(self):
        if int(self.range) != self.range or self.range < 1:
            raise ValueError(f"range must be an integer >= 1, got {self.range!r}")
        clean = {}
        for key, value in dict(self.hops).items():
            m, i, j = key
            if i not in _ORB or j not in _ORB:
                raise ValueError(f"unknown orbital in hop key {key!r}")
            if abs(int(m)) > self.range:
                raise ValueError(f"offset {m} exceeds range M={self.range}")
            value = complex(value)
            if not (np.isfinite(value.real) and np.isfinite(value.imag)):
                raise ValueError(f"non-finite amplitude for {key!r}")
            clean[(int(m), i, j)] = value
        object.__setattr__(self, "onsite", complex(self.onsite))
        object.__setattr__(self, "range", int(self.range))
        object.__setattr__(self, "hops", MappingProxyType(clean))

    def hop(self, m: int, i: str, j: str) -> complex:
        return self.hops.get((m, i, j), 0j)

    def is_hermitian(self, tol: float = 0.0) -> bool:
        """True iff ``hop(-m, j, i) == conj(hop(m, i, j))`` for every entry and the on-site energy is real."""
        if abs(self.onsite.imag) > tol:
            return False
        keys = set(self.hops) | {(-m, j, i) for (m, i, j) in self.hops}
        return all(
            abs(self.hop(-m, j, i) - self.hop(m, i, j).conjugate()) <= tol
            for (m, i, j) in keys
        )

    def is_real(self, tol: float = 0.0) -> bool:
        return abs(self.onsite.imag) <= tol and all(
            abs(v.imag) <= tol for v in self.hops.values()
        )


@dataclass(frozen=True)
class SSHLongRangeParams:
    """SSH chain with intra-cell ``t0``, non-reciprocal ``t1L``/``t1R`` and next-nearest ``t2``."""

    eps0: complex = 0.0
    t0: complex = 1.0
    t1L: complex = 0.0
    t1R: complex = 0.0
    t2: complex = 0.0

    def swapped(self) -> "SSHLongRangeParams":
        """Copy with ``t1L`` and ``t1R`` exchanged."""
        return SSHLongRangeParams(self.eps0, self.t0, self.t1R, self.t1L, self.t2)

    def is_real(self) -> bool:
        return all(complex(v).imag == 0 for v in (self.eps0, self.t0, self.t1L, self.t1R, self.t2))


_LADDER_PAIRS = ("AA", "BB", "AB", "BA")


@dataclass(frozen=True)
class LadderParams:
    """Ladder chain: intra-cell ``t0L``/``t0R`` and eight nearest-cell amplitudes.

    ``tR_ij`` is the rightward amplitude from orbital ``j`` of cell ``n`` to
    orbital ``i`` of cell ``n+1``; ``tL_ij`` is the leftward amplitude from
    orbital ``i`` of cell ``n+1`` to orbital ``j`` of cell ``n``.
    """

    eps0: complex = 0.0
    t0L: complex = 0.0
    t0R: complex = 0.0
    tL_AA: complex = 0.0
    tL_BB: complex = 0.0
    tL_AB: complex = 0.0
    tL_BA: complex = 0.0
    tR_AA: complex = 0.0
    tR_BB: complex = 0.0
    tR_AB: complex = 0.0
    tR_BA: complex = 0.0

    def tL(self, pair: str) -> complex:
        return getattr(self, f"tL_{pair}")

    def tR(self, pair: str) -> complex:
        return getattr(self, f"tR_{pair}")

    def mirrored(self) -> "LadderParams":
        """Parameters of the chain read backwards with ``A`` and ``B`` exchanged.

        Reversing the site order maps ``(n, A) -> (N+1-n, B)``; under that map
        rightward and leftward hops trade places.  A state ``psi`` of the
        original chain becomes ``psi[::-1]`` of the mirrored one.
        """
        return LadderParams(
            eps0=self.eps0,
            t0L=self.t0R,
            t0R=self.t0L,
            tR_AA=self.tL_BB,
            tR_BB=self.tL_AA,
            tR_AB=self.tL_AB,
            tR_BA=self.tL_BA,
            tL_AA=self.tR_BB,
            tL_BB=self.tR_AA,
            tL_AB=self.tR_AB,
            tL_BA=self.tR_BA,
        )


def ssh_to_spec(p: SSHLongRangeParams) -> HoppingSpec:
    hops = {
        (0, "A", "B"): p.t0,
        (0, "B", "A"): p.t0,
        (1, "A", "B"): p.t1R,
        (-1, "B", "A"): p.t1L,
        (2, "A", "B"): p.t2,
        (-2, "B", "A"): p.t2,
    }
    return HoppingSpec(onsite=p.eps0, range=2, hops=hops)


def ladder_to_spec(p: LadderParams) -> HoppingSpec:
    # t0L multiplies c^dagger_A c_B; this is the choice that reproduces the
    # closed-form ladder coefficients (checked in the test suite).
    hops = {(0, "A", "B"): p.t0L, (0, "B", "A"): p.t0R}
    for pair in _LADDER_PAIRS:
        i, j = pair
        hops[(1, i, j)] = p.tR(pair)
        hops[(-1, j, i)] = p.tL(pair)
    return HoppingSpec(onsite=p.eps0, range=1, hops=hops)


def min_cells(spec: HoppingSpec) -> int:
    """Smallest N in which every offset ``|m| <= M`` connects two cells of the chain."""
    return spec.range + 1


def site_index(n: int, orbital: str) -> int:
    """Zero-based row of ``(n, orbital)`` for one-based cell ``n``."""
    return 2 * (n - 1) + _ORB[orbital]


def build_open_chain(spec: HoppingSpec, n_cells: int) -> np.ndarray:
    """Dense ``2N x 2N`` open-boundary Hamiltonian (hoppings leaving the chain are dropped)."""
    minimum = min_cells(spec)
    if n_cells < minimum:
        raise SizeError(n_cells, minimum)
    size = 2 * n_cells
    h = np.zeros((size, size), dtype=complex)
    h[np.diag_indices(size)] = spec.onsite
    for (m, i, j), t in spec.hops.items():
        if t == 0:
            continue
        src = np.arange(max(0, -m), min(n_cells, n_cells - m))
        h[2 * (src + m) + _ORB[i], 2 * src + _ORB[j]] += t
    return h


def build_periodic_chain(spec: HoppingSpec, n_cells: int) -> np.ndarray:
    """Dense periodic-boundary Hamiltonian; wrapped hoppings accumulate."""
    size = 2 * n_cells
    h = np.zeros((size, size), dtype=complex)
    h[np.diag_indices(size)] = spec.onsite
    src = np.arange(n_cells)
    for (m, i, j), t in spec.hops.items():
        np.add.at(h, (2 * ((src + m) % n_cells) + _ORB[i], 2 * src + _ORB[j]), t)
    return h


def build_bloch(spec: HoppingSpec, k: float) -> np.ndarray:
    """2x2 Bloch matrix ``H(k)[i, j] = sum_m hop(m, i, j) exp(-i m k) + eps0 delta_ij``."""
    h = np.eye(2, dtype=complex) * spec.onsite
    for (m, i, j), t in spec.hops.items():
        h[_ORB[i], _ORB[j]] += t * cmath.exp(-1j * m * k)
    return h
