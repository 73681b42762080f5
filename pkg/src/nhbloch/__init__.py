"""Exact open-boundary solutions of non-Hermitian two-band chains.

The closed-form generalized Bloch solver (:mod:`nhbloch.gbt`) is checked
against dense diagonalization (:mod:`nhbloch.numerics`); :mod:`nhbloch.analysis`
adds skin-effect conditions, real-space exceptional points and the
generalized Brillouin zone.
"""

from .analysis import (
    EPReport,
    GBZTrajectory,
    SkinVerdict,
    ep_classify_ladder,
    ep_classify_ssh,
    gbz_trajectory,
    gbz_vs_alpha,
    pseudo_hermiticity_check,
    skin_condition_ladder,
    skin_condition_ssh,
)
from .gbt import (
    GBSolution,
    alpha_of_theta,
    analytic_spectrum,
    eigenstate_ssh,
    energy_of_alpha,
    quantized_thetas,
)
from .model import (
    HoppingSpec,
    LadderParams,
    SSHLongRangeParams,
    build_bloch,
    build_open_chain,
    build_periodic_chain,
    ladder_to_spec,
    ssh_to_spec,
)
from .numerics import EigResult, JordanEstimate, eig_dense, jordan_structure, localization_fit
from .polynomial import CharPoly, RootSet, charpoly_generic, charpoly_ladder, charpoly_ssh, roots, vieta_residuals

__version__ = "0.1.0"
