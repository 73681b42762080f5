import numpy as np
import pytest

from nhbloch.model import LadderParams, SSHLongRangeParams

FIG2 = SSHLongRangeParams(eps0=0.0, t0=1.0, t1L=2.5, t1R=3.5, t2=1.3)
PSEUDO = SSHLongRangeParams(eps0=0.0, t0=1.0, t1L=2.5, t1R=3.5, t2=1.0)
FIG4 = SSHLongRangeParams(eps0=0.0, t0=0.0, t1L=0.0, t1R=3.5, t2=1.3)

_LADDER_COMMON = dict(
    eps0=0.0, t0L=1.0, t0R=0.5,
    tL_AA=1.2, tR_AA=0.6, tL_BB=0.6, tR_BB=1.2,
    tR_AB=1.0, tL_BA=3.0, tR_BA=1.5,
)
FIG3A = LadderParams(tL_AB=1.1, **_LADDER_COMMON)
FIG3B = LadderParams(tL_AB=0.5, **_LADDER_COMMON)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_ssh(rng, complex_=False, eps0=True):
    vals = rng.uniform(0.3, 2.0, size=4) * rng.choice([-1, 1], size=4)
    if complex_:
        vals = vals + 1j * rng.uniform(-1, 1, size=4)
    e0 = rng.uniform(-1, 1) if eps0 else 0.0
    return SSHLongRangeParams(e0, *vals)


def random_ladder(rng, complex_=False):
    keys = ["t0L", "t0R", "tL_AA", "tL_BB", "tL_AB", "tL_BA", "tR_AA", "tR_BB", "tR_AB", "tR_BA"]
    vals = rng.uniform(-1.5, 1.5, size=len(keys))
    if complex_:
        vals = vals + 1j * rng.uniform(-1, 1, size=len(keys))
    return LadderParams(eps0=rng.uniform(-1, 1), **dict(zip(keys, vals)))
