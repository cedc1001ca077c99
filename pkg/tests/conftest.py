import numpy as np
import pytest

from radpair import RadicalPairSpec
from radpair.system import Electron, NucleusSpec

GAMMA = 1.76e11


@pytest.fixture
def proton():
    """One spin-1/2 nucleus on electron A, a = 1000 uT."""
    return RadicalPairSpec.from_couplings([1000.0])


@pytest.fixture
def rng():
    return np.random.default_rng(20221019)


def random_spec(rng, max_nuclei=3, spins=("1/2", "1")):
    n = int(rng.integers(0, max_nuclei + 1))
    nuclei = tuple(
        NucleusSpec(float(rng.uniform(-3000, 3000)), spins[int(rng.integers(len(spins)))],
                    Electron.A if rng.random() < 0.5 else Electron.B)
        for _ in range(n)
    )
    return RadicalPairSpec(nuclei)
