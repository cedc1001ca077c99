"""Radical pair spin dynamics and hypomagnetic field effects.

Isotropic hyperfine + Zeeman Hamiltonians for two electron radicals,
closed-form singlet/triplet yields, quantum-beat traces and parameter
sweeps over field, hyperfine coupling and kinetic rates.
"""

from radpair.spin import Spin, kron, spin_operators, embed_site_operator
from radpair.system import (
    BornState,
    Electron,
    NucleusSpec,
    PhysicalConstants,
    RadicalPairSpec,
    build_hamiltonian,
    initial_density,
    multiplicity,
    singlet_projector,
    triplet_projector,
)
from radpair.eigen import EigenSystem, eigendecompose, singlet_overlap_levels
from radpair.dynamics import TimeTrace, beat_spectrum, singlet_probability_trace
from radpair.yields import (
    Channel,
    HmfContrast,
    KineticParams,
    YieldResult,
    effective_hyperfine,
    hmf_effect,
    singlet_yield_singlet_born,
    singlet_yield_triplet_born,
    yield_any,
    yield_quadrature_oracle,
)

__version__ = "0.1.0"

__all__ = [
    "BornState",
    "Channel",
    "EigenSystem",
    "Electron",
    "HmfContrast",
    "KineticParams",
    "NucleusSpec",
    "PhysicalConstants",
    "RadicalPairSpec",
    "Spin",
    "TimeTrace",
    "YieldResult",
    "beat_spectrum",
    "build_hamiltonian",
    "effective_hyperfine",
    "eigendecompose",
    "embed_site_operator",
    "hmf_effect",
    "initial_density",
    "kron",
    "multiplicity",
    "singlet_overlap_levels",
    "singlet_probability_trace",
    "singlet_projector",
    "singlet_yield_singlet_born",
    "singlet_yield_triplet_born",
    "spin_operators",
    "triplet_projector",
    "yield_any",
    "yield_quadrature_oracle",
]
