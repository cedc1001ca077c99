"""Radical pair specifications, Hamiltonians and initial density matrices.

Energies are angular frequencies (rad/s): a field of B microtesla enters as
``gamma_e * B * 1e-6`` and hyperfine constants given in microtesla are
converted the same way, so eigenvalue differences combine directly with
rates in s^-1.
"""

from __future__ import annotations

import enum
import hashlib
import json
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from radpair.spin import (
    HALF,
    SINGLET_STATE,
    T_MINUS_STATE,
    T_PLUS_STATE,
    T_ZERO_STATE,
    Spin,
    dyad,
    embed_site_operator,
    permutation_matrix,
    spin_operators,
)
from radpair.tolerances import MAX_ABS_HYPERFINE_UT, MAX_HILBERT_DIM

UT = 1e-6  # tesla per microtesla


class DimensionCapError(ValueError):
    pass


class Electron(str, enum.Enum):
    A = "A"
    B = "B"


class BornState(str, enum.Enum):
    SINGLET = "S"
    TRIPLET = "T"


@dataclass(frozen=True)
class PhysicalConstants:
    gamma_e: float = 1.76e11  # s^-1 T^-1

    def __post_init__(self):
        if not self.gamma_e > 0:
            raise ValueError(f"gamma_e must be positive, got {self.gamma_e}")

    def to_angular(self, field_ut):
        """Convert a field (or hyperfine constant) in microtesla to rad/s."""
        return self.gamma_e * UT * field_ut

    def to_field_ut(self, omega):
        return omega / (self.gamma_e * UT)


DEFAULT_CONSTANTS = PhysicalConstants()


@dataclass(frozen=True)
class NucleusSpec:
    a_iso_ut: float
    spin: Spin = HALF
    electron: Electron = Electron.A

    def __post_init__(self):
        object.__setattr__(self, "spin", Spin.parse(self.spin))
        object.__setattr__(self, "electron", Electron(self.electron))
        if self.spin.twice_spin < 1:
            raise ValueError("spin must be >= 1/2")
        if not np.isfinite(self.a_iso_ut) or abs(self.a_iso_ut) >= MAX_ABS_HYPERFINE_UT:
            raise ValueError(f"|a_iso_ut| must be finite and below {MAX_ABS_HYPERFINE_UT:g}, got {self.a_iso_ut}")


@dataclass(frozen=True)
class RadicalPairSpec:
    """Two electrons plus isotropically coupled nuclei.

    Sites are ordered as [electron A, A's nuclei, electron B, B's nuclei],
    nuclei in the order given.
    """

    nuclei: tuple[NucleusSpec, ...] = ()
    max_dim: int = MAX_HILBERT_DIM

    def __post_init__(self):
        object.__setattr__(self, "nuclei", tuple(self.nuclei))
        if self.dim > self.max_dim:
            raise DimensionCapError(f"Hilbert dimension {self.dim} exceeds cap {self.max_dim}")

    @classmethod
    def from_couplings(cls, a_values_ut, spin=HALF, electron=Electron.A, **kw) -> "RadicalPairSpec":
        """All nuclei share one spin and sit on one electron."""
        return cls(tuple(NucleusSpec(float(a), spin, electron) for a in a_values_ut), **kw)

    @property
    def nuclei_a(self) -> list[NucleusSpec]:
        return [n for n in self.nuclei if n.electron is Electron.A]

    @property
    def nuclei_b(self) -> list[NucleusSpec]:
        return [n for n in self.nuclei if n.electron is Electron.B]

    @property
    def multiplicity(self) -> int:
        return int(np.prod([n.spin.dim for n in self.nuclei], dtype=int))

    @property
    def dim(self) -> int:
        return 4 * self.multiplicity

    @property
    def site_dims(self) -> list[int]:
        return [2] + [n.spin.dim for n in self.nuclei_a] + [2] + [n.spin.dim for n in self.nuclei_b]

    @property
    def electron_sites(self) -> tuple[int, int]:
        return 0, 1 + len(self.nuclei_a)

    def nucleus_sites(self) -> list[tuple[int, NucleusSpec]]:
        """(site index, nucleus) for every nucleus in canonical site order."""
        ia, ib = self.electron_sites
        out = [(ia + 1 + j, n) for j, n in enumerate(self.nuclei_a)]
        out += [(ib + 1 + j, n) for j, n in enumerate(self.nuclei_b)]
        return out

    def electrons_first_order(self) -> list[int]:
        """Site permutation that lists both electrons before the nuclei."""
        ia, ib = self.electron_sites
        return [ia, ib] + [s for s, _ in self.nucleus_sites()]

    def to_dict(self) -> dict:
        return {
            "nuclei": [
                {"spin": str(n.spin), "a_iso_uT": n.a_iso_ut, "electron": n.electron.value}
                for n in self.nuclei
            ]
        }

    def digest(self) -> str:
        text = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode()).hexdigest()[:16]


def multiplicity(spec: RadicalPairSpec) -> int:
    return spec.multiplicity


def _electron_operator_to_full(op4: np.ndarray, spec: RadicalPairSpec) -> np.ndarray:
    """Lift a 4x4 electron-pair operator (A x B basis) to the canonical ordering."""
    full = np.kron(op4, np.eye(spec.multiplicity))
    perm = permutation_matrix(spec.site_dims, spec.electrons_first_order())
    return perm.T @ full @ perm


def singlet_projector(spec: RadicalPairSpec) -> np.ndarray:
    return _electron_operator_to_full(dyad(SINGLET_STATE), spec)


def triplet_projector(spec: RadicalPairSpec) -> np.ndarray:
    op = dyad(T_PLUS_STATE) + dyad(T_ZERO_STATE) + dyad(T_MINUS_STATE)
    return _electron_operator_to_full(op, spec)


def build_hamiltonian(spec: RadicalPairSpec, B_ut: float = 0.0,
                      constants: PhysicalConstants = DEFAULT_CONSTANTS) -> np.ndarray:
    """Zeeman (field along z) plus isotropic hyperfine Hamiltonian in rad/s.

    The Zeeman sign puts |up_A up_B> at +gamma_e*B.
    """
    if B_ut < 0 or not np.isfinite(B_ut):
        raise ValueError(f"field must be finite and >= 0 uT, got {B_ut}")
    dims = spec.site_dims
    ia, ib = spec.electron_sites
    s_half = spin_operators(HALF)
    h = np.zeros((spec.dim, spec.dim), dtype=complex)
    if B_ut:
        h += constants.to_angular(B_ut) * (
            embed_site_operator(s_half[2], ia, dims) + embed_site_operator(s_half[2], ib, dims)
        )
    for site, nuc in spec.nucleus_sites():
        if nuc.a_iso_ut == 0:
            continue
        esite = ia if nuc.electron is Electron.A else ib
        i_ops = spin_operators(nuc.spin)
        coupling = sum(
            embed_site_operator(s, esite, dims) @ embed_site_operator(i, site, dims)
            for s, i in zip(s_half, i_ops)
        )
        h += constants.to_angular(nuc.a_iso_ut) * coupling
    return h


def initial_density(spec: RadicalPairSpec, born: BornState) -> np.ndarray:
    born = BornState(born)
    m = spec.multiplicity
    if born is BornState.SINGLET:
        return singlet_projector(spec) / m
    return triplet_projector(spec) / (3 * m)


def printed_hamiltonian(a: float, B: float) -> np.ndarray:
    """The 8x8 one-proton Hamiltonian in field units, A x N x B basis, as published."""
    h = np.zeros((8, 8))
    diag = [a / 4 + B, a / 4, -a / 4 + B, a / 4 - B, -a / 4, -a / 4 - B, a / 4, a / 4 - B]
    h[np.diag_indices(8)] = diag
    for i, j in [(2, 4), (3, 5)]:
        h[i, j] = h[j, i] = a / 2
    return h


class Mismatch(NamedTuple):
    row: int  # 1-based
    col: int
    built: float
    printed: float


def one_proton_spec(a_ut: float) -> RadicalPairSpec:
    return RadicalPairSpec((NucleusSpec(a_ut, HALF, Electron.A),))


def printed_matrix_diagnostic(a: float, B: float, atol: float = 1e-9) -> list[Mismatch]:
    """Entries where the Hamiltonian built from the model differs from the published matrix.

    Both sides are compared in microtesla in the A x N x B basis.
    """
    spec = one_proton_spec(a)
    constants = PhysicalConstants()
    built = constants.to_field_ut(build_hamiltonian(spec, B, constants))
    # canonical order for one proton on A is already [A, N, B]
    perm = permutation_matrix(spec.site_dims, [0, 1, 2])
    built = perm @ built @ perm.T
    if np.max(np.abs(built.imag)) > atol:
        raise AssertionError("one-proton Hamiltonian should be real in the product basis")
    built = built.real
    printed = printed_hamiltonian(a, B)
    tol = atol * max(1.0, abs(a), abs(B))
    rows, cols = np.nonzero(np.abs(built - printed) > tol)
    return [Mismatch(int(i) + 1, int(j) + 1, float(built[i, j]), float(printed[i, j]))
            for i, j in zip(rows, cols)]
