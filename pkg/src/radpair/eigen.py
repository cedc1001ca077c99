"""Hermitian eigendecomposition and the level/overlap analysis built on it."""

from __future__ import annotations

import threading
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from radpair.spin import HALF, SINGLET_STATE, embed_site_operator, is_hermitian, permutation_matrix, spin_operators
from radpair.system import (
    DEFAULT_CONSTANTS,
    BornState,
    PhysicalConstants,
    RadicalPairSpec,
    build_hamiltonian,
    initial_density,
    one_proton_spec,
    singlet_projector,
)
from radpair.tolerances import DEGENERACY_RTOL, HERMITIAN_RTOL, OVERLAP_MIN_WEIGHT


class EigenSolverError(RuntimeError):
    pass


class _Counter:
    def __init__(self):
        self._n = 0
        self._lock = threading.Lock()

    def bump(self):
        with self._lock:
            self._n += 1

    @property
    def value(self) -> int:
        return self._n

    def reset(self):
        with self._lock:
            self._n = 0


# instrumentation: number of eigendecompose() calls since the last reset
DECOMPOSITIONS = _Counter()


@dataclass(frozen=True)
class EigenSystem:
    values: np.ndarray  # ascending, rad/s
    vectors: np.ndarray  # column j pairs with values[j]

    def transform(self, op: np.ndarray) -> np.ndarray:
        """Matrix elements <m|op|n> in the eigenbasis."""
        return self.vectors.conj().T @ op @ self.vectors


def _fix_phases(vectors: np.ndarray) -> np.ndarray:
    # largest-magnitude component made real-positive; argmax takes the first on ties
    idx = np.argmax(np.abs(vectors), axis=0)
    pivots = vectors[idx, np.arange(vectors.shape[1])]
    return vectors * (np.abs(pivots) / pivots)[None, :]


def degenerate_clusters(values: np.ndarray, rtol: float = DEGENERACY_RTOL) -> list[slice]:
    """Runs of sorted eigenvalues closer than ``rtol * max|value|``."""
    if len(values) == 0:
        return []
    tol = rtol * max(np.max(np.abs(values)), np.finfo(float).tiny)
    breaks = np.nonzero(np.diff(values) > tol)[0] + 1
    edges = [0, *breaks.tolist(), len(values)]
    return [slice(lo, hi) for lo, hi in zip(edges[:-1], edges[1:])]


def _refine(values, vectors, operators, rtol):
    """Rotate degenerate subspaces onto eigenvectors of each operator in turn.

    An operator is used on a subspace only if it maps that subspace into
    itself; otherwise the subspace is left as it is for that operator.
    """
    vectors = vectors.copy()
    groups = [np.arange(s.start, s.stop) for s in degenerate_clusters(values, rtol)]
    for op in operators:
        next_groups = []
        for cols in groups:
            if len(cols) == 1:
                next_groups.append(cols)
                continue
            sub = vectors[:, cols]
            image = op @ sub
            block = sub.conj().T @ image
            if np.linalg.norm(image - sub @ block) > 1e-9 * max(np.linalg.norm(op, 2), 1.0):
                next_groups.append(cols)
                continue
            block = (block + block.conj().T) / 2
            mu, w = np.linalg.eigh(block)
            vectors[:, cols] = sub @ w
            scale = max(np.max(np.abs(mu)), 1.0)
            breaks = np.nonzero(np.diff(mu) > 1e-9 * scale)[0] + 1
            next_groups.extend(np.split(cols, breaks))
        groups = next_groups
    return vectors


def eigendecompose(h: np.ndarray, refine_with: Sequence[np.ndarray] = (),
                   rtol: float = DEGENERACY_RTOL) -> EigenSystem:
    """Full spectrum of a Hermitian matrix with reproducible eigenvectors.

    ``refine_with`` lists operators commuting with ``h``; degenerate subspaces
    are rotated to diagonalize them, in order, before the phase convention is
    applied.
    """
    h = np.asarray(h, dtype=complex)
    if not is_hermitian(h, HERMITIAN_RTOL):
        raise ValueError("eigendecompose requires a Hermitian matrix")
    DECOMPOSITIONS.bump()
    try:
        values, vectors = np.linalg.eigh(h)
    except np.linalg.LinAlgError as exc:
        raise EigenSolverError(str(exc)) from exc
    if refine_with:
        vectors = _refine(values, vectors, refine_with, rtol)
    return EigenSystem(values, _fix_phases(vectors))


def symmetry_operators(spec: RadicalPairSpec) -> list[np.ndarray]:
    """Electron Zeeman operator, total S_z + I_z, then the singlet projector.

    The first two commute with every built Hamiltonian; the projector only
    resolves subspaces it leaves invariant (no hyperfine mixing).
    """
    dims = spec.site_dims
    ia, ib = spec.electron_sites
    sz = spin_operators(HALF)[2]
    zeeman = embed_site_operator(sz, ia, dims) + embed_site_operator(sz, ib, dims)
    total = zeeman.copy()
    for site, nuc in spec.nucleus_sites():
        total = total + embed_site_operator(spin_operators(nuc.spin)[2], site, dims)
    return [zeeman, total, singlet_projector(spec)]


def decompose_spec(spec: RadicalPairSpec, B_ut: float,
                   constants: PhysicalConstants = DEFAULT_CONSTANTS) -> EigenSystem:
    return eigendecompose(build_hamiltonian(spec, B_ut, constants), symmetry_operators(spec))


class LevelOverlap(NamedTuple):
    energy_ut: float
    weight: float
    index: int  # position in the ascending spectrum


def singlet_overlap_levels(spec: RadicalPairSpec, B_ut: float, nuclear_config: Sequence[int] | None = None,
                           constants: PhysicalConstants = DEFAULT_CONSTANTS,
                           min_weight: float = OVERLAP_MIN_WEIGHT) -> list[LevelOverlap]:
    """Eigenlevels populated by a singlet-born pair.

    With ``nuclear_config`` (one basis index per nucleus, 0 = highest m, i.e.
    "up"), the initial state is the pure singlet times that nuclear product
    state; otherwise the nuclear-averaged density P_S / M is used.
    """
    eig = decompose_spec(spec, B_ut, constants)
    if nuclear_config is None:
        rho = initial_density(spec, BornState.SINGLET)
        weights = np.einsum("im,ij,jm->m", eig.vectors.conj(), rho, eig.vectors).real
    else:
        psi = singlet_with_nuclei(spec, nuclear_config)
        weights = np.abs(eig.vectors.conj().T @ psi) ** 2
    energies = constants.to_field_ut(eig.values)
    return [LevelOverlap(float(energies[j]), float(weights[j]), j)
            for j in range(len(weights)) if weights[j] > min_weight]


def singlet_with_nuclei(spec: RadicalPairSpec, nuclear_config: Sequence[int]) -> np.ndarray:
    """|S> times a nuclear product state, in the canonical site ordering."""
    nucs = [n for _, n in spec.nucleus_sites()]
    if len(nuclear_config) != len(nucs):
        raise ValueError(f"need one basis index per nucleus ({len(nucs)}), got {len(nuclear_config)}")
    vec = SINGLET_STATE
    for idx, n in zip(nuclear_config, nucs):
        if not 0 <= idx < n.spin.dim:
            raise ValueError(f"basis index {idx} out of range for spin {n.spin}")
        e = np.zeros(n.spin.dim, dtype=complex)
        e[idx] = 1.0
        vec = np.kron(vec, e)
    perm = permutation_matrix(spec.site_dims, spec.electrons_first_order())
    return perm.T @ vec


@dataclass(frozen=True)
class AnalyticCoefficients:
    alpha: float
    xi: float
    delta: float
    eta: float

    @classmethod
    def at(cls, a: float, B: float) -> "AnalyticCoefficients":
        alpha = B - a / 4
        return cls(alpha=alpha, xi=float(np.sqrt(alpha**2 + a**2 / 4)),
                   delta=float(np.sqrt(alpha**2 + 4 * a**2)), eta=4 * B - 3 * a)


def _ket(a: int, n: int, b: int) -> np.ndarray:
    # 0 = up, 1 = down; A x N x B ordering
    v = np.zeros(8)
    v[4 * a + 2 * n + b] = 1.0
    return v


def analytic_eigenvectors(a: float, B: float) -> list[np.ndarray]:
    """The eight published closed-form one-proton eigenstates, taken literally."""
    c = AnalyticCoefficients.at(a, B)
    with np.errstate(divide="ignore", invalid="ignore"):
        sa, se = np.sign(c.alpha), np.sign(c.eta)
        r5 = np.sqrt(5.0)
        return [
            _ket(0, 0, 0),
            _ket(0, 0, 1),
            c.alpha / c.xi * _ket(0, 1, 0) + 2 * a / c.delta * _ket(1, 0, 0),
            -1 / r5 * _ket(0, 1, 1) - 2 * sa / r5 * _ket(1, 0, 1),
            a / (2 * c.xi) * _ket(0, 1, 0) - 4 * c.alpha / c.delta * _ket(1, 0, 0),
            2 / r5 * _ket(0, 1, 1) - se / r5 * _ket(1, 0, 1),
            _ket(1, 1, 0),
            -sa * _ket(1, 1, 1),
        ]


class AnalyticResidual(NamedTuple):
    state: int  # 1-based
    norm: float
    rayleigh_ut: float
    residual_ut: float
    best_overlap: float  # max |<v|psi>|^2 over numeric eigenvectors, psi normalized


def analytic_eigvec_residuals(a: float, B: float) -> list[AnalyticResidual]:
    """How far each published closed-form eigenstate is from being an eigenvector.

    Residuals are ||H psi - lambda psi|| for the normalized state, with
    lambda its Rayleigh quotient, in microtesla.
    """
    spec = one_proton_spec(a)
    constants = PhysicalConstants()
    h = constants.to_field_ut(build_hamiltonian(spec, B, constants))
    eig = np.linalg.eigh(h)[1]
    out = []
    for i, psi in enumerate(analytic_eigenvectors(a, B), start=1):
        norm = float(np.linalg.norm(psi))
        if not np.isfinite(norm) or norm == 0:
            out.append(AnalyticResidual(i, norm, np.nan, np.nan, np.nan))
            continue
        u = psi / norm
        lam = float(np.real(u @ h @ u))
        res = float(np.linalg.norm(h @ u - lam * u))
        overlap = float(np.max(np.abs(eig.conj().T @ u) ** 2))
        out.append(AnalyticResidual(i, norm, lam, res, overlap))
    return out
