"""Angular momentum operators and tensor-product embedding."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce

import numpy as np

from radpair.tolerances import HERMITIAN_RTOL


@dataclass(frozen=True, order=True)
class Spin:
    """Spin quantum number stored as 2I so half-integers are exact."""

    twice_spin: int

    def __post_init__(self):
        if not isinstance(self.twice_spin, (int, np.integer)) or self.twice_spin < 0:
            raise ValueError(f"twice_spin must be a non-negative integer, got {self.twice_spin!r}")

    @classmethod
    def parse(cls, value) -> "Spin":
        """Accept 0.5, "1/2", Fraction(1, 2), 1 ... and return a Spin."""
        if isinstance(value, Spin):
            return value
        try:
            frac = Fraction(str(value).strip()) if isinstance(value, str) else Fraction(value)
        except (ValueError, ZeroDivisionError, TypeError) as exc:
            raise ValueError(f"cannot interpret {value!r} as a spin") from exc
        twice = 2 * frac
        if twice.denominator != 1 or twice < 0:
            raise ValueError(f"spin must be a non-negative multiple of 1/2, got {value!r}")
        return cls(int(twice))

    @property
    def value(self) -> float:
        return self.twice_spin / 2

    @property
    def dim(self) -> int:
        return self.twice_spin + 1

    def __str__(self) -> str:
        if self.twice_spin % 2:
            return f"{self.twice_spin}/2"
        return str(self.twice_spin // 2)


HALF = Spin(1)


def spin_operators(spin: Spin | float | str) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return (Sx, Sy, Sz) for the given spin in the |I, m> basis, m descending."""
    spin = Spin.parse(spin)
    if spin.twice_spin == 0:
        raise ValueError("spin-0 has no angular momentum operators")
    s = spin.value
    m = s - np.arange(spin.dim)
    sz = np.diag(m).astype(complex)
    # raising operator: <m+1|S+|m> = sqrt(s(s+1) - m(m+1))
    sp = np.diag(np.sqrt(s * (s + 1) - m[1:] * (m[1:] + 1)), k=1).astype(complex)
    sm = sp.conj().T
    sx = (sp + sm) / 2
    sy = (sp - sm) / 2j
    return sx, sy, sz


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    a = np.asarray(a)
    b = np.asarray(b)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or b.ndim != 2 or b.shape[0] != b.shape[1]:
        raise ValueError("kron expects two square matrices")
    return np.kron(a, b)


def kron_all(ops) -> np.ndarray:
    return reduce(kron, ops)


def embed_site_operator(op: np.ndarray, site_index: int, site_dims) -> np.ndarray:
    """Place ``op`` at ``site_index`` with identities on every other site."""
    site_dims = list(site_dims)
    if not 0 <= site_index < len(site_dims):
        raise IndexError(f"site_index {site_index} out of range for {len(site_dims)} sites")
    op = np.asarray(op, dtype=complex)
    if op.shape != (site_dims[site_index],) * 2:
        raise ValueError(
            f"operator of shape {op.shape} does not fit site {site_index} of dimension {site_dims[site_index]}"
        )
    left = int(np.prod(site_dims[:site_index], dtype=int))
    right = int(np.prod(site_dims[site_index + 1:], dtype=int))
    return np.kron(np.kron(np.eye(left), op), np.eye(right))


def is_hermitian(a: np.ndarray, rtol: float = HERMITIAN_RTOL) -> bool:
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        return False
    scale = np.max(np.abs(a)) if a.size else 0.0
    return bool(np.max(np.abs(a - a.conj().T), initial=0.0) <= rtol * scale)


def permutation_matrix(site_dims, order) -> np.ndarray:
    """Unitary mapping the product basis over ``site_dims`` to the same sites listed in ``order``.

    If ``P = permutation_matrix(dims, order)`` then ``P @ H @ P.T`` is ``H``
    written in the basis whose tensor factors appear as ``[dims[i] for i in order]``.
    """
    site_dims = list(site_dims)
    order = list(order)
    if sorted(order) != list(range(len(site_dims))):
        raise ValueError(f"{order} is not a permutation of {len(site_dims)} sites")
    n = int(np.prod(site_dims, dtype=int))
    idx = np.arange(n).reshape(site_dims).transpose(order).ravel()
    perm = np.zeros((n, n))
    perm[np.arange(n), idx] = 1.0
    return perm


# electron-pair states in the |up_A up_B>, |up_A dn_B>, |dn_A up_B>, |dn_A dn_B> basis
_SQ2 = 1 / np.sqrt(2)
SINGLET_STATE = np.array([0, _SQ2, -_SQ2, 0], dtype=complex)
T_PLUS_STATE = np.array([1, 0, 0, 0], dtype=complex)
T_ZERO_STATE = np.array([0, _SQ2, _SQ2, 0], dtype=complex)
T_MINUS_STATE = np.array([0, 0, 0, 1], dtype=complex)


def dyad(v: np.ndarray) -> np.ndarray:
    return np.outer(v, v.conj())
