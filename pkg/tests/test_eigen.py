import numpy as np
import pytest

from radpair.eigen import (
    DECOMPOSITIONS,
    AnalyticCoefficients,
    analytic_eigvec_residuals,
    decompose_spec,
    degenerate_clusters,
    eigendecompose,
    singlet_overlap_levels,
)
from radpair.spin import permutation_matrix
from radpair.system import PhysicalConstants, RadicalPairSpec, build_hamiltonian

from conftest import random_spec

CONST = PhysicalConstants()


def random_hermitian(rng, dim):
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return (a + a.conj().T) / 2


def check_contract(h, eig):
    v, lam = eig.vectors, eig.values
    assert np.all(np.diff(lam) >= 0)
    assert np.linalg.norm(h @ v - v * lam) < 1e-10 * np.linalg.norm(h)
    assert np.max(np.abs(v.conj().T @ v - np.eye(len(lam)))) < 1e-10


def test_random_hermitian_contract(rng):
    for i in range(200):
        h = random_hermitian(rng, [4, 8, 16, 32][i % 4])
        check_contract(h, eigendecompose(h))


def test_diagonal_example():
    eig = eigendecompose(np.diag([3.0, 1.0, 2.0]))
    np.testing.assert_array_equal(eig.values, [1, 2, 3])
    np.testing.assert_array_equal(np.abs(eig.vectors), np.eye(3)[:, [1, 2, 0]])


def test_rejects_non_hermitian():
    with pytest.raises(ValueError):
        eigendecompose(np.array([[0, 1], [0, 0]], dtype=complex))


def test_deterministic_and_phase_convention(rng):
    h = random_hermitian(rng, 16)
    e1, e2 = eigendecompose(h), eigendecompose(h.copy())
    assert np.array_equal(e1.values, e2.values) and np.array_equal(e1.vectors, e2.vectors)
    idx = np.argmax(np.abs(e1.vectors), axis=0)
    pivots = e1.vectors[idx, np.arange(16)]
    assert np.all(np.abs(pivots.imag) < 1e-14) and np.all(pivots.real > 0)


def test_one_proton_zero_field_levels(proton):
    eig = decompose_spec(proton, 0.0)
    np.testing.assert_allclose(CONST.to_field_ut(eig.values), [-750] * 2 + [250] * 6, atol=1e-9)
    check_contract(build_hamiltonian(proton, 0.0), eig)


def test_pure_zeeman_levels():
    eig = decompose_spec(RadicalPairSpec(), 50.0)
    np.testing.assert_allclose(CONST.to_field_ut(eig.values), [-50, 0, 0, 50], atol=1e-9)


def test_counter_tracks_calls(proton):
    DECOMPOSITIONS.reset()
    decompose_spec(proton, 1.0)
    decompose_spec(proton, 2.0)
    assert DECOMPOSITIONS.value == 2


def test_degenerate_clusters():
    groups = degenerate_clusters(np.array([-1.0, -1.0, 0.5, 2.0, 2.0 + 1e-12]))
    assert [(g.start, g.stop) for g in groups] == [(0, 2), (2, 3), (3, 5)]


def test_spectrum_invariant_under_site_reordering(rng):
    for _ in range(10):
        spec = random_spec(rng)
        h = build_hamiltonian(spec, float(rng.uniform(0, 100)))
        perm = permutation_matrix(spec.site_dims, spec.electrons_first_order())
        a = np.linalg.eigvalsh(h)
        b = eigendecompose(perm @ h @ perm.T).values
        assert np.max(np.abs(a - b)) <= 1e-10 * np.max(np.abs(a))


def test_three_levels_overlap_singlet_nucleus_up(proton):
    levels = singlet_overlap_levels(proton, 0.0, [0])
    assert len(levels) == 3
    energies = sorted(l.energy_ut for l in levels)
    assert energies == pytest.approx([-750, 250, 250])
    assert sum(l.weight for l in levels) == pytest.approx(1, abs=1e-10)


def upper_gap(spec, B):
    lv = sorted(singlet_overlap_levels(spec, B, [0]), key=lambda l: l.energy_ut)
    return lv[2].energy_ut - lv[1].energy_ut


def test_field_lifts_degeneracy(proton):
    assert upper_gap(proton, 0.0) == pytest.approx(0, abs=1e-9)
    assert upper_gap(proton, 50.0) > 1.0


def test_degeneracy_lifting_linear_near_zero(proton):
    fields = np.array([1.0, 2.0, 4.0])
    gaps = np.array([upper_gap(proton, B) for B in fields])
    slope = np.dot(fields, gaps) / np.dot(fields, fields)
    assert np.max(np.abs(gaps - slope * fields) / gaps) < 0.05


def test_no_hyperfine_singlet_is_eigenstate():
    levels = singlet_overlap_levels(RadicalPairSpec.from_couplings([0.0]), 0.0, [0])
    assert len(levels) == 1 and levels[0].weight == pytest.approx(1)


@pytest.mark.parametrize("B", [0.0, 1.0, 50.0])
def test_overlap_weights_sum_to_one(rng, B):
    for _ in range(5):
        spec = random_spec(rng)
        total = sum(l.weight for l in singlet_overlap_levels(spec, B))
        assert total == pytest.approx(1, abs=1e-10)


def test_analytic_coefficients():
    c = AnalyticCoefficients.at(1000.0, 50.0)
    assert c.alpha == -200 and c.eta == -2800
    assert c.xi > 0 and c.delta > 0


@pytest.mark.parametrize("a, B", [(1000.0, 0.0), (1000.0, 50.0), (300.0, 7.0)])
def test_product_states_exact(a, B):
    res = {r.state: r for r in analytic_eigvec_residuals(a, B)}
    for i in (1, 2, 7, 8):
        assert res[i].residual_ut < 1e-12
        assert res[i].norm == pytest.approx(1)


def test_closed_form_flip_flop_state_vs_numeric():
    """psi_4 against the exact eigenvectors of the (4, 6) block."""
    a = 1000.0
    block = np.array([[-a / 4, a / 2], [a / 2, -a / 4]])  # B = 0
    _, vecs = np.linalg.eigh(block)
    psi4 = np.array([-1, 2]) / np.sqrt(5)  # sgn(alpha) = -1 at B = 0
    best = np.max(np.abs(vecs.T @ psi4) ** 2)
    # (1, 2)/sqrt(5) is not an eigenvector of an equal-diagonal block
    assert best < 1 - 1e-3
    res = {r.state: r for r in analytic_eigvec_residuals(a, 0.0)}
    assert res[4].norm == pytest.approx(1)
    u = np.array([-1, 2]) / np.sqrt(5)
    lam = u @ block @ u
    assert res[4].residual_ut == pytest.approx(np.linalg.norm(block @ u - lam * u))
    assert res[4].residual_ut > 1.0
