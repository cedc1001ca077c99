import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from radpair.system import (
    BornState,
    DimensionCapError,
    Electron,
    NucleusSpec,
    PhysicalConstants,
    RadicalPairSpec,
    build_hamiltonian,
    initial_density,
    multiplicity,
    printed_hamiltonian,
    printed_matrix_diagnostic,
)

from conftest import GAMMA, random_spec

CONST = PhysicalConstants(GAMMA)


def field_units(h, constants=CONST):
    return constants.to_field_ut(h)


@pytest.mark.parametrize("spins, m", [([], 1), (["1/2"], 2), (["1/2", "1/2", "1"], 12)])
def test_multiplicity(spins, m):
    spec = RadicalPairSpec(tuple(NucleusSpec(100.0, s) for s in spins))
    assert multiplicity(spec) == m
    assert spec.dim == 4 * m


def test_nucleus_validation():
    with pytest.raises(ValueError):
        NucleusSpec(100.0, "0")
    with pytest.raises(ValueError):
        NucleusSpec(1e7, "1/2")
    with pytest.raises(ValueError):
        NucleusSpec(100.0, "1/2", "C")


def test_dimension_cap():
    with pytest.raises(DimensionCapError):
        RadicalPairSpec.from_couplings([1.0] * 5, max_dim=64)
    assert RadicalPairSpec.from_couplings([1.0] * 4, max_dim=64).dim == 64


def test_pure_zeeman_spectrum():
    h = field_units(build_hamiltonian(RadicalPairSpec(), 50.0, CONST))
    np.testing.assert_allclose(np.diag(h).real, [50, 0, 0, -50], atol=1e-12)
    np.testing.assert_allclose(np.linalg.eigvalsh(h), [-50, 0, 0, 50], atol=1e-12)


def test_zero_field_one_proton_spectrum(proton):
    a = 1000.0
    h = field_units(build_hamiltonian(proton, 0.0, CONST))
    # flip-flop block of |up,dn,up>,|dn,up,up> from the model: [[-a/4, a/2], [a/2, -a/4]]
    block = np.array([[-a / 4, a / 2], [a / 2, -a / 4]])
    tr, det = np.trace(block), np.linalg.det(block)
    roots = sorted([(tr - np.sqrt(tr**2 - 4 * det)) / 2, (tr + np.sqrt(tr**2 - 4 * det)) / 2])
    assert roots == pytest.approx([-750, 250])
    # two such blocks plus four product states at +a/4
    expected = sorted(roots * 2 + [a / 4] * 4)
    np.testing.assert_allclose(np.linalg.eigvalsh(h), expected, atol=1e-9)


def test_zeeman_sign_matches_printed_corner(proton):
    h = field_units(build_hamiltonian(proton, 50.0, CONST))
    assert h[0, 0].real == pytest.approx(1000 / 4 + 50)


def test_printed_diagnostic_single_mismatch():
    (m,) = printed_matrix_diagnostic(1000.0, 0.0)
    assert (m.row, m.col) == (4, 4)
    # |up_A dn_N dn_B>: Zeeman cancels, hyperfine (1/2)(-1/2) a
    assert m.built == pytest.approx(-250.0)
    assert m.printed == pytest.approx(250.0)


def test_printed_diagnostic_with_field():
    mismatches = printed_matrix_diagnostic(1000.0, 50.0)
    assert [(m.row, m.col) for m in mismatches] == [(4, 4)]
    printed = printed_hamiltonian(1000.0, 50.0)
    for i, j in [(3, 5), (5, 3), (4, 6), (6, 4)]:
        assert printed[i - 1, j - 1] == 500.0


def test_printed_diagnostic_trivial():
    assert printed_matrix_diagnostic(0.0, 0.0) == []


def test_hamiltonian_rejects_negative_field(proton):
    with pytest.raises(ValueError):
        build_hamiltonian(proton, -1.0)


def test_initial_density_examples(proton):
    rho = initial_density(proton, BornState.SINGLET)
    assert np.trace(rho).real == pytest.approx(1)
    np.testing.assert_allclose(rho @ rho, rho / 2, atol=1e-15)
    rho_t = initial_density(RadicalPairSpec(), BornState.TRIPLET)
    assert np.trace(rho_t).real == pytest.approx(1)
    assert np.linalg.matrix_rank(rho_t) == 3
    s = np.array([0, 1, -1, 0]) / np.sqrt(2)
    np.testing.assert_array_equal(initial_density(RadicalPairSpec(), "S"), np.outer(s, s).astype(complex))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0, 200))
def test_hamiltonian_properties(seed, B):
    spec = random_spec(np.random.default_rng(seed))
    h = build_hamiltonian(spec, B, CONST)
    assert np.max(np.abs(h - h.conj().T)) <= 1e-12 * max(np.max(np.abs(h)), 1e-300)
    h0 = build_hamiltonian(spec, 0.0, CONST)
    # one ulp of the largest entry per diagonal element
    assert abs(np.trace(h0)) <= spec.dim * np.finfo(float).eps * max(np.max(np.abs(h0)), 1.0)
    for born in BornState:
        rho = initial_density(spec, born)
        assert abs(np.trace(rho) - 1) < 1e-12
        assert np.linalg.eigvalsh(rho).min() > -1e-12


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0, 100), st.floats(0, 100))
def test_zeeman_linearity(seed, b1, b2):
    spec = random_spec(np.random.default_rng(seed))
    bare = RadicalPairSpec(tuple(NucleusSpec(0.0, n.spin, n.electron) for n in spec.nuclei))
    diff = build_hamiltonian(spec, b1 + b2, CONST) - build_hamiltonian(spec, b1, CONST)
    ref = build_hamiltonian(bare, b2, CONST)
    scale = max(np.max(np.abs(build_hamiltonian(spec, b1 + b2, CONST))), 1.0)
    assert np.max(np.abs(diff - ref)) <= 1e-12 * scale


def test_zero_field_trace_one_proton(proton):
    assert abs(np.trace(build_hamiltonian(proton, 0.0, CONST))) < 1e-9


@pytest.mark.parametrize("B", [0.0, 50.0])
def test_field_unit_spectrum_independent_of_gamma(B):
    spec = RadicalPairSpec((NucleusSpec(700.0, "1"), NucleusSpec(-300.0, "1/2", Electron.B)))
    spectra = []
    for gamma in (1.0, 1.76e11):
        c = PhysicalConstants(gamma)
        spectra.append(np.linalg.eigvalsh(c.to_field_ut(build_hamiltonian(spec, B, c))))
    np.testing.assert_allclose(spectra[0], spectra[1], atol=1e-9)


def test_spec_digest_stable():
    a = RadicalPairSpec.from_couplings([500.0, -500.0])
    b = RadicalPairSpec.from_couplings([500.0, -500.0])
    assert a.digest() == b.digest()
    assert a.digest() != RadicalPairSpec.from_couplings([500.0, 500.0]).digest()
