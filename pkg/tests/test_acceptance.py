"""End-to-end acceptance checks, one test and one printed verdict line per criterion.

Run with ``pytest -v -s tests/test_acceptance.py`` (the verdict lines are
printed with output capture disabled, so plain ``pytest -v`` shows them too).
"""
import time

import numpy as np
import pytest

from radpair.dynamics import amplitude_at, beat_spectrum, singlet_probability_trace, strongest_peak
from radpair.eigen import DECOMPOSITIONS, decompose_spec, eigendecompose, singlet_overlap_levels
from radpair.sweep import (
    DEFAULT_FIELD_RATES,
    default_field_grid,
    default_hyperfine_grid,
    default_rate_grid,
    effect_map,
    records_to_csv,
    sweep_field,
    sweep_hyperfine,
    sweep_kr,
)
from radpair.system import (
    DEFAULT_CONSTANTS,
    BornState,
    RadicalPairSpec,
    printed_matrix_diagnostic,
    singlet_projector,
)
from radpair.yields import (
    Channel,
    KineticParams,
    hmf_effect,
    singlet_yield_singlet_born,
    singlet_yield_triplet_born,
    yield_quadrature_oracle,
)

A = 1000.0


@pytest.fixture
def verdict(capsys):
    def report(n, ok, elapsed, limit, detail):
        in_time = elapsed < limit
        status = "PASS" if ok and in_time else "FAIL"
        with capsys.disabled():
            print(f"\n[{status}] criterion {n}: {detail} ({elapsed:.2f} s, limit {limit:.0f} s)")
        assert in_time, f"criterion {n} took {elapsed:.1f} s (limit {limit} s)"
        assert ok, f"criterion {n}: {detail}"
    return report


def kr_map(spec, born, channel):
    k, r = default_rate_grid("k_per_s"), default_rate_grid("r_per_s")
    return effect_map(sweep_kr(spec, k, r, born, channel), (len(k), len(r)))


def test_criterion_1_oracle_equivalence(verdict):
    t0 = time.perf_counter()
    rng = np.random.default_rng(1)
    worst = 0.0
    for _ in range(20):
        a, B = rng.uniform(100, 5000), rng.uniform(0, 100)
        k, r = 10 ** rng.uniform(3, 8), 10 ** rng.uniform(3, 8)
        spec, p = RadicalPairSpec.from_couplings([a]), KineticParams(k, r, B)
        for born, fn in ((BornState.SINGLET, singlet_yield_singlet_born),
                         (BornState.TRIPLET, singlet_yield_triplet_born)):
            worst = max(worst, abs(fn(spec, p).phi - yield_quadrature_oracle(spec, p, born)))
    verdict(1, worst < 1e-6, time.perf_counter() - t0, 30,
            f"max |closed form - oracle| = {worst:.2e} over 20 draws x 2 born states (tol 1e-6)")


def test_criterion_2_limits(verdict):
    t0 = time.perf_counter()
    spec = RadicalPairSpec.from_couplings([A])
    relax = KineticParams(1e6, 1e18, 0.0)
    fast = KineticParams(1e15, 0.0, 0.0)
    errs = {
        "r-inf S(S)": abs(singlet_yield_singlet_born(spec, relax).phi - 0.25),
        "r-inf S(T)": abs(singlet_yield_triplet_born(spec, relax).phi - 0.25),
        "k-inf S(S)": abs(singlet_yield_singlet_born(spec, fast).phi - 1.0),
        "k-inf S(T)": abs(singlet_yield_triplet_born(spec, fast).phi - 0.0),
    }
    zero = RadicalPairSpec.from_couplings([0.0])
    a0 = [hmf_effect(zero, k, r, born, ch)
          for k, r in DEFAULT_FIELD_RATES for born in BornState for ch in Channel]
    ok = (errs["r-inf S(S)"] <= 1e-6 and errs["r-inf S(T)"] <= 1e-6
          and errs["k-inf S(S)"] <= 1e-4 and errs["k-inf S(T)"] <= 1e-4 and all(d == 0.0 for d in a0))
    detail = ", ".join(f"{k} err {v:.1e}" for k, v in errs.items())
    verdict(2, ok, time.perf_counter() - t0, 5, f"{detail}; a=0 max |dTheta| = {max(map(abs, a0))}")


def test_criterion_3_rate_map(verdict):
    t0 = time.perf_counter()
    spec = RadicalPairSpec.from_couplings([A])
    point = hmf_effect(spec, 1e6, 1e4)
    peak = float(np.nanmax(kr_map(spec, BornState.SINGLET, Channel.SINGLET)))
    ok = point > 10 and 30 <= peak <= 50
    verdict(3, ok, time.perf_counter() - t0, 120,
            f"dTheta(k=1e6, r=1e4) = {point:.2f}% (> 10), map max = {peak:.2f}% (in [30, 50])")


def test_criterion_4_born_state_maps(verdict):
    t0 = time.perf_counter()
    spec = RadicalPairSpec.from_couplings([A])
    tt = float(np.nanmax(kr_map(spec, BornState.TRIPLET, Channel.TRIPLET)))
    st = float(np.nanmax(kr_map(spec, BornState.TRIPLET, Channel.SINGLET)))
    ss = float(np.nanmax(kr_map(spec, BornState.SINGLET, Channel.SINGLET)))
    ok = tt < 12 and st > ss
    verdict(4, ok, time.perf_counter() - t0, 240,
            f"max T(T) = {tt:.2f}% (< 12), max S(T) = {st:.2f}% > max S(S) = {ss:.2f}%")


def test_criterion_5_field_profile(verdict):
    t0 = time.perf_counter()
    spec = RadicalPairSpec.from_couplings([A])
    grid = default_field_grid()
    fields = np.array(grid.values)
    phi = np.array([rec.outputs["phi"] for rec in
                    sweep_field(spec, 1e6, 1e5, BornState.SINGLET, Channel.SINGLET, grid)])
    phi50 = singlet_yield_singlet_born(spec, KineticParams(1e6, 1e5, 50.0)).phi
    phi1e4 = phi[np.argmin(np.abs(fields - 1e4))]
    # local maxima at B <= 10 uT, the B = 0 end counting as one when the curve falls away from it
    low = [i for i in range(len(fields)) if fields[i] <= 10
           and (i == 0 or phi[i] >= phi[i - 1]) and (i + 1 == len(fields) or phi[i] >= phi[i + 1])]
    peak = max(phi[i] for i in low) if low else np.nan
    dip = float(np.min(phi))
    ok = bool(low) and peak > phi50 and dip < phi1e4 < peak
    verdict(5, ok, time.perf_counter() - t0, 20,
            f"low-field max {peak:.4f} at B = {fields[low[int(np.argmax(phi[low]))]] if low else 'none'} uT "
            f"> Phi(50) = {phi50:.4f}; dip {dip:.4f} < Phi(1e4) = {phi1e4:.4f} < peak")


def test_criterion_6_hyperfine_dependence(verdict):
    t0 = time.perf_counter()
    grid = default_hyperfine_grid()
    recs = sweep_hyperfine(RadicalPairSpec.from_couplings([A]), DEFAULT_FIELD_RATES, grid)
    a = np.array([rec.inputs["a_uT"] for rec in recs])
    d = np.array([rec.outputs["delta_percent"] for rec in recs])
    k = np.array([rec.inputs["k_per_s"] for rec in recs])
    r = np.array([rec.inputs["r_per_s"] for rec in recs])
    strong = (a < 20000) & (d > 10) & (DEFAULT_CONSTANTS.to_angular(a) > 10 * np.maximum(k, r))
    top = a >= 1e6
    tail = {f"({kk:.0e},{rr:.0e})": float(np.max(d[top & (k == kk) & (r == rr)])) for kk, rr in DEFAULT_FIELD_RATES}
    ok = bool(strong.any()) and all(v < 1 for v in tail.values())
    verdict(6, ok, time.perf_counter() - t0, 60,
            f"dTheta > 10% below 20000 uT: {bool(strong.any())} (max {np.max(d[a < 20000]):.2f}%); "
            f"dTheta at a >= 1e6 uT per (k,r): " + ", ".join(f"{k_} {v:.2f}%" for k_, v in tail.items())
            + " (all must be < 1%)")


def test_criterion_7_levels_and_beats(verdict):
    t0 = time.perf_counter()
    spec = RadicalPairSpec.from_couplings([A])
    levels = sorted(singlet_overlap_levels(spec, 0.0, [0]), key=lambda lv: lv.energy_ut)
    n_levels = len(levels)
    gap0 = abs(levels[2].energy_ut - levels[1].energy_ut) / A if n_levels == 3 else np.inf
    at50 = sorted(singlet_overlap_levels(spec, 50.0, [0]), key=lambda lv: lv.energy_ut)
    split = at50[-1].energy_ut - at50[-2].energy_ut
    f_expected = DEFAULT_CONSTANTS.to_angular(split) / (2 * np.pi)
    peak = strongest_peak(beat_spectrum(singlet_probability_trace(spec, 50.0, 0.0, nuclear_config=[0])), 0, 5e6)
    rel = abs(peak.frequency_hz / f_expected - 1)
    weak = amplitude_at(singlet_probability_trace(spec, 1.0, 0.0, nuclear_config=[0]), peak.frequency_hz)
    ratio = weak / peak.amplitude
    ok = n_levels == 3 and gap0 < 1e-9 and rel < 0.02 and ratio < 0.1
    verdict(7, ok, time.perf_counter() - t0, 30,
            f"{n_levels} overlapping levels, B=0 gap/scale {gap0:.1e}; beat {peak.frequency_hz / 1e3:.2f} kHz "
            f"vs {f_expected / 1e3:.2f} kHz ({rel:.2%}); B=1 amplitude ratio {ratio:.3f}")


def test_criterion_8_numerics(verdict):
    t0 = time.perf_counter()
    rng = np.random.default_rng(8)
    worst_res = worst_orth = 0.0
    for i in range(200):
        dim = int(rng.integers(4, 33))
        m = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
        h = (m + m.conj().T) / 2
        eig = eigendecompose(h)
        v, lam = eig.vectors, eig.values
        worst_res = max(worst_res, np.linalg.norm(h @ v - v * lam) / np.linalg.norm(h))
        worst_orth = max(worst_orth, np.max(np.abs(v.conj().T @ v - np.eye(dim))))
    sums = []
    for couplings in ([A], [500.0, -500.0], [300.0, 700.0, 1200.0]):
        spec = RadicalPairSpec.from_couplings(couplings)
        for B in (0.0, 1.0, 50.0):
            p = decompose_spec(spec, B).transform(singlet_projector(spec))
            sums.append(abs(np.sum(np.abs(p) ** 2) / spec.multiplicity - 1))
    mism = printed_matrix_diagnostic(A, 0.0)
    ok = (worst_res < 1e-10 and worst_orth < 1e-10 and max(sums) <= 1e-10
          and [(m.row, m.col) for m in mism] == [(4, 4)])
    verdict(8, ok, time.perf_counter() - t0, 30,
            f"residual {worst_res:.1e}, orthonormality {worst_orth:.1e} (200 matrices); "
            f"sum rule err {max(sums):.1e}; printed-matrix mismatches {[(m.row, m.col) for m in mism]}")


def test_criterion_9_determinism(verdict):
    t0 = time.perf_counter()
    spec = RadicalPairSpec.from_couplings([A])
    k, r = default_rate_grid("k_per_s"), default_rate_grid("r_per_s")
    DECOMPOSITIONS.reset()
    one = records_to_csv(sweep_kr(spec, k, r, workers=1)).encode()
    hoisted = DECOMPOSITIONS.value
    many = records_to_csv(sweep_kr(spec, k, r, workers=4)).encode()
    again = records_to_csv(sweep_kr(spec, k, r, workers=7)).encode()
    ok = one == many == again and hoisted == 2
    verdict(9, ok, time.perf_counter() - t0, 120,
            f"1 vs 4 vs 7 workers byte-identical: {one == many == again} ({len(one)} bytes); "
            f"decompositions per sweep: {hoisted}")
