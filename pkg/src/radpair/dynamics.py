"""Singlet probability in time and quantum-beat extraction."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from radpair.eigen import EigenSystem, decompose_spec, singlet_with_nuclei
from radpair.system import (
    DEFAULT_CONSTANTS,
    PhysicalConstants,
    RadicalPairSpec,
    singlet_projector,
)

DEFAULT_SAMPLES = 4096
DEFAULT_SPAN_S = 10e-6


@dataclass(frozen=True)
class TimeTrace:
    times: np.ndarray  # s
    probabilities: np.ndarray

    def __post_init__(self):
        if len(self.times) != len(self.probabilities):
            raise ValueError("times and probabilities differ in length")


def default_times(n: int = DEFAULT_SAMPLES, span: float = DEFAULT_SPAN_S) -> np.ndarray:
    return np.linspace(0.0, span, n)


def singlet_weights(spec: RadicalPairSpec, eig: EigenSystem) -> np.ndarray:
    """|<m|P_S|n>|^2 for every pair of eigenstates."""
    return np.abs(eig.transform(singlet_projector(spec))) ** 2


def coherent_probability(p_eig: np.ndarray, rho_eig: np.ndarray, omegas: np.ndarray, times,
                         chunk: int = 512) -> np.ndarray:
    """Tr[P rho(t)] for coherent evolution, from eigenbasis matrix elements.

    rho(t)_mn = rho_mn exp(-i (w_m - w_n) t), so the trace is
    sum_mn P_nm rho_mn u_m conj(u_n) with u_m = exp(-i w_m t).
    """
    times = np.asarray(times, dtype=float)
    c = p_eig.T * rho_eig
    out = np.empty(len(times))
    for lo in range(0, len(times), chunk):
        u = np.exp(-1j * np.outer(times[lo:lo + chunk], omegas))
        out[lo:lo + chunk] = np.einsum("tm,mn,tn->t", u, c, u.conj()).real
    return out


def relax(p_coherent, times, r: float):
    """Phenomenological relaxation toward the fully mixed value 1/4."""
    return 0.25 - (0.25 - p_coherent) * np.exp(-r * np.asarray(times))


def singlet_probability_trace(spec: RadicalPairSpec, B_ut: float, r: float = 0.0, times=None,
                              constants: PhysicalConstants = DEFAULT_CONSTANTS,
                              nuclear_config=None) -> TimeTrace:
    """<P_S>(t) for a singlet-born pair.

    Nuclear states are averaged (rho(0) = P_S / M) unless ``nuclear_config``
    fixes one nuclear basis state per nucleus (0 = "up").
    """
    if r < 0:
        raise ValueError(f"relaxation rate must be >= 0, got {r}")
    times = default_times() if times is None else np.asarray(times, dtype=float)
    if times.ndim != 1 or len(times) == 0 or times[0] < 0 or np.any(np.diff(times) <= 0):
        raise ValueError("times must be non-negative and strictly increasing")
    eig = decompose_spec(spec, B_ut, constants)
    p = eig.transform(singlet_projector(spec))
    if nuclear_config is None:
        rho = p / spec.multiplicity
    else:
        psi = eig.vectors.conj().T @ singlet_with_nuclei(spec, nuclear_config)
        rho = np.outer(psi, psi.conj())
    coherent = coherent_probability(p, rho, eig.values, times)
    return TimeTrace(times, relax(coherent, times, r))


def undo_relaxation(trace: TimeTrace, r: float) -> TimeTrace:
    """Invert the relaxation map to recover the coherent part of a trace."""
    p = 0.25 - (0.25 - trace.probabilities) * np.exp(r * trace.times)
    return TimeTrace(trace.times, p)


class Peak(NamedTuple):
    frequency_hz: float
    amplitude: float


def _uniform_step(times: np.ndarray) -> float:
    if len(times) < 1024:
        raise ValueError(f"beat spectrum needs at least 1024 samples, got {len(times)}")
    steps = np.diff(times)
    dt = float(np.mean(steps))
    if np.max(np.abs(steps - dt)) > 1e-6 * dt:
        raise ValueError("beat spectrum requires a uniform time grid")
    return dt


PAD_FACTOR = 8


def amplitude_spectrum(trace: TimeTrace, pad: int = PAD_FACTOR) -> tuple[np.ndarray, np.ndarray]:
    """Single-sided amplitude spectrum of the mean-removed trace.

    Rectangular window, zero-padded to ``pad`` times the record length; a
    sinusoid of amplitude A shows up with height ~A at its frequency.
    """
    dt = _uniform_step(np.asarray(trace.times))
    x = np.asarray(trace.probabilities, dtype=float)
    x = x - x.mean()
    n = pad * len(x)
    spec = np.abs(np.fft.rfft(x, n)) * 2 / len(x)
    return np.fft.rfftfreq(n, dt), spec


def beat_spectrum(trace: TimeTrace, min_amplitude: float = 1e-12, pad: int = PAD_FACTOR) -> list[Peak]:
    """Local maxima of the amplitude spectrum, strongest first.

    Peak positions are refined with a parabola through the three bins
    around each maximum. Without padding the parabola is biased by up to a
    fifth of a bin for a rectangular window; padding shrinks the bins it
    works on.
    """
    freqs, amp = amplitude_spectrum(trace, pad)
    df = freqs[1] - freqs[0]
    peaks = []
    for i in range(1, len(amp)):
        left = amp[i - 1]
        right = amp[i + 1] if i + 1 < len(amp) else -np.inf
        if amp[i] <= min_amplitude or amp[i] < left or amp[i] <= right:
            continue
        shift = 0.0
        if i + 1 < len(amp):
            denom = left - 2 * amp[i] + right
            if denom != 0:
                shift = 0.5 * (left - right) / denom
        peaks.append(Peak(float(freqs[i] + shift * df), float(amp[i])))
    peaks.sort(key=lambda p: (-p.amplitude, p.frequency_hz))
    return peaks


def strongest_peak(peaks: list[Peak], f_min: float = 0.0, f_max: float = np.inf) -> Peak | None:
    inside = [p for p in peaks if f_min <= p.frequency_hz <= f_max]
    return inside[0] if inside else None


def amplitude_at(trace: TimeTrace, frequency_hz: float, pad: int = PAD_FACTOR) -> float:
    """Spectrum amplitude at a frequency, linearly interpolated between bins."""
    freqs, amp = amplitude_spectrum(trace, pad)
    return float(np.interp(frequency_hz, freqs, amp))
