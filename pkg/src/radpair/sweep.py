"""Parameter grids over field, hyperfine coupling and kinetic rates.

Each sweep decomposes every distinct (spec, B) Hamiltonian once up front;
grid cells are then evaluated in parallel against that read-only cache and
gathered back in grid-index order, so output does not depend on the number
of workers.
"""

from __future__ import annotations

import csv
import io
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from radpair.system import (
    DEFAULT_CONSTANTS,
    BornState,
    PhysicalConstants,
    RadicalPairSpec,
)
from radpair.yields import Channel, HmfContrast, SingletSpectrum, relative_effect

WORKERS_ENV = "RADPAIR_WORKERS"


@dataclass(frozen=True)
class Grid1D:
    name: str
    values: tuple[float, ...]
    spacing: str = "linear"

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        if self.spacing not in ("linear", "log"):
            raise ValueError(f"spacing must be 'linear' or 'log', got {self.spacing!r}")
        if not vals:
            raise ValueError(f"grid {self.name!r} is empty")
        if any(b <= a for a, b in zip(vals, vals[1:])):
            raise ValueError(f"grid {self.name!r} must be strictly increasing")
        if self.spacing == "log" and vals[0] <= 0:
            raise ValueError(f"log grid {self.name!r} must be strictly positive")

    @classmethod
    def linear(cls, name, start, stop, num):
        return cls(name, tuple(np.linspace(start, stop, num)), "linear")

    @classmethod
    def log(cls, name, start, stop, num):
        return cls(name, tuple(np.logspace(np.log10(start), np.log10(stop), num)), "log")

    def __len__(self):
        return len(self.values)


def default_field_grid() -> Grid1D:
    # zero prepended to a log ladder, so spacing is reported as linear
    return Grid1D("B_uT", (0.0, *np.logspace(-1, 4, 60)), "linear")


def default_hyperfine_grid() -> Grid1D:
    return Grid1D.log("a_uT", 10, 1e6, 60)


def default_rate_grid(name: str) -> Grid1D:
    return Grid1D.log(name, 1e3, 1e9, 61)


DEFAULT_FIELD_RATES = ((1e6, 1e4), (1e6, 1e5), (1e5, 1e6), (1e4, 1e6))


@dataclass
class SweepRecord:
    index: tuple[int, ...]
    inputs: dict
    outputs: dict
    provenance: dict = field(default_factory=dict)

    def row(self) -> dict:
        out = {f"i{j}": i for j, i in enumerate(self.index)}
        out.update(self.inputs)
        out.update(self.outputs)
        out.update(self.provenance)
        return out


def worker_count(workers: int | None = None) -> int:
    if workers is None:
        env = os.environ.get(WORKERS_ENV)
        workers = int(env) if env else (os.cpu_count() or 1)
    if workers < 1:
        raise ValueError(f"worker count must be >= 1, got {workers}")
    return workers


def _parallel_chunks(fn, n_items: int, workers: int):
    """Apply ``fn(lo, hi)`` to contiguous index ranges and concatenate in order."""
    workers = min(worker_count(workers), max(n_items, 1))
    bounds = np.linspace(0, n_items, workers + 1).astype(int)
    spans = [(int(lo), int(hi)) for lo, hi in zip(bounds[:-1], bounds[1:]) if hi > lo]
    if workers == 1:
        parts = [fn(lo, hi) for lo, hi in spans]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda s: fn(*s), spans))
    return np.concatenate(parts) if parts else np.empty(0)


class SpectrumCache:
    """(spec digest, B) -> SingletSpectrum, filled before any worker starts."""

    def __init__(self, constants: PhysicalConstants = DEFAULT_CONSTANTS):
        self.constants = constants
        self._store: dict = {}

    def prepare(self, spec: RadicalPairSpec, fields) -> None:
        for B in fields:
            key = (spec, float(B))
            if key not in self._store:
                self._store[key] = SingletSpectrum.at(spec, float(B), self.constants)

    def __getitem__(self, key) -> SingletSpectrum:
        spec, B = key
        return self._store[(spec, float(B))]

    def __len__(self):
        return len(self._store)


def _provenance(spec: RadicalPairSpec) -> dict:
    from radpair import __version__

    return {"spec_hash": spec.digest(), "version": __version__}


def sweep_field(spec: RadicalPairSpec, k: float, r: float, born: BornState, channel: Channel,
                B_grid: Grid1D, constants: PhysicalConstants = DEFAULT_CONSTANTS,
                workers: int | None = None) -> list[SweepRecord]:
    """Yield against field, one decomposition per field point."""
    born, channel = BornState(born), Channel(channel)
    fields = B_grid.values

    def work(lo, hi):
        out = []
        for B in fields[lo:hi]:
            s = SingletSpectrum.at(spec, B, constants)
            out.append(s.yield_value(k, r, born, channel)[0])
        return np.array(out)

    phi = _parallel_chunks(work, len(fields), workers)
    prov = _provenance(spec)
    return [
        SweepRecord((i,), {"B_uT": B, "k_per_s": float(k), "r_per_s": float(r),
                           "born": born.value, "channel": channel.value},
                    {"phi": float(p)}, prov)
        for i, (B, p) in enumerate(zip(fields, phi))
    ]


def _effect_cells(hmf: SingletSpectrum, gmf: SingletSpectrum, k_cells, r_cells, born, channel, workers):
    def work(lo, hi):
        ph = hmf.yield_value(k_cells[lo:hi], r_cells[lo:hi], born, channel)
        pg = gmf.yield_value(k_cells[lo:hi], r_cells[lo:hi], born, channel)
        return np.stack([ph, pg, relative_effect(ph, pg)], axis=1)

    return _parallel_chunks(work, len(k_cells), workers).reshape(-1, 3)


def sweep_kr(spec: RadicalPairSpec, k_grid: Grid1D, r_grid: Grid1D, born: BornState = BornState.SINGLET,
             channel: Channel = Channel.SINGLET, contrast: HmfContrast = HmfContrast(),
             constants: PhysicalConstants = DEFAULT_CONSTANTS, workers: int | None = None,
             cache: SpectrumCache | None = None) -> list[SweepRecord]:
    """Hypomagnetic field effect over a (k, r) map: exactly two decompositions."""
    born, channel = BornState(born), Channel(channel)
    cache = cache if cache is not None else SpectrumCache(constants)
    cache.prepare(spec, [contrast.B_hmf, contrast.B_gmf])
    kk, rr = np.meshgrid(np.array(k_grid.values), np.array(r_grid.values), indexing="ij")
    cells = _effect_cells(cache[spec, contrast.B_hmf], cache[spec, contrast.B_gmf],
                          kk.ravel(), rr.ravel(), born, channel, workers)
    prov = _provenance(spec)
    nr = len(r_grid)
    return [
        SweepRecord(
            (n // nr, n % nr),
            {"k_per_s": float(kk.flat[n]), "r_per_s": float(rr.flat[n]),
             "B_hmf_uT": contrast.B_hmf, "B_gmf_uT": contrast.B_gmf,
             "born": born.value, "channel": channel.value},
            {"phi_hmf": float(c[0]), "phi_gmf": float(c[1]), "delta_percent": float(c[2])},
            prov,
        )
        for n, c in enumerate(cells)
    ]


def sweep_hyperfine(spec_template: RadicalPairSpec, rate_pairs, a_grid: Grid1D,
                    contrast: HmfContrast = HmfContrast(), born: BornState = BornState.SINGLET,
                    channel: Channel = Channel.SINGLET, constants: PhysicalConstants = DEFAULT_CONSTANTS,
                    workers: int | None = None) -> list[SweepRecord]:
    """Effect against the coupling of a single nucleus, for each (k, r) pair."""
    if len(spec_template.nuclei) != 1:
        raise ValueError("hyperfine sweep needs a single-nucleus template")
    born, channel = BornState(born), Channel(channel)
    rate_pairs = [(float(k), float(r)) for k, r in rate_pairs]
    ks = np.array([k for k, _ in rate_pairs])
    rs = np.array([r for _, r in rate_pairs])
    specs = [replace(spec_template, nuclei=(replace(spec_template.nuclei[0], a_iso_ut=a),))
             for a in a_grid.values]
    cache = SpectrumCache(constants)
    for s in specs:
        cache.prepare(s, [contrast.B_hmf, contrast.B_gmf])

    def work(lo, hi):
        out = [_effect_cells(cache[s, contrast.B_hmf], cache[s, contrast.B_gmf], ks, rs, born, channel, 1)
               for s in specs[lo:hi]]
        return np.concatenate(out) if out else np.empty((0, 3))

    cells = _parallel_chunks(work, len(specs), workers).reshape(len(specs), len(rate_pairs), 3)
    records = []
    for ia, (a, s) in enumerate(zip(a_grid.values, specs)):
        prov = _provenance(s)
        for ip, (k, r) in enumerate(rate_pairs):
            c = cells[ia, ip]
            records.append(SweepRecord(
                (ia, ip),
                {"a_uT": a, "k_per_s": k, "r_per_s": r, "B_hmf_uT": contrast.B_hmf,
                 "B_gmf_uT": contrast.B_gmf, "born": born.value, "channel": channel.value},
                {"phi_hmf": float(c[0]), "phi_gmf": float(c[1]), "delta_percent": float(c[2])},
                prov,
            ))
    return records


# --- serialization ------------------------------------------------------------

def format_value(v) -> str:
    if isinstance(v, (float, np.floating)):
        if np.isnan(v):
            return "nan"
        return format(float(v), ".17g")
    return str(v)


def records_to_csv(records: list[SweepRecord]) -> str:
    buf = io.StringIO()
    if not records:
        return ""
    header = list(records[0].row())
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for rec in records:
        row = rec.row()
        writer.writerow([format_value(row[h]) for h in header])
    return buf.getvalue()


def _json_value(v):
    if isinstance(v, (float, np.floating)):
        return None if np.isnan(v) else float(format(float(v), ".17g"))
    return v


def records_to_jsonl(records: list[SweepRecord]) -> str:
    lines = []
    for rec in records:
        lines.append(json.dumps({k: _json_value(v) for k, v in rec.row().items()}, separators=(",", ":")))
    return "".join(line + "\n" for line in lines)


def effect_map(records: list[SweepRecord], shape) -> np.ndarray:
    """delta_percent values of a k-r sweep reshaped to (len(k), len(r))."""
    return np.array([rec.outputs["delta_percent"] for rec in records]).reshape(shape)
