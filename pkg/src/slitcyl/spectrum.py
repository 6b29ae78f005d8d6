"""Insertion-loss spectra: sweeps, peak finding and file output."""

from __future__ import annotations

import json
import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.signal import find_peaks as _scipy_find_peaks

from .kernel import KernelPoleError
from .single import AssemblyError, SolverError

log = logging.getLogger(__name__)

THREADS_ENV = "SLITCYL_THREADS"
CSV_HEADER = "frequency_hz,insertion_loss_db"


def default_workers() -> int:
    env = os.environ.get(THREADS_ENV)
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


@dataclass
class Spectrum:
    frequencies: np.ndarray
    insertion_loss: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.frequencies = np.asarray(self.frequencies, dtype=float)
        self.insertion_loss = np.asarray(self.insertion_loss, dtype=float)
        if self.frequencies.shape != self.insertion_loss.shape:
            raise ValueError("frequency and insertion-loss arrays differ in length")
        if np.any(np.diff(self.frequencies) <= 0):
            raise ValueError("frequencies must be strictly increasing")

    def __len__(self):
        return len(self.frequencies)

    @property
    def samples(self):
        return list(zip(self.frequencies.tolist(), self.insertion_loss.tolist()))

    def to_csv(self, path) -> Path:
        path = Path(path)
        lines = [CSV_HEADER]
        lines += [f"{f:.9g},{v:.9g}" for f, v in zip(self.frequencies, self.insertion_loss)]
        path.write_text("\n".join(lines) + "\n")
        return path

    def write(self, path) -> tuple[Path, Path]:
        """CSV plus a ``.meta.json`` sidecar."""
        csv = self.to_csv(path)
        meta = Path(str(csv) + ".meta.json")
        meta.write_text(json.dumps(self.metadata, indent=2, sort_keys=True, default=_jsonable) + "\n")
        return csv, meta

    @classmethod
    def from_csv(cls, path) -> "Spectrum":
        text = Path(path).read_text().splitlines()
        if not text or text[0].strip() != CSV_HEADER:
            raise ValueError(f"{path}: missing header {CSV_HEADER!r}")
        rows = [tuple(map(float, line.split(","))) for line in text[1:] if line.strip()]
        arr = np.array(rows, dtype=float).reshape(-1, 2)
        meta_path = Path(str(path) + ".meta.json")
        meta = json.loads(meta_path.read_text()) if meta_path.exists() else {}
        return cls(arr[:, 0], arr[:, 1], meta)


def _jsonable(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return str(obj)


def run_sweep(one, frequencies, metadata=None, workers=None) -> Spectrum:
    """Evaluate ``one(f)`` over the grid; solver failures skip the sample."""
    freqs = np.asarray(frequencies, dtype=float)
    if freqs.ndim != 1:
        raise ValueError("frequency grid must be one-dimensional")
    if np.any(np.diff(freqs) <= 0):
        raise ValueError("frequency grid must be strictly increasing")
    workers = default_workers() if workers is None else max(1, int(workers))

    def guarded(f):
        try:
            return one(f), None
        except (KernelPoleError, SolverError, AssemblyError) as exc:
            return None, str(exc)

    if workers == 1 or len(freqs) < 2:
        results = []
        decade = None
        for f in freqs:
            d = math.floor(math.log10(f)) if f > 0 else None
            if d != decade:
                log.info("sweep reached %.6g Hz", f)
                decade = d
            results.append(guarded(f))
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(guarded, freqs))

    keep_f, keep_v, skipped, infinite = [], [], [], []
    for f, (v, err) in zip(freqs.tolist(), results):
        if err is not None:
            log.warning("skipping %.6g Hz: %s", f, err)
            skipped.append({"frequency_hz": f, "reason": err})
        elif not math.isfinite(v):
            infinite.append(f)
        else:
            keep_f.append(f)
            keep_v.append(v)
    meta = dict(metadata or {})
    meta["skipped"] = skipped
    meta["infinite_il_hz"] = infinite
    return Spectrum(np.array(keep_f), np.array(keep_v), meta)


@dataclass(frozen=True)
class Peak:
    frequency: float
    value: float
    prominence: float
    index: int


def _vertex(x, y):
    """Abscissa and ordinate of the parabola through three points."""
    (x0, x1, x2), (y0, y1, y2) = x, y
    d = (x0 - x1) * (x0 - x2) * (x1 - x2)
    a = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / d
    b = (x2 * x2 * (y0 - y1) + x1 * x1 * (y2 - y0) + x0 * x0 * (y1 - y2)) / d
    c = (x1 * x2 * (x1 - x2) * y0 + x2 * x0 * (x2 - x0) * y1 + x0 * x1 * (x0 - x1) * y2) / d
    if a == 0:
        return x1, y1
    xv = -b / (2 * a)
    if not x0 <= xv <= x2:
        return x1, y1
    return xv, c - b * b / (4 * a)


def find_peaks(spectrum: Spectrum, prominence: float = 0.5, fmin=None, fmax=None) -> list[Peak]:
    """Local IL maxima with at least ``prominence`` dB, refined quadratically."""
    f, v = spectrum.frequencies, spectrum.insertion_loss
    if len(f) < 3:
        return []
    idx, props = _scipy_find_peaks(v, prominence=prominence)
    out = []
    for i, p in zip(idx, props["prominences"]):
        xv, yv = _vertex(f[i - 1:i + 2], v[i - 1:i + 2])
        if fmin is not None and xv < fmin or fmax is not None and xv > fmax:
            continue
        out.append(Peak(float(xv), float(yv), float(p), int(i)))
    return out


def lowest_peak(spectrum: Spectrum, prominence: float = 0.5, **kw) -> Peak | None:
    peaks = find_peaks(spectrum, prominence, **kw)
    return peaks[0] if peaks else None


def nearest_peak(spectrum: Spectrum, target: float, prominence: float = 0.5) -> Peak | None:
    peaks = find_peaks(spectrum, prominence)
    if not peaks:
        return None
    return min(peaks, key=lambda p: abs(p.frequency - target))


def _crossing(f, v, i, level, step):
    j = i
    while 0 <= j + step < len(v):
        if v[j + step] <= level:
            a, b = v[j], v[j + step]
            t = (a - level) / (a - b) if a != b else 0.0
            return f[j] + t * (f[j + step] - f[j])
        j += step
    return None


def band_gap_summary(spectrum: Spectrum, prominence: float = 1.0, provenance: str = ""):
    """Peak centre, -3 dB width (with its edges) and peak IL for every prominent peak."""
    f, v = spectrum.frequencies, spectrum.insertion_loss
    rows = []
    for p in find_peaks(spectrum, prominence):
        level = v[p.index] - 3.0
        lo = _crossing(f, v, p.index, level, -1)
        hi = _crossing(f, v, p.index, level, +1)
        width = hi - lo if lo is not None and hi is not None else None
        rows.append({"center_hz": p.frequency, "width_hz": width, "peak_db": p.value,
                     "low_hz": lo, "high_hz": hi, "provenance": provenance})
    return rows


def format_band_gaps(rows) -> str:
    lines = ["center_hz\twidth_hz\tpeak_db\tprovenance"]
    for r in rows:
        w = "nan" if r["width_hz"] is None else f"{r['width_hz']:.6g}"
        lines.append(f"{r['center_hz']:.6g}\t{w}\t{r['peak_db']:.6g}\t{r['provenance']}")
    return "\n".join(lines) + "\n"


def gnuplot_script(csv_path, title="") -> str:
    return (f"set datafile separator ','\n"
            f"set xlabel 'Frequency (Hz)'\nset ylabel 'Insertion loss (dB)'\n"
            f"set title '{title}'\nset grid\n"
            f"plot '{Path(csv_path).name}' every ::1 using 1:2 with lines title 'IL'\n"
            f"pause -1\n")


def relative_discrepancy(reference: Spectrum, other: Spectrum, f_max: float | None = None) -> float:
    """``max |IL_other - IL_ref| / max |IL_ref|`` over shared frequencies below ``f_max``."""
    common, ia, ib = np.intersect1d(reference.frequencies, other.frequencies, return_indices=True)
    keep = np.ones(len(common), bool) if f_max is None else common < f_max
    if not np.any(keep):
        raise ValueError("spectra share no frequencies in range")
    a = reference.insertion_loss[ia][keep]
    b = other.insertion_loss[ib][keep]
    scale = np.max(np.abs(a))
    return float(np.max(np.abs(b - a)) / scale) if scale > 0 else float(np.max(np.abs(b - a)))


def agrees_to_three_figures(reference: Spectrum, other: Spectrum, f_max: float | None = None) -> bool:
    """Largest deviation below half a unit in the third significant figure of the IL scale."""
    return relative_discrepancy(reference, other, f_max) < 5e-3
