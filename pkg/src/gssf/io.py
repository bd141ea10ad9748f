"""Plain interchange formats: raw little-endian arrays with a JSON sidecar, and CSV.

A state ``foo`` is written as ``foo.bin`` (every array back to back, C order) and
``foo.json`` describing grid, domain, the block list with offsets, and units.
"""

from __future__ import annotations

import csv
import json
import logging
from pathlib import Path

import numpy as np

from .grid import make_grid
from .gstate import GaussianEnvelopeState, TwoEnvelopeState

log = logging.getLogger(__name__)

FORMAT_VERSION = 1
_DTYPES = {"complex128": np.dtype("<c16"), "float64": np.dtype("<f8")}
STATE_UNITS = {
    "mean": "sqrt(photons) per mode",
    "covariance": "photons (normal-ordered, vacuum = 0)",
    "window": "grid coordinate units (s for chi(2) scenarios)",
}


def _stem(path) -> Path:
    p = Path(path)
    return p.with_suffix("") if p.suffix in (".bin", ".json") else p


def _with(stem: Path, ext: str) -> Path:
    return stem.parent / (stem.name + ext)


def _le(arr: np.ndarray) -> np.ndarray:
    arr = np.asarray(arr)
    kind = "complex128" if np.iscomplexobj(arr) else "float64"
    return np.ascontiguousarray(arr, dtype=_DTYPES[kind]), kind


def write_arrays(path, arrays: dict, meta: dict | None = None) -> Path:
    """Write named arrays to ``<stem>.bin`` plus a sidecar; returns the stem."""
    stem = _stem(path)
    stem.parent.mkdir(parents=True, exist_ok=True)
    blocks, offset = [], 0
    with open(_with(stem, ".bin"), "wb") as fh:
        for name, arr in arrays.items():
            a, kind = _le(arr)
            fh.write(a.tobytes(order="C"))
            blocks.append({"name": name, "dtype": kind, "shape": list(a.shape), "offset": offset,
                           "order": "C"})
            offset += a.nbytes
    side = {"format": "gssf-raw", "version": FORMAT_VERSION, "endianness": "little",
            "blocks": blocks, **(meta or {})}
    _with(stem, ".json").write_text(json.dumps(side, indent=2, sort_keys=True))
    return stem


def read_arrays(path):
    """Inverse of :func:`write_arrays`: ``(dict of arrays, sidecar dict)``."""
    stem = _stem(path)
    side = json.loads(_with(stem, ".json").read_text())
    raw = _with(stem, ".bin").read_bytes()
    out = {}
    for b in side["blocks"]:
        dt = _DTYPES[b["dtype"]]
        n = int(np.prod(b["shape"])) if b["shape"] else 1
        out[b["name"]] = np.frombuffer(raw, dt, n, b["offset"]).reshape(b["shape"]).copy()
    return out, side


def save_state(path, state, extra: dict | None = None) -> Path:
    if isinstance(state, TwoEnvelopeState):
        kind, names = "two-envelope", state.MEANS + state.BLOCKS
    elif isinstance(state, GaussianEnvelopeState):
        kind, names = "envelope", ("mu", "Cp", "Cm")
    else:
        raise TypeError(f"cannot serialize {type(state).__name__}")
    meta = {"kind": kind, "domain": state.domain,
            "grid": {"M": state.grid.M, "window": state.grid.window},
            "ordering": "FFT order (index n <-> mode n mod M)" if state.domain == "k"
            else "bin order, z = (n - M/2 mod M) dz",
            "units": STATE_UNITS, **(extra or {})}
    return write_arrays(path, {n: getattr(state, n) for n in names}, meta)


def load_state(path):
    arrays, side = read_arrays(path)
    grid = make_grid(int(side["grid"]["M"]), float(side["grid"]["window"]))
    if side.get("kind") == "two-envelope":
        return TwoEnvelopeState(grid, **arrays, domain=side["domain"])
    if side.get("kind") == "envelope":
        return GaussianEnvelopeState(grid, arrays["mu"], arrays["Cp"], arrays["Cm"],
                                     side["domain"])
    raise ValueError(f"{_stem(path)}: unknown state kind {side.get('kind')!r}")


def write_csv(path, columns: dict, fmt: str = "%.10e") -> Path:
    """Columns of equal length; complex columns are split into ``Re``/``Im`` pairs."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    header, cols = [], []
    for name, col in columns.items():
        col = np.asarray(col)
        if np.iscomplexobj(col):
            header += [f"re_{name}", f"im_{name}"]
            cols += [col.real, col.imag]
        else:
            header.append(name)
            cols.append(col)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in zip(*cols):
            w.writerow([fmt % v for v in row])
    return path


def read_csv(path) -> dict:
    data = np.genfromtxt(path, delimiter=",", names=True)
    return {n: np.atleast_1d(data[n]) for n in data.dtype.names}


def write_manifest(path, manifest: dict) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True, default=_jsonable))
    return path


def _jsonable(x):
    if isinstance(x, np.generic):
        return x.item()
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, Path):
        return str(x)
    raise TypeError(f"not JSON serializable: {type(x).__name__}")
